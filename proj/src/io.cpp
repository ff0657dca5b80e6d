#include "maxcap/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace maxcap {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<Facility> parse_facilities(const json& list, FacilityKind kind,
                                       const char* what) {
    std::vector<Facility> out;
    out.reserve(list.size());
    for (const json& f : list) {
        Facility facility;
        facility.id = f.at("id").get<int>();
        facility.position.x = f.at("x").get<double>();
        facility.position.y = f.at("y").get<double>();
        facility.kind = kind;
        facility.location_type = f.value("type", -1);
        out.push_back(facility);
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t j = i + 1; j < out.size(); ++j) {
            if (out[i].id == out[j].id)
                throw std::invalid_argument(std::string(what) + ": duplicate facility id " +
                                            std::to_string(out[i].id));
        }
    }
    return out;
}

json facilities_to_json(const std::vector<Facility>& facilities) {
    json list = json::array();
    for (const Facility& f : facilities) {
        json entry{{"id", f.id}, {"x", f.position.x}, {"y", f.position.y}};
        if (f.location_type >= 0) entry["type"] = f.location_type;
        list.push_back(std::move(entry));
    }
    return list;
}

}  // namespace

ChoiceInstance instance_from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        throw std::runtime_error(std::string("instance parse error: ") + err.what());
    }

    ChoiceInstance instance;
    try {
        instance.candidates =
            parse_facilities(doc.at("candidates"), FacilityKind::Candidate, "candidates");
        instance.competitors = parse_facilities(doc.value("competitors", json::array()),
                                                FacilityKind::Competitor, "competitors");
        instance.budget = doc.at("r").get<int>();

        const json& customers = doc.at("customers");
        const std::size_t alt = instance.candidates.size() + instance.competitors.size();
        std::size_t weighted = 0;
        for (const json& c : customers) {
            const json& v = c.at("v");
            if (v.size() != alt)
                throw std::invalid_argument(
                    "customer has " + std::to_string(v.size()) + " utilities, expected " +
                    std::to_string(alt));
            for (const json& u : v) instance.utilities.push_back(u.get<double>());
            if (c.contains("q")) {
                ++weighted;
                instance.weights.push_back(c.at("q").get<double>());
            } else {
                instance.weights.push_back(0.0);  // placeholder, filled below
            }
        }
        if (weighted == 0) {
            // No file weights: uniform by definition.
            std::fill(instance.weights.begin(), instance.weights.end(),
                      1.0 / static_cast<double>(instance.weights.size()));
        } else if (weighted != instance.weights.size()) {
            throw std::invalid_argument("either every customer carries 'q' or none does");
        }
        if (doc.contains("meta")) {
            for (auto& [key, value] : doc.at("meta").items()) {
                instance.meta[key] = value.is_string() ? value.get<std::string>()
                                                       : value.dump();
            }
        }
    } catch (const json::exception& err) {
        throw std::runtime_error(std::string("instance schema error: ") + err.what());
    }

    validate(instance);
    return instance;
}

ChoiceInstance load_instance(const std::string& path) {
    try {
        return instance_from_json_text(read_file(path));
    } catch (const std::runtime_error& err) {
        throw std::runtime_error(path + ": " + err.what());
    }
}

std::string instance_to_json_text(const ChoiceInstance& instance) {
    json doc;
    doc["candidates"] = facilities_to_json(instance.candidates);
    doc["competitors"] = facilities_to_json(instance.competitors);
    doc["r"] = instance.budget;
    json customers = json::array();
    const int alt = instance.n_alternatives();
    for (int n = 0; n < instance.n_customers(); ++n) {
        json row;
        row["q"] = instance.weights[n];
        json v = json::array();
        for (int c = 0; c < alt; ++c) v.push_back(instance.utility(n, c));
        row["v"] = std::move(v);
        customers.push_back(std::move(row));
    }
    doc["customers"] = std::move(customers);
    if (!instance.meta.empty()) {
        json meta;
        for (const auto& [key, value] : instance.meta) meta[key] = value;
        doc["meta"] = std::move(meta);
    }
    return doc.dump(2) + "\n";
}

void save_instance(const ChoiceInstance& instance, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << instance_to_json_text(instance);
}

ExperimentConfig config_from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        throw std::runtime_error(std::string("config parse error: ") + err.what());
    }

    ExperimentConfig config;
    try {
        config.family = doc.value("family", config.family);
        config.path = doc.value("path", config.path);
        if (doc.contains("beta")) config.beta = doc.at("beta").get<std::vector<double>>();
        if (doc.contains("alpha")) config.alpha = doc.at("alpha").get<std::vector<double>>();
        if (doc.contains("r")) config.budgets = doc.at("r").get<std::vector<int>>();
        if (doc.contains("n")) config.n_customers = doc.at("n").get<std::vector<int>>();
        if (doc.contains("s")) config.scenarios = doc.at("s").get<std::vector<int>>();
        config.n_candidates = doc.value("n_candidates", config.n_candidates);
        config.n_competitors = doc.value("n_competitors", config.n_competitors);
        if (doc.contains("methods"))
            config.methods = doc.at("methods").get<std::vector<std::string>>();
        if (doc.contains("seeds"))
            config.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
        config.n_tilde = doc.value("n_tilde", config.n_tilde);
        config.layout_seed = doc.value("layout_seed", config.layout_seed);
        config.output = doc.value("output", config.output);
        config.report_times = doc.value("report_times", config.report_times);
        config.jobs = doc.value("jobs", config.jobs);
    } catch (const json::exception& err) {
        throw std::runtime_error(std::string("config schema error: ") + err.what());
    }

    if (config.family != "hm14" && config.family != "hm14-mmnl" &&
        config.family != "mmnl3" && config.family != "file")
        throw std::invalid_argument("config: unknown family '" + config.family + "'");
    if (config.family == "file" && config.path.empty())
        throw std::invalid_argument("config: family 'file' requires 'path'");
    if (config.methods.empty()) throw std::invalid_argument("config: empty method list");
    for (const std::string& m : config.methods) {
        if (m != "sb" && m != "sbc" && m != "moa" && m != "brute")
            throw std::invalid_argument("config: unknown method '" + m + "'");
    }
    if (config.seeds.empty()) throw std::invalid_argument("config: empty seed list");
    if (config.jobs < 1) throw std::invalid_argument("config: jobs must be >= 1");
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    try {
        return config_from_json_text(read_file(path));
    } catch (const std::runtime_error& err) {
        throw std::runtime_error(path + ": " + err.what());
    }
}

}  // namespace maxcap
