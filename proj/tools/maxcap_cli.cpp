// Command-line front end: instance generation, solving, entropy profiling,
// out-of-sample evaluation and grid benchmarks over the library.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "maxcap/analysis.hpp"
#include "maxcap/experiment.hpp"
#include "maxcap/io.hpp"
#include "maxcap/model.hpp"
#include "maxcap/simulate.hpp"
#include "maxcap/solver_binary.hpp"
#include "maxcap/solver_moa.hpp"

namespace {

using nlohmann::json;
using namespace maxcap;

std::vector<int> parse_open_list(const std::string& text) {
    std::vector<int> open;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (!item.empty()) open.push_back(std::stoi(item));
    }
    return open;
}

GenerativeModel model_from_flags(const std::string& family, double beta, int budget,
                                 std::uint64_t layout_seed) {
    if (family == "hm14-mmnl") return gen_hm14_mmnl(layout_seed);
    if (family == "mmnl3") {
        Mmnl3Params params;
        params.beta = beta;
        params.budget = budget;
        return gen_mmnl3(params, layout_seed);
    }
    throw CLI::ValidationError("--family", "expected hm14-mmnl or mmnl3");
}

json solution_to_json(const Solution& solution) {
    json open = json::array();
    for (int c : solution.decision.open_indices()) open.push_back(c);
    return json{{"method", to_string(solution.method)},
                {"objective", solution.objective},
                {"open", std::move(open)},
                {"optimal", solution.optimal},
                {"iterations", solution.iterations},
                {"time_ms", solution.wall_time.count() * 1000.0}};
}

int cmd_generate(const std::string& family, const Hm14Params& hm14, double beta,
                 int budget, int n, std::uint64_t seed, std::uint64_t layout_seed,
                 const std::string& out_path) {
    ChoiceInstance instance;
    if (family == "hm14") {
        instance = gen_hm14(hm14, seed);
    } else {
        instance = materialize_sample(model_from_flags(family, beta, budget, layout_seed),
                                      n, seed);
    }
    save_instance(instance, out_path);
    std::cout << "wrote " << out_path << " (" << instance.n_customers() << " customers, "
              << instance.n_candidates() << " candidates, " << instance.n_competitors()
              << " competitors, r=" << instance.budget << ")\n";
    return 0;
}

int cmd_solve(const std::string& in_path, const std::string& method, int scenarios,
              std::uint64_t seed, int groups, double tolerance, bool trace) {
    ChoiceInstance instance = load_instance(in_path);
    json result;
    if (method == "moa") {
        MoaConfig config;
        config.n_groups = groups;
        config.tolerance = tolerance;
        std::vector<MoaIteration> iterations;
        if (trace) config.trace = &iterations;
        Solution solution = moa_solve(instance, config);
        if (trace) {
            std::cout << "iteration,master_value,incumbent_value,gap\n";
            for (const MoaIteration& it : iterations) {
                std::cout << it.iteration << ',' << it.master_value << ','
                          << it.incumbent_value << ',' << it.gap << '\n';
            }
        }
        result = solution_to_json(solution);
    } else if (method == "brute") {
        result = solution_to_json(solve_bruteforce_mnl(instance));
    } else if (method == "sb" || method == "sbc") {
        CoverageProblem coverage = build_coverage(instance, scenarios, NoiseModel{}, seed);
        Solution solution;
        if (method == "sb") {
            solution = solve_coverage(coverage);
        } else {
            ClusteredProblem clustered = cluster(coverage);
            solution = solve_exact(clustered);
            result["size_reduction_pct"] = size_reduction(coverage, clustered);
            result["profiles"] = clustered.n_profiles();
        }
        result.update(solution_to_json(solution));
        result["in_sample_mnl_objective"] =
            objective_mnl(instance, solution.decision);
    }
    std::cout << result.dump(2) << '\n';
    return 0;
}

int cmd_entropy(const std::string& in_path, const std::string& family, double beta,
                int budget, std::uint64_t layout_seed, std::int64_t n_tilde,
                std::uint64_t seed, bool with_capture) {
    EntropyReport report;
    if (!in_path.empty()) {
        ChoiceInstance instance = load_instance(in_path);
        report.expected_entropy = entropy_mnl(instance);
        report.variant = EntropyVariant::MnlExact;
        report.sample_size = instance.n_customers();
        if (with_capture) report.capture_entropy = capture_entropy(instance);
    } else {
        GenerativeModel model = model_from_flags(family, beta, budget, layout_seed);
        report.expected_entropy = entropy_mmnl(model, n_tilde, seed);
        report.variant = EntropyVariant::MmnlMonteCarlo;
        report.sample_size = n_tilde;
        if (with_capture) {
            report.capture_entropy = capture_entropy(model, n_tilde, seed);
        }
    }
    json out{{"expected_entropy_nats", report.expected_entropy},
             {"variant", report.variant == EntropyVariant::MnlExact ? "mnl-exact"
                                                                    : "mmnl-monte-carlo"},
             {"sample_size", report.sample_size}};
    if (report.capture_entropy) out["capture_entropy_nats"] = *report.capture_entropy;
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_evaluate(const std::string& in_path, const std::string& family, double beta,
                 int budget, std::uint64_t layout_seed, const std::string& open_list,
                 std::int64_t n_tilde, std::uint64_t seed) {
    std::vector<int> open = parse_open_list(open_list);
    json out;
    if (!in_path.empty()) {
        ChoiceInstance instance = load_instance(in_path);
        DecisionVector x = DecisionVector::from_indices(instance.n_candidates(), open);
        out = json{{"objective", objective_mnl(instance, x)}, {"exact", true}};
    } else {
        GenerativeModel model = model_from_flags(family, beta, budget, layout_seed);
        DecisionVector x = DecisionVector::from_indices(model.n_candidates(), open);
        ZEstimate z = estimate_Z(model, x, n_tilde, seed);
        out = json{{"z_estimate", z.value},
                   {"std_error", z.std_error},
                   {"sample_size", z.sample_size}};
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_bench(const std::string& config_path, const std::string& output_override,
              int jobs_override, bool quiet) {
    ExperimentConfig config = load_config(config_path);
    if (!output_override.empty()) config.output = output_override;
    if (jobs_override > 0) config.jobs = jobs_override;
    ExperimentResult result = run_experiment(config, quiet ? nullptr : &std::clog);
    std::cout << "rows: " << result.rows.size() << "\nwrote " << result.rows_path
              << "\nwrote " << result.summary_path << '\n';
    return result.any_flagged ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Competitive facility location under random-utility demand: "
                 "simulation-based 0-1 reformulation with profile clustering, "
                 "multicut outer approximation, and entropy-based instance profiling"};
    app.require_subcommand(1);

    // generate
    auto* generate = app.add_subcommand("generate", "Generate an instance file");
    std::string g_family = "hm14";
    Hm14Params hm14;
    double g_beta = 1.0;
    int g_budget = 10;
    int g_n = 100;
    std::uint64_t g_seed = 0;
    std::uint64_t g_layout_seed = 1;
    std::string g_out = "instance.json";
    generate->add_option("--family", g_family, "hm14 | hm14-mmnl | mmnl3")
        ->check(CLI::IsMember({"hm14", "hm14-mmnl", "mmnl3"}));
    generate->add_option("--n", g_n, "customers (sample size for generative families)");
    generate->add_option("--candidates", hm14.n_candidates, "hm14: candidate count");
    generate->add_option("--competitors", hm14.n_competitors, "hm14: competitor count");
    generate->add_option("--beta", g_beta, "utility scale");
    generate->add_option("--alpha", hm14.alpha, "hm14: competitor attractiveness");
    generate->add_option("--r", g_budget, "budget (ignored for hm14-mmnl)");
    generate->add_option("--seed", g_seed, "root seed")->required();
    generate->add_option("--layout-seed", g_layout_seed, "facility layout seed");
    generate->add_option("--out", g_out, "output path");

    // solve
    auto* solve = app.add_subcommand("solve", "Solve an instance file");
    std::string s_in, s_method = "sbc";
    int s_scenarios = 100;
    std::uint64_t s_seed = 0;
    int s_groups = 0;
    double s_tolerance = 1e-6;
    bool s_trace = false;
    solve->add_option("--in", s_in, "instance file")->required();
    solve->add_option("--method", s_method, "sb | sbc | moa | brute")
        ->check(CLI::IsMember({"sb", "sbc", "moa", "brute"}));
    solve->add_option("--scenarios", s_scenarios, "sb/sbc: noise scenarios per customer");
    solve->add_option("--seed", s_seed, "sb/sbc: scenario seed");
    solve->add_option("--groups", s_groups, "moa: cut groups (0 = one per customer)");
    solve->add_option("--tol", s_tolerance, "moa: absolute objective tolerance");
    solve->add_flag("--trace", s_trace, "moa: print per-iteration bounds as CSV");

    // entropy
    auto* entropy = app.add_subcommand("entropy", "Expected choice entropy of an instance or model");
    std::string e_in, e_family = "mmnl3";
    double e_beta = 1.0;
    int e_budget = 10;
    std::uint64_t e_layout_seed = 1, e_seed = 0;
    std::int64_t e_ntilde = 100000;
    bool e_capture = false;
    entropy->add_option("--in", e_in, "instance file (exact computation)");
    entropy->add_option("--family", e_family, "hm14-mmnl | mmnl3 (Monte-Carlo estimate)");
    entropy->add_option("--beta", e_beta, "mmnl3: utility scale");
    entropy->add_option("--r", e_budget, "mmnl3: budget (metadata only)");
    entropy->add_option("--layout-seed", e_layout_seed, "facility layout seed");
    entropy->add_option("--ntilde", e_ntilde, "Monte-Carlo sample size");
    entropy->add_option("--seed", e_seed, "Monte-Carlo seed");
    entropy->add_flag("--capture", e_capture, "also report captured-vs-lost binary entropy");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Score a decision in or out of sample");
    std::string v_in, v_family = "mmnl3", v_open;
    double v_beta = 1.0;
    int v_budget = 10;
    std::uint64_t v_layout_seed = 1, v_seed = 0;
    std::int64_t v_ntilde = 1000000;
    evaluate->add_option("--in", v_in, "instance file (exact in-sample objective)");
    evaluate->add_option("--family", v_family, "hm14-mmnl | mmnl3 (fresh-sample estimate)");
    evaluate->add_option("--beta", v_beta, "mmnl3: utility scale");
    evaluate->add_option("--r", v_budget, "mmnl3: budget");
    evaluate->add_option("--layout-seed", v_layout_seed, "facility layout seed");
    evaluate->add_option("--open", v_open, "comma-separated open candidate indices")
        ->required();
    evaluate->add_option("--ntilde", v_ntilde, "evaluation sample size");
    evaluate->add_option("--seed", v_seed, "evaluation seed");

    // bench
    auto* bench = app.add_subcommand("bench", "Run an experiment grid from a config file");
    std::string b_config, b_output;
    int b_jobs = 0;
    bool b_quiet = false;
    bench->add_option("--config", b_config, "experiment config (json)")->required();
    bench->add_option("--output", b_output, "override the report path prefix");
    bench->add_option("--jobs", b_jobs, "parallel cells");
    bench->add_flag("--quiet", b_quiet, "suppress the progress log");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*generate) {
            hm14.beta = g_beta;
            hm14.n_customers = g_n;
            hm14.budget = g_budget;
            return cmd_generate(g_family, hm14, g_beta, g_budget, g_n, g_seed,
                                g_layout_seed, g_out);
        }
        if (*solve)
            return cmd_solve(s_in, s_method, s_scenarios, s_seed, s_groups, s_tolerance,
                             s_trace);
        if (*entropy)
            return cmd_entropy(e_in, e_family, e_beta, e_budget, e_layout_seed, e_ntilde,
                               e_seed, e_capture);
        if (*evaluate)
            return cmd_evaluate(v_in, v_family, v_beta, v_budget, v_layout_seed, v_open,
                                v_ntilde, v_seed);
        if (*bench) return cmd_bench(b_config, b_output, b_jobs, b_quiet);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
    return 0;
}
