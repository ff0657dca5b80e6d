#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maxcap/types.hpp"

namespace maxcap {

/// Parses an instance from the JSON schema
///   {"candidates":[{"id","x","y","type"?}], "competitors":[...],
///    "r": int, "customers":[{"q"?, "v":[...]}], "meta"?: {...}}
/// where each customer's "v" lists utilities over candidates then
/// competitors. Customers may omit "q", in which case weights default to
/// 1/|N|. Throws std::runtime_error with context on malformed files and
/// std::invalid_argument on invariant violations.
ChoiceInstance load_instance(const std::string& path);
ChoiceInstance instance_from_json_text(const std::string& text);

void save_instance(const ChoiceInstance& instance, const std::string& path);
std::string instance_to_json_text(const ChoiceInstance& instance);

/// Grid of experiment cells: every combination of (beta, alpha, r, n, s)
/// runs once per method per seed.
struct ExperimentConfig {
    std::string family = "hm14";  // hm14 | hm14-mmnl | mmnl3 | file
    std::string path;             // family == "file" only

    std::vector<double> beta{1.0};
    std::vector<double> alpha{0.1};
    std::vector<int> budgets{5};
    std::vector<int> n_customers{50};
    std::vector<int> scenarios{1};
    int n_candidates = 25;   // hm14 only
    int n_competitors = 10;  // hm14 only

    std::vector<std::string> methods{"sbc"};
    std::vector<std::uint64_t> seeds{1};
    std::int64_t n_tilde = 100000;  // evaluation / entropy sample size
    std::uint64_t layout_seed = 1;  // generative families: fixed facilities

    std::string output = "report";
    bool report_times = true;  // false pins timing columns to 0 so repeated
                               // runs produce byte-identical reports
    int jobs = 1;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text);

}  // namespace maxcap
