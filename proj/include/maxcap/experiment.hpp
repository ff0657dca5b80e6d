#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "maxcap/io.hpp"

namespace maxcap {

/// One report line: a (cell, method, seed) run.
struct ExperimentRow {
    std::string family;
    std::optional<double> beta;
    std::optional<double> alpha;
    int budget = 0;
    int n_customers = 0;
    std::optional<int> scenarios;  // empty for methods that use none
    std::uint64_t seed = 0;
    std::string method;
    double time_ms = 0.0;  // solve time; build times go to the log
    std::optional<double> objective;
    std::optional<double> rgap_pct;
    std::optional<double> rgen_gap_pct;
    std::optional<double> entropy;
    std::optional<double> size_reduction_pct;
    bool optimal = false;
    bool flagged = false;  // solver limit hit or method not runnable
};

struct ExperimentResult {
    std::vector<ExperimentRow> rows;
    bool any_flagged = false;
    std::string rows_path;
    std::string summary_path;
};

/// Runs the full grid, writes `<output>.csv` (one row per cell/method/seed)
/// and `<output>_summary.csv` (per-cell means over seeds), and returns the
/// rows. Cells may run on `jobs` threads; output order is independent of
/// scheduling. Progress and build-phase timings go to `log` when given.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::ostream* log = nullptr);

/// CSV serialization, exposed for tests and tooling.
std::string rows_to_csv(const std::vector<ExperimentRow>& rows, bool report_times);
std::string summary_to_csv(const std::vector<ExperimentRow>& rows, bool report_times);

}  // namespace maxcap
