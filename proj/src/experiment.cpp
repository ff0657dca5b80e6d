#include "maxcap/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "maxcap/analysis.hpp"
#include "maxcap/model.hpp"
#include "maxcap/simulate.hpp"
#include "maxcap/solver_binary.hpp"
#include "maxcap/solver_moa.hpp"

namespace maxcap {

namespace {

double ms(std::chrono::duration<double> d) { return d.count() * 1000.0; }

std::string fmt(double value, const char* spec = "%.6g") {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), spec, value);
    return buffer;
}

std::string opt_fmt(const std::optional<double>& value, const char* spec = "%.6g") {
    return value ? fmt(*value, spec) : std::string{};
}

// One unit of work: a parameter cell under one seed, producing the rows of
// every method and scenario count.
struct Cell {
    double beta = 1.0;
    double alpha = 0.1;
    int budget = 5;
    int n_customers = 50;
    std::uint64_t seed = 0;
};

class Runner {
public:
    Runner(const ExperimentConfig& config, std::ostream* log)
        : config_(config), log_(log) {}

    std::vector<ExperimentRow> run() {
        std::vector<Cell> cells = make_cells();
        std::vector<std::vector<ExperimentRow>> results(cells.size());

        const int jobs = std::max(1, config_.jobs);
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto work = [&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= cells.size()) return;
                try {
                    results[i] = run_cell(cells[i]);
                } catch (...) {
                    std::scoped_lock lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        };
        if (jobs == 1) {
            work();
        } else {
            for (int j = 0; j < jobs; ++j) workers.emplace_back(work);
            for (std::thread& w : workers) w.join();
        }
        if (failure) std::rethrow_exception(failure);

        std::vector<ExperimentRow> rows;
        for (const auto& cell_rows : results) {
            rows.insert(rows.end(), cell_rows.begin(), cell_rows.end());
        }
        return rows;
    }

private:
    std::vector<Cell> make_cells() const {
        std::vector<Cell> cells;
        const bool generative = config_.family == "hm14-mmnl" || config_.family == "mmnl3";
        std::vector<double> betas = config_.beta;
        std::vector<double> alphas = config_.alpha;
        std::vector<int> budgets = config_.budgets;
        std::vector<int> n_ladder = config_.n_customers;
        if (config_.family == "hm14-mmnl") {
            betas = {1.0};
            budgets = {5};
        }
        if (config_.family == "file") {
            // Size and budget come from the instance itself.
            betas = {1.0};
            budgets = {0};
            n_ladder = {0};
        }
        if (generative || config_.family == "file") alphas = {1.0};

        for (double beta : betas) {
            for (double alpha : alphas) {
                for (int budget : budgets) {
                    for (int n : n_ladder) {
                        for (std::uint64_t seed : config_.seeds) {
                            cells.push_back(Cell{beta, alpha, budget, n, seed});
                        }
                    }
                }
            }
        }
        return cells;
    }

    ExperimentRow base_row(const Cell& cell) const {
        ExperimentRow row;
        row.family = config_.family;
        row.budget = cell.budget;
        row.n_customers = cell.n_customers;
        row.seed = cell.seed;
        if (config_.family == "hm14") {
            row.beta = cell.beta;
            row.alpha = cell.alpha;
        } else if (config_.family == "hm14-mmnl") {
            row.beta = 1.0;
        } else if (config_.family == "mmnl3") {
            row.beta = cell.beta;
        }
        return row;
    }

    bool wants(const std::string& method) const {
        return std::find(config_.methods.begin(), config_.methods.end(), method) !=
               config_.methods.end();
    }

    void note(const std::string& message) const {
        if (!log_) return;
        std::scoped_lock lock(log_mutex_);
        *log_ << message << '\n';
    }

    std::vector<ExperimentRow> run_cell(const Cell& cell) {
        if (config_.family == "hm14") return run_conditional_cell(cell, make_hm14(cell));
        if (config_.family == "file") return run_conditional_cell(cell, load_instance(config_.path));
        return run_generative_cell(cell);
    }

    ChoiceInstance make_hm14(const Cell& cell) const {
        Hm14Params params;
        params.n_customers = cell.n_customers;
        params.n_candidates = config_.n_candidates;
        params.n_competitors = config_.n_competitors;
        params.beta = cell.beta;
        params.alpha = cell.alpha;
        params.budget = cell.budget;
        return gen_hm14(params, cell.seed);
    }

    // Finite-support flow: entropy is exact, solution quality is the
    // relative gap against the multicut optimum of the same instance.
    std::vector<ExperimentRow> run_conditional_cell(const Cell& cell,
                                                    ChoiceInstance instance) {
        std::vector<ExperimentRow> rows;
        ExperimentRow base = base_row(cell);
        base.n_customers = instance.n_customers();
        base.budget = instance.budget;
        base.entropy = entropy_mnl(instance);

        Solution reference = moa_solve(instance);
        if (!reference.optimal)
            note("warning: reference solve did not converge for seed " +
                 std::to_string(cell.seed));

        auto finish = [&](ExperimentRow row, const Solution& solution) {
            row.method = to_string(solution.method);
            row.time_ms = ms(solution.wall_time);
            row.objective = objective_mnl(instance, solution.decision);
            row.rgap_pct = rgap(instance, solution.decision, reference);
            row.optimal = solution.optimal;
            row.flagged = !solution.optimal;
            rows.push_back(std::move(row));
        };

        if (wants("moa")) finish(base, reference);
        if (wants("brute")) {
            ExperimentRow row = base;
            try {
                finish(row, solve_bruteforce_mnl(instance));
            } catch (const std::invalid_argument& err) {
                row.method = "brute";
                row.flagged = true;
                rows.push_back(row);
                note(std::string("brute skipped: ") + err.what());
            }
        }
        for (int s : config_.scenarios) {
            CoverageProblem coverage;
            std::chrono::duration<double> build_time{};
            if (wants("sb") || wants("sbc")) {
                auto t0 = std::chrono::steady_clock::now();
                coverage = build_coverage(instance, s, NoiseModel{}, cell.seed);
                build_time = std::chrono::steady_clock::now() - t0;
                note("build s=" + std::to_string(s) + " seed=" + std::to_string(cell.seed) +
                     ": " + fmt(ms(build_time), "%.3f") + " ms");
            }
            if (wants("sb")) {
                ExperimentRow row = base;
                row.scenarios = s;
                finish(row, solve_coverage(coverage));
            }
            if (wants("sbc")) {
                ClusteredProblem clustered = cluster(coverage);
                ExperimentRow row = base;
                row.scenarios = s;
                row.size_reduction_pct = size_reduction(coverage, clustered);
                finish(row, solve_exact(clustered));
            }
        }
        return rows;
    }

    GenerativeModel make_model(const Cell& cell) const {
        if (config_.family == "hm14-mmnl") return gen_hm14_mmnl(config_.layout_seed);
        Mmnl3Params params;
        params.beta = cell.beta;
        params.budget = cell.budget;
        return gen_mmnl3(params, config_.layout_seed);
    }

    // Generative flow: in-sample objective on the materialized customers,
    // generalization gap against a fresh evaluation sample.
    std::vector<ExperimentRow> run_generative_cell(const Cell& cell) {
        std::vector<ExperimentRow> rows;
        GenerativeModel model = make_model(cell);
        ChoiceInstance instance = materialize_sample(model, cell.n_customers, cell.seed);

        ExperimentRow base = base_row(cell);
        base.budget = model.budget();
        base.entropy = cached_entropy(cell, model);

        auto finish = [&](ExperimentRow row, const Solution& solution) {
            row.method = to_string(solution.method);
            row.time_ms = ms(solution.wall_time);
            double in_sample = objective_mnl(instance, solution.decision);
            row.objective = in_sample;
            ZEstimate z = estimate_Z(model, solution.decision, config_.n_tilde, cell.seed);
            row.rgen_gap_pct = rgen_gap(in_sample, z.value);
            row.optimal = solution.optimal;
            row.flagged = !solution.optimal;
            rows.push_back(std::move(row));
        };

        if (wants("moa")) finish(base, moa_solve(instance));
        if (wants("brute")) {
            ExperimentRow row = base;
            try {
                finish(row, solve_bruteforce_mnl(instance));
            } catch (const std::invalid_argument& err) {
                row.method = "brute";
                row.flagged = true;
                rows.push_back(row);
                note(std::string("brute skipped: ") + err.what());
            }
        }
        for (int s : config_.scenarios) {
            CoverageProblem coverage;
            if (wants("sb") || wants("sbc")) {
                auto t0 = std::chrono::steady_clock::now();
                coverage = build_coverage(instance, s, NoiseModel{}, cell.seed);
                note("build s=" + std::to_string(s) + " seed=" + std::to_string(cell.seed) +
                     ": " + fmt(ms(std::chrono::steady_clock::now() - t0), "%.3f") + " ms");
            }
            if (wants("sb")) {
                ExperimentRow row = base;
                row.scenarios = s;
                finish(row, solve_coverage(coverage));
            }
            if (wants("sbc")) {
                ClusteredProblem clustered = cluster(coverage);
                ExperimentRow row = base;
                row.scenarios = s;
                row.size_reduction_pct = size_reduction(coverage, clustered);
                finish(row, solve_exact(clustered));
            }
        }
        return rows;
    }

    // Entropy depends on (family, beta, layout, seed) but not on |N| or |S|;
    // memoized so ladder runs pay for it once.
    double cached_entropy(const Cell& cell, const GenerativeModel& model) {
        std::uint64_t key = std::hash<double>{}(cell.beta) ^ (cell.seed * 0x9e3779b97f4a7c15ull);
        {
            std::scoped_lock lock(entropy_mutex_);
            auto it = entropy_cache_.find(key);
            if (it != entropy_cache_.end()) return it->second;
        }
        double value = entropy_mmnl(model, config_.n_tilde, cell.seed);
        std::scoped_lock lock(entropy_mutex_);
        entropy_cache_.emplace(key, value);
        return value;
    }

    const ExperimentConfig& config_;
    std::ostream* log_;
    mutable std::mutex log_mutex_;
    std::mutex entropy_mutex_;
    std::map<std::uint64_t, double> entropy_cache_;
};

}  // namespace

std::string rows_to_csv(const std::vector<ExperimentRow>& rows, bool report_times) {
    std::ostringstream out;
    out << "family,beta,alpha,r,n,s,seed,method,time_ms,objective,rgap_pct,"
           "rgen_gap_pct,entropy,size_reduction_pct,optimal_flag\n";
    for (const ExperimentRow& row : rows) {
        out << row.family << ',' << opt_fmt(row.beta) << ',' << opt_fmt(row.alpha) << ','
            << row.budget << ',' << row.n_customers << ','
            << (row.scenarios ? std::to_string(*row.scenarios) : std::string{}) << ','
            << row.seed << ',' << row.method << ','
            << (report_times ? fmt(row.time_ms, "%.3f") : std::string("0")) << ','
            << opt_fmt(row.objective) << ',' << opt_fmt(row.rgap_pct) << ','
            << opt_fmt(row.rgen_gap_pct) << ',' << opt_fmt(row.entropy) << ','
            << opt_fmt(row.size_reduction_pct) << ',' << (row.optimal ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string summary_to_csv(const std::vector<ExperimentRow>& rows, bool report_times) {
    struct Aggregate {
        int count = 0;
        double time_ms = 0.0;
        double objective = 0.0;
        int objective_n = 0;
        double rgap = 0.0;
        int rgap_n = 0;
        double rgen = 0.0;
        int rgen_n = 0;
        double entropy = 0.0;
        int entropy_n = 0;
        double reduction = 0.0;
        int reduction_n = 0;
        int optimal = 0;
    };
    std::map<std::string, Aggregate> cells;
    for (const ExperimentRow& row : rows) {
        std::ostringstream key;
        key << row.family << ',' << opt_fmt(row.beta) << ',' << opt_fmt(row.alpha) << ','
            << row.budget << ',' << row.n_customers << ','
            << (row.scenarios ? std::to_string(*row.scenarios) : std::string{}) << ','
            << row.method;
        Aggregate& agg = cells[key.str()];
        ++agg.count;
        agg.time_ms += row.time_ms;
        if (row.objective) agg.objective += *row.objective, ++agg.objective_n;
        if (row.rgap_pct) agg.rgap += *row.rgap_pct, ++agg.rgap_n;
        if (row.rgen_gap_pct) agg.rgen += *row.rgen_gap_pct, ++agg.rgen_n;
        if (row.entropy) agg.entropy += *row.entropy, ++agg.entropy_n;
        if (row.size_reduction_pct) agg.reduction += *row.size_reduction_pct, ++agg.reduction_n;
        if (row.optimal) ++agg.optimal;
    }

    std::ostringstream out;
    out << "family,beta,alpha,r,n,s,method,seeds,time_ms,objective,rgap_pct,"
           "rgen_gap_pct,entropy,size_reduction_pct,optimal_frac\n";
    auto mean = [](double total, int n) {
        return n > 0 ? std::optional<double>(total / n) : std::nullopt;
    };
    for (const auto& [key, agg] : cells) {
        out << key << ',' << agg.count << ','
            << (report_times ? fmt(agg.time_ms / agg.count, "%.3f") : std::string("0")) << ','
            << opt_fmt(mean(agg.objective, agg.objective_n)) << ','
            << opt_fmt(mean(agg.rgap, agg.rgap_n)) << ','
            << opt_fmt(mean(agg.rgen, agg.rgen_n)) << ','
            << opt_fmt(mean(agg.entropy, agg.entropy_n)) << ','
            << opt_fmt(mean(agg.reduction, agg.reduction_n)) << ','
            << fmt(static_cast<double>(agg.optimal) / agg.count, "%.3f") << '\n';
    }
    return out.str();
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream* log) {
    Runner runner(config, log);
    ExperimentResult result;
    result.rows = runner.run();
    for (const ExperimentRow& row : result.rows) {
        result.any_flagged = result.any_flagged || row.flagged;
    }

    result.rows_path = config.output + ".csv";
    result.summary_path = config.output + "_summary.csv";
    std::ofstream rows_file(result.rows_path, std::ios::binary);
    if (!rows_file) throw std::runtime_error("cannot write " + result.rows_path);
    rows_file << rows_to_csv(result.rows, config.report_times);
    std::ofstream summary_file(result.summary_path, std::ios::binary);
    if (!summary_file) throw std::runtime_error("cannot write " + result.summary_path);
    summary_file << summary_to_csv(result.rows, config.report_times);
    return result;
}

}  // namespace maxcap
