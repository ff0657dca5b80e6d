#include "maxcap/solver_binary.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "maxcap/model.hpp"

namespace maxcap {

namespace {

using Clock = std::chrono::steady_clock;

// C(n, k), clamped at cap + 1.
std::int64_t choose_clamped(int n, int k, std::int64_t cap) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::int64_t c = 1;
    for (int i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i;
        if (c > cap) return cap + 1;
    }
    return c;
}

constexpr std::int64_t kEnumerationBudget = 1'000'000;

std::vector<std::vector<std::int32_t>> columns_of(const BitMatrix& rows) {
    std::vector<std::vector<std::int32_t>> columns(static_cast<std::size_t>(rows.cols()));
    for (std::int64_t r = 0; r < rows.rows(); ++r) {
        std::span<const std::uint64_t> row = rows.row(r);
        for (int w = 0; w < rows.words_per_row(); ++w) {
            std::uint64_t word = row[w];
            while (word != 0) {
                int bit = std::countr_zero(word);
                word &= word - 1;
                columns[w * 64 + bit].push_back(static_cast<std::int32_t>(r));
            }
        }
    }
    return columns;
}

bool intersects(std::span<const std::uint64_t> row, const std::vector<std::uint64_t>& x) {
    for (std::size_t w = 0; w < row.size(); ++w) {
        if (row[w] & x[w]) return true;
    }
    return false;
}

// Branch-and-bound / enumeration engine over weighted profile rows. Mass is
// std::int64_t when every row weighs the same (exact count arithmetic, the
// default for generated problems) and double otherwise.
//
// Columns are fixed in index order, "open" tried before "closed", so
// complete decisions appear in ascending lexicographic order of their
// open-index lists. Incumbents only ever improve strictly (or fill an empty
// slot), hence the first incumbent at the optimal value is the lex-smallest
// optimum and no explicit tie comparison is needed.
template <typename Mass>
class CoverSearch {
public:
    static constexpr bool exact_mass = std::is_integral_v<Mass>;

    CoverSearch(int n_cols, int budget, std::vector<std::vector<std::int32_t>> columns,
                std::vector<Mass> mass, double denom, const SolverConfig& config)
        : n_cols_(n_cols),
          budget_(budget),
          columns_(std::move(columns)),
          mass_(std::move(mass)),
          denom_(denom),
          config_(config),
          cover_count_(mass_.size(), 0),
          stamp_(mass_.size(), 0) {}

    Solution run(Method method) {
        auto start = Clock::now();
        deadline_ = start + std::chrono::duration_cast<Clock::duration>(
                                std::min(config_.time_limit,
                                         std::chrono::duration<double>(3.15e8)));
        current_ = DecisionVector(n_cols_);
        fallback_ = first_feasible();
        if (config_.mode == SolverConfig::Mode::BranchAndBound) prime_greedy();
        descend(0, budget_);

        Solution solution;
        solution.method = method;
        solution.optimal = !aborted_;
        solution.iterations = nodes_;
        solution.decision = has_incumbent_ ? incumbent_ : fallback_;
        solution.objective = fraction(value_of(solution.decision));
        solution.wall_time = Clock::now() - start;
        return solution;
    }

    double partial_bound(const DecisionVector& fixed_in, const DecisionVector& fixed_out) {
        for (int c = 0; c < n_cols_; ++c) {
            if (fixed_in.test(c)) include(c);
        }
        int slots = budget_ - fixed_in.popcount();
        std::vector<int> free_cols;
        for (int c = 0; c < n_cols_; ++c) {
            if (!fixed_in.test(c) && !fixed_out.test(c)) free_cols.push_back(c);
        }
        Mass bound = covered_ + residual_bound(free_cols, slots);
        for (int c = n_cols_ - 1; c >= 0; --c) {
            if (fixed_in.test(c)) exclude(c);
        }
        return fraction(bound);
    }

private:
    void include(int c) {
        Mass gained{0};
        for (std::int32_t p : columns_[c]) {
            if (cover_count_[p]++ == 0) gained += mass_[p];
        }
        covered_ += gained;
    }

    void exclude(int c) {
        Mass lost{0};
        for (std::int32_t p : columns_[c]) {
            if (--cover_count_[p] == 0) lost += mass_[p];
        }
        covered_ -= lost;
    }

    // min(sum of top-`slots` residual gains, residual coverable mass) over
    // the given free columns. The union cap keeps the bound tight when
    // columns overlap heavily.
    Mass residual_bound(const std::vector<int>& free_cols, int slots) {
        if (slots <= 0) return Mass{0};
        ++epoch_;
        gains_.clear();
        Mass reachable{0};
        for (int c : free_cols) {
            Mass gain{0};
            for (std::int32_t p : columns_[c]) {
                if (cover_count_[p] != 0) continue;
                gain += mass_[p];
                if (stamp_[p] != epoch_) {
                    stamp_[p] = epoch_;
                    reachable += mass_[p];
                }
            }
            if (gain > Mass{0}) gains_.push_back(gain);
        }
        if (static_cast<int>(gains_.size()) > slots) {
            std::nth_element(gains_.begin(), gains_.begin() + slots, gains_.end(),
                             std::greater<>());
            gains_.resize(static_cast<std::size_t>(slots));
        }
        Mass top{0};
        for (Mass g : gains_) top += g;
        return std::min(top, reachable);
    }

    void prime_greedy() {
        std::vector<bool> used(static_cast<std::size_t>(n_cols_), false);
        DecisionVector greedy(n_cols_);
        for (int round = 0; round < budget_; ++round) {
            int pick = -1;
            Mass pick_gain{0};
            for (int c = 0; c < n_cols_; ++c) {
                if (used[c]) continue;
                Mass gain{0};
                for (std::int32_t p : columns_[c]) {
                    if (cover_count_[p] == 0) gain += mass_[p];
                }
                if (pick < 0 || gain > pick_gain) {
                    pick = c;
                    pick_gain = gain;
                }
            }
            used[pick] = true;
            greedy.set(pick);
            include(pick);
        }
        // Value only: the incumbent decision must still be discovered in
        // lexicographic order, otherwise ties would not break correctly.
        best_value_ = covered_;
        fallback_ = greedy;
        for (int c = n_cols_ - 1; c >= 0; --c) {
            if (greedy.test(c)) exclude(c);
        }
    }

    DecisionVector first_feasible() const {
        DecisionVector d(n_cols_);
        for (int c = 0; c < budget_; ++c) d.set(c);
        return d;
    }

    // Canonical value: mass of covered profiles summed in profile order.
    Mass value_of(const DecisionVector& x) {
        ++epoch_;
        for (int c : x.open_indices()) {
            for (std::int32_t p : columns_[c]) stamp_[p] = epoch_;
        }
        Mass value{0};
        for (std::size_t p = 0; p < mass_.size(); ++p) {
            if (stamp_[p] == epoch_) value += mass_[p];
        }
        return value;
    }

    double fraction(Mass value) const {
        return denom_ > 0.0 ? static_cast<double>(value) / denom_ : 0.0;
    }

    // Completion = current_ plus `pad_count` columns starting at pad_from
    // (only ever the next free indices, which is the lex-smallest padding).
    void record_leaf(int pad_from, int pad_count) {
        DecisionVector candidate = current_;
        for (int i = 0; i < pad_count; ++i) candidate.set(pad_from + i);
        Mass value = exact_mass && pad_count == 0 ? covered_ : value_of(candidate);
        if (value > best_value_ || (value == best_value_ && !has_incumbent_)) {
            best_value_ = value;
            incumbent_ = std::move(candidate);
            has_incumbent_ = true;
        }
    }

    bool prune(Mass bound) const {
        if constexpr (exact_mass) {
            return bound < best_value_ || (bound == best_value_ && has_incumbent_);
        } else {
            // Floating masses drift by an ulp or two in the running sums;
            // only prune what is strictly worse by a safe margin.
            return bound < best_value_ - 1e-12 * (std::abs(best_value_) + 1.0);
        }
    }

    void descend(int depth, int slots) {
        if (aborted_) return;
        if (++nodes_ >= config_.node_limit) aborted_ = true;
        if ((nodes_ & 0x3ff) == 0 && Clock::now() > deadline_) aborted_ = true;

        if (slots == 0) {
            record_leaf(depth, 0);
            return;
        }
        if (n_cols_ - depth < slots) return;

        if (config_.mode == SolverConfig::Mode::BranchAndBound) {
            free_scratch_.clear();
            for (int c = depth; c < n_cols_; ++c) free_scratch_.push_back(c);
            Mass residual = residual_bound(free_scratch_, slots);
            if (prune(covered_ + residual)) return;
            if (residual == Mass{0}) {
                record_leaf(depth, slots);
                return;
            }
        }

        include(depth);
        current_.set(depth);
        descend(depth + 1, slots - 1);
        current_.set(depth, false);
        exclude(depth);

        if (n_cols_ - depth - 1 >= slots) descend(depth + 1, slots);
    }

    int n_cols_;
    int budget_;
    std::vector<std::vector<std::int32_t>> columns_;
    std::vector<Mass> mass_;
    double denom_;
    SolverConfig config_;

    std::vector<std::int32_t> cover_count_;
    std::vector<std::uint64_t> stamp_;
    std::uint64_t epoch_ = 0;
    std::vector<Mass> gains_;
    std::vector<int> free_scratch_;
    Mass covered_{0};

    DecisionVector current_;
    DecisionVector incumbent_;
    DecisionVector fallback_;
    Mass best_value_{0};
    bool has_incumbent_ = false;
    bool aborted_ = false;
    std::int64_t nodes_ = 0;
    Clock::time_point deadline_;
};

void check_budget(int budget, int n_candidates, const char* what) {
    if (budget < 1 || budget > n_candidates)
        throw std::invalid_argument(std::string(what) + ": budget must lie in [1, |D|]");
}

Solution solve_clustered_impl(const ClusteredProblem& problem, const SolverConfig& config,
                              Method method) {
    check_budget(problem.budget, problem.n_candidates, "solve");
    auto columns = columns_of(problem.profiles);
    if (problem.uniform) {
        CoverSearch<std::int64_t> search(problem.n_candidates, problem.budget,
                                         std::move(columns), problem.counts,
                                         static_cast<double>(problem.total_rows), config);
        return search.run(method);
    }
    CoverSearch<double> search(problem.n_candidates, problem.budget, std::move(columns),
                               problem.masses, problem.total_mass, config);
    return search.run(method);
}

Solution solve_coverage_impl(const CoverageProblem& problem, const SolverConfig& config,
                             Method method) {
    check_budget(problem.budget, problem.n_candidates, "solve");
    auto columns = columns_of(problem.rows);
    if (problem.uniform()) {
        std::vector<std::int64_t> mass(static_cast<std::size_t>(problem.n_rows()), 1);
        CoverSearch<std::int64_t> search(problem.n_candidates, problem.budget,
                                         std::move(columns), std::move(mass),
                                         static_cast<double>(problem.n_rows()), config);
        return search.run(method);
    }
    double denom = 0.0;
    for (double w : problem.weights) denom += w;
    CoverSearch<double> search(problem.n_candidates, problem.budget, std::move(columns),
                               problem.weights, denom, config);
    return search.run(method);
}

}  // namespace

double covered_fraction(const ClusteredProblem& problem, const DecisionVector& x) {
    if (x.size() != problem.n_candidates)
        throw std::invalid_argument("covered_fraction: decision length mismatch");
    if (problem.uniform) {
        std::int64_t covered = 0;
        for (std::int64_t p = 0; p < problem.n_profiles(); ++p) {
            if (intersects(problem.profiles.row(p), x.words())) covered += problem.counts[p];
        }
        return static_cast<double>(covered) / static_cast<double>(problem.total_rows);
    }
    double covered = 0.0;
    for (std::int64_t p = 0; p < problem.n_profiles(); ++p) {
        if (intersects(problem.profiles.row(p), x.words())) covered += problem.masses[p];
    }
    return covered / problem.total_mass;
}

double covered_fraction(const CoverageProblem& problem, const DecisionVector& x) {
    if (x.size() != problem.n_candidates)
        throw std::invalid_argument("covered_fraction: decision length mismatch");
    if (problem.uniform()) {
        std::int64_t covered = 0;
        for (std::int64_t r = 0; r < problem.n_rows(); ++r) {
            if (intersects(problem.rows.row(r), x.words())) ++covered;
        }
        return static_cast<double>(covered) / static_cast<double>(problem.n_rows());
    }
    double covered = 0.0;
    double total = 0.0;
    for (std::int64_t r = 0; r < problem.n_rows(); ++r) {
        total += problem.weights[r];
        if (intersects(problem.rows.row(r), x.words())) covered += problem.weights[r];
    }
    return covered / total;
}

Solution solve_exact(const ClusteredProblem& problem, const SolverConfig& config) {
    return solve_clustered_impl(problem, config, Method::SBC);
}

Solution solve_coverage(const CoverageProblem& problem, const SolverConfig& config) {
    return solve_coverage_impl(problem, config, Method::SB);
}

Solution solve_bruteforce(const ClusteredProblem& problem) {
    if (choose_clamped(problem.n_candidates, problem.budget, kEnumerationBudget) >
        kEnumerationBudget)
        throw std::invalid_argument("solve_bruteforce: enumeration budget exceeded");
    SolverConfig config;
    config.mode = SolverConfig::Mode::Exhaustive;
    return solve_clustered_impl(problem, config, Method::BRUTE);
}

Solution solve_bruteforce_mnl(const ChoiceInstance& instance) {
    const int d = instance.n_candidates();
    const int r = instance.budget;
    check_budget(r, d, "solve_bruteforce_mnl");
    if (choose_clamped(d, r, kEnumerationBudget) > kEnumerationBudget)
        throw std::invalid_argument("solve_bruteforce_mnl: enumeration budget exceeded");

    auto start = Clock::now();
    std::vector<int> pick(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) pick[i] = i;

    Solution best;
    best.method = Method::BRUTE;
    best.objective = -1.0;
    std::int64_t visited = 0;
    while (true) {
        DecisionVector x(d);
        for (int i : pick) x.set(i);
        double value = objective_mnl(instance, x);
        ++visited;
        if (value > best.objective) {
            best.objective = value;
            best.decision = x;
        }
        // next r-combination in lexicographic order
        int i = r - 1;
        while (i >= 0 && pick[i] == d - r + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int j = i + 1; j < r; ++j) pick[j] = pick[j - 1] + 1;
    }
    best.iterations = visited;
    best.optimal = true;
    best.wall_time = Clock::now() - start;
    return best;
}

double upper_bound(const ClusteredProblem& problem, const PartialAssignment& partial) {
    check_budget(problem.budget, problem.n_candidates, "upper_bound");
    if (partial.fixed_in.size() != problem.n_candidates ||
        partial.fixed_out.size() != problem.n_candidates)
        throw std::invalid_argument("upper_bound: partial assignment length mismatch");
    for (std::size_t w = 0; w < partial.fixed_in.words().size(); ++w) {
        if (partial.fixed_in.words()[w] & partial.fixed_out.words()[w])
            throw std::invalid_argument("upper_bound: fixed-in and fixed-out overlap");
    }
    if (partial.fixed_in.popcount() > problem.budget)
        throw std::invalid_argument("upper_bound: partial exceeds the budget");

    auto columns = columns_of(problem.profiles);
    SolverConfig config;
    if (problem.uniform) {
        CoverSearch<std::int64_t> search(problem.n_candidates, problem.budget,
                                         std::move(columns), problem.counts,
                                         static_cast<double>(problem.total_rows), config);
        return search.partial_bound(partial.fixed_in, partial.fixed_out);
    }
    CoverSearch<double> search(problem.n_candidates, problem.budget, std::move(columns),
                               problem.masses, problem.total_mass, config);
    return search.partial_bound(partial.fixed_in, partial.fixed_out);
}

}  // namespace maxcap
