#include "maxcap/solver_moa.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "maxcap/model.hpp"

namespace maxcap {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t hash_bytes(const void* data, std::size_t size, std::uint64_t h) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::vector<double> to_real(const DecisionVector& x) {
    std::vector<double> real(static_cast<std::size_t>(x.size()), 0.0);
    for (int c : x.open_indices()) real[c] = 1.0;
    return real;
}

}  // namespace

std::vector<std::pair<int, int>> partition_ranges(int n_customers, int n_groups) {
    if (n_groups < 1 || n_groups > n_customers)
        throw std::invalid_argument("partition: group count must lie in [1, |N|]");
    std::vector<std::pair<int, int>> ranges;
    ranges.reserve(static_cast<std::size_t>(n_groups));
    const int base = n_customers / n_groups;
    const int extra = n_customers % n_groups;
    int begin = 0;
    for (int t = 0; t < n_groups; ++t) {
        int size = base + (t < extra ? 1 : 0);
        ranges.emplace_back(begin, begin + size);
        begin += size;
    }
    return ranges;
}

std::vector<CustomerGroup> partition(const ChoiceInstance& instance, int n_groups) {
    const int d = instance.n_candidates();
    const int e = instance.n_competitors();
    std::vector<CustomerGroup> groups;
    for (auto [begin, end] : partition_ranges(instance.n_customers(), n_groups)) {
        CustomerGroup group;
        group.n_candidates = d;
        group.members.reserve(static_cast<std::size_t>(end - begin));
        group.exp_util.reserve(static_cast<std::size_t>(end - begin) * d);
        for (int n = begin; n < end; ++n) {
            group.members.push_back(n);
            group.weight.push_back(instance.weights[n]);
            double vmax = -kInf;
            for (int c = 0; c < d + e; ++c) vmax = std::max(vmax, instance.utility(n, c));
            for (int c = 0; c < d; ++c) {
                group.exp_util.push_back(std::exp(instance.utility(n, c) - vmax));
            }
            double w = 0.0;
            for (int k = 0; k < e; ++k) w += std::exp(instance.utility(n, d + k) - vmax);
            group.comp_mass.push_back(w);
        }
        groups.push_back(std::move(group));
    }
    return groups;
}

double group_value(const CustomerGroup& group, std::span<const double> x) {
    const int d = group.n_candidates;
    double value = 0.0;
    for (std::size_t i = 0; i < group.members.size(); ++i) {
        const double* row = group.exp_util.data() + i * d;
        double s = 0.0;
        for (int c = 0; c < d; ++c) s += row[c] * x[c];
        double denom = s + group.comp_mass[i];
        if (denom == 0.0) continue;
        value -= group.weight[i] * s / denom;
    }
    return value;
}

std::pair<double, std::vector<double>> group_value_grad(const CustomerGroup& group,
                                                        std::span<const double> x) {
    const int d = group.n_candidates;
    double value = 0.0;
    std::vector<double> grad(static_cast<std::size_t>(d), 0.0);
    for (std::size_t i = 0; i < group.members.size(); ++i) {
        const double* row = group.exp_util.data() + i * d;
        double s = 0.0;
        for (int c = 0; c < d; ++c) s += row[c] * x[c];
        const double w = group.comp_mass[i];
        const double denom = s + w;
        if (denom == 0.0) continue;
        value -= group.weight[i] * s / denom;
        const double factor = group.weight[i] * w / (denom * denom);
        for (int c = 0; c < d; ++c) grad[c] -= factor * row[c];
    }
    return {value, std::move(grad)};
}

double group_lower_bound(const CustomerGroup& group) {
    std::vector<double> ones(static_cast<std::size_t>(group.n_candidates), 1.0);
    return group_value(group, ones);
}

namespace {

// Branch-and-bound for the master problem. Columns are fixed in index order
// (open before closed), so decisions are reached in ascending lexicographic
// order and the first incumbent at the final value is the lex-smallest
// minimizer.
//
// Two admissible bounds per node, cheap one first:
//  - aggregate bound: pick the k-th cut of every group (constant L_t where a
//    group has none); their sum is a single affine underestimator of the
//    whole objective whose exact minimum over completions comes from one
//    suffix table. One aggregate per cut round.
//  - per-cut bound: replace every cut by its own best completion,
//    intercept + fixed part + (sum of the `slots` smallest coefficients in
//    the free suffix). Tighter deep in the tree, costs O(#cuts).
class MasterSearch {
public:
    MasterSearch(std::span<const Cut> cuts, std::span<const double> lower_bounds,
                 int n_cols, int budget)
        : n_cols_(n_cols),
          budget_(budget),
          n_groups_(static_cast<int>(lower_bounds.size())),
          lower_bounds_(lower_bounds.begin(), lower_bounds.end()),
          n_cuts_(static_cast<int>(cuts.size())) {
        cut_group_.resize(cuts.size());
        cut_intercept_.resize(cuts.size());
        cut_fixed_.assign(cuts.size(), 0.0);
        coeff_by_col_.assign(static_cast<std::size_t>(n_cols_) * cuts.size(), 0.0);
        const int tk = budget_ + 1;
        table_.assign(cuts.size() * static_cast<std::size_t>(n_cols_ + 1) * tk, 0.0);

        std::vector<std::vector<std::int32_t>> group_cuts(
            static_cast<std::size_t>(n_groups_));
        for (std::size_t i = 0; i < cuts.size(); ++i) {
            const Cut& cut = cuts[i];
            if (static_cast<int>(cut.coefficients.size()) != n_cols_)
                throw std::invalid_argument("solve_master: cut has wrong width");
            if (cut.group < 0 || cut.group >= n_groups_)
                throw std::invalid_argument("solve_master: cut group out of range");
            cut_group_[i] = cut.group;
            cut_intercept_[i] = cut.intercept;
            group_cuts[cut.group].push_back(static_cast<std::int32_t>(i));
            for (int c = 0; c < n_cols_; ++c) {
                coeff_by_col_[static_cast<std::size_t>(c) * cuts.size() + i] =
                    cut.coefficients[c];
            }
            build_suffix_table(cut.coefficients,
                               table_.data() + i * static_cast<std::size_t>(n_cols_ + 1) * tk);
        }
        group_best_.assign(static_cast<std::size_t>(n_groups_), 0.0);

        // Aggregates: round k sums every group's k-th cut.
        std::size_t rounds = 0;
        for (const auto& list : group_cuts) rounds = std::max(rounds, list.size());
        n_aggregates_ = static_cast<int>(rounds);
        agg_intercept_.assign(rounds, 0.0);
        agg_fixed_.assign(rounds, 0.0);
        agg_coeff_by_col_.assign(static_cast<std::size_t>(n_cols_) * rounds, 0.0);
        agg_table_.assign(rounds * static_cast<std::size_t>(n_cols_ + 1) * tk, 0.0);
        std::vector<double> agg_coeffs(static_cast<std::size_t>(n_cols_));
        for (std::size_t k = 0; k < rounds; ++k) {
            std::fill(agg_coeffs.begin(), agg_coeffs.end(), 0.0);
            double intercept = 0.0;
            for (int t = 0; t < n_groups_; ++t) {
                if (k < group_cuts[t].size()) {
                    const Cut& cut = cuts[group_cuts[t][k]];
                    intercept += cut.intercept;
                    for (int c = 0; c < n_cols_; ++c) agg_coeffs[c] += cut.coefficients[c];
                } else {
                    intercept += lower_bounds_[t];
                }
            }
            agg_intercept_[k] = intercept;
            for (int c = 0; c < n_cols_; ++c) {
                agg_coeff_by_col_[static_cast<std::size_t>(c) * rounds + k] = agg_coeffs[c];
            }
            build_suffix_table(agg_coeffs,
                               agg_table_.data() +
                                   k * static_cast<std::size_t>(n_cols_ + 1) * tk);
        }
    }

    // Prime the search with the model value of a known decision; the
    // decision itself must still be rediscovered in lexicographic order.
    void prime(const DecisionVector& hint) {
        if (hint.size() != n_cols_ || hint.popcount() != budget_) return;
        std::vector<double> fixed(static_cast<std::size_t>(n_cuts_), 0.0);
        for (int c : hint.open_indices()) {
            const double* col = coeff_by_col_.data() + static_cast<std::size_t>(c) * n_cuts_;
            for (int i = 0; i < n_cuts_; ++i) fixed[i] += col[i];
        }
        std::fill(group_best_.begin(), group_best_.end(), -kInf);
        for (int i = 0; i < n_cuts_; ++i) {
            double v = cut_intercept_[i] + fixed[i];
            if (v > group_best_[cut_group_[i]]) group_best_[cut_group_[i]] = v;
        }
        double total = 0.0;
        for (int t = 0; t < n_groups_; ++t)
            total += std::max(lower_bounds_[t], group_best_[t]);
        best_value_ = std::min(best_value_, total);
    }

    // Heuristic value primes: each aggregate's own minimizer, then a greedy
    // build on the exact model. Values only; pruning stays admissible and
    // the lex order still picks the incumbent decision.
    void prime_heuristics() {
        std::vector<int> order(static_cast<std::size_t>(n_cols_));
        for (int k = 0; k < n_aggregates_; ++k) {
            for (int c = 0; c < n_cols_; ++c) order[c] = c;
            std::nth_element(order.begin(), order.begin() + budget_ - 1, order.end(),
                             [&](int a, int b) {
                                 return agg_coeff_by_col_[static_cast<std::size_t>(a) *
                                                          n_aggregates_ + k] <
                                        agg_coeff_by_col_[static_cast<std::size_t>(b) *
                                                          n_aggregates_ + k];
                             });
            DecisionVector d(n_cols_);
            for (int i = 0; i < budget_; ++i) d.set(order[i]);
            prime(d);
        }

        if (n_cuts_ == 0) return;
        std::vector<bool> used(static_cast<std::size_t>(n_cols_), false);
        double final_value = 0.0;
        for (int round = 0; round < budget_; ++round) {
            int pick = -1;
            double pick_value = kInf;
            for (int c = 0; c < n_cols_; ++c) {
                if (used[c]) continue;
                double v = value_with_extra(c);
                if (v < pick_value) {
                    pick_value = v;
                    pick = c;
                }
            }
            used[pick] = true;
            include(pick);
            final_value = pick_value;
        }
        best_value_ = std::min(best_value_, final_value);
        for (int c = n_cols_ - 1; c >= 0; --c) {
            if (used[c]) exclude(c);
        }
    }

    MasterResult run() {
        current_ = DecisionVector(n_cols_);
        prime_heuristics();
        descend(0, budget_);

        MasterResult result;
        result.decision = incumbent_;
        result.value = best_value_;
        result.nodes = nodes_;
        result.phi.assign(static_cast<std::size_t>(n_groups_), 0.0);
        std::vector<double> fixed(static_cast<std::size_t>(n_cuts_), 0.0);
        for (int c : incumbent_.open_indices()) {
            const double* col = coeff_by_col_.data() + static_cast<std::size_t>(c) * n_cuts_;
            for (int i = 0; i < n_cuts_; ++i) fixed[i] += col[i];
        }
        for (int t = 0; t < n_groups_; ++t) result.phi[t] = lower_bounds_[t];
        for (int i = 0; i < n_cuts_; ++i) {
            result.phi[cut_group_[i]] =
                std::max(result.phi[cut_group_[i]], cut_intercept_[i] + fixed[i]);
        }
        return result;
    }

private:
    // table[d][k] = sum of the k smallest coefficients among columns
    // [d, n_cols), for k up to the budget. Built backwards with a sorted
    // window.
    void build_suffix_table(const std::vector<double>& coeffs, double* table) {
        const int tk = budget_ + 1;
        std::vector<double> smallest;  // ascending, at most `budget` entries
        for (int k = 0; k < tk; ++k) table[n_cols_ * tk + k] = 0.0;
        for (int d = n_cols_ - 1; d >= 0; --d) {
            double v = coeffs[d];
            auto pos = std::lower_bound(smallest.begin(), smallest.end(), v);
            smallest.insert(pos, v);
            if (static_cast<int>(smallest.size()) > budget_) smallest.pop_back();
            double acc = 0.0;
            double* row = table + static_cast<std::size_t>(d) * tk;
            row[0] = 0.0;
            for (int k = 1; k < tk; ++k) {
                if (k - 1 < static_cast<int>(smallest.size())) acc += smallest[k - 1];
                row[k] = acc;
            }
        }
    }

    // Bound at a node where columns [0, depth) are fixed and `slots` more
    // must be opened among [depth, n_cols).
    double node_bound(int depth, int slots) {
        const int tk = budget_ + 1;
        std::fill(group_best_.begin(), group_best_.end(), -kInf);
        const std::size_t stride = static_cast<std::size_t>(n_cols_ + 1) * tk;
        for (int i = 0; i < n_cuts_; ++i) {
            double v = cut_intercept_[i] + cut_fixed_[i] +
                       table_[i * stride + static_cast<std::size_t>(depth) * tk + slots];
            if (v > group_best_[cut_group_[i]]) group_best_[cut_group_[i]] = v;
        }
        double total = 0.0;
        for (int t = 0; t < n_groups_; ++t) {
            total += std::max(lower_bounds_[t], group_best_[t]);
        }
        return total;
    }

    double aggregate_bound(int depth, int slots) {
        const int tk = budget_ + 1;
        const std::size_t stride = static_cast<std::size_t>(n_cols_ + 1) * tk;
        double best = -kInf;
        for (int k = 0; k < n_aggregates_; ++k) {
            double v = agg_intercept_[k] + agg_fixed_[k] +
                       agg_table_[k * stride + static_cast<std::size_t>(depth) * tk + slots];
            best = std::max(best, v);
        }
        return best;
    }

    // Exact model value when column `extra` joins the currently included
    // set. Used by the greedy prime.
    double value_with_extra(int extra) {
        const double* col =
            coeff_by_col_.data() + static_cast<std::size_t>(extra) * n_cuts_;
        std::fill(group_best_.begin(), group_best_.end(), -kInf);
        for (int i = 0; i < n_cuts_; ++i) {
            double v = cut_intercept_[i] + cut_fixed_[i] + col[i];
            if (v > group_best_[cut_group_[i]]) group_best_[cut_group_[i]] = v;
        }
        double total = 0.0;
        for (int t = 0; t < n_groups_; ++t)
            total += std::max(lower_bounds_[t], group_best_[t]);
        return total;
    }

    // True when the expensive per-cut bound cuts the node off. Terms are
    // all nonpositive, so the partial sum only falls; once it drops below
    // the incumbent no prune is possible and the loop bails out.
    bool per_cut_bound_prunes(int depth, int slots) {
        const int tk = budget_ + 1;
        std::fill(group_best_.begin(), group_best_.end(), -kInf);
        const std::size_t stride = static_cast<std::size_t>(n_cols_ + 1) * tk;
        for (int i = 0; i < n_cuts_; ++i) {
            double v = cut_intercept_[i] + cut_fixed_[i] +
                       table_[i * stride + static_cast<std::size_t>(depth) * tk + slots];
            if (v > group_best_[cut_group_[i]]) group_best_[cut_group_[i]] = v;
        }
        double total = 0.0;
        for (int t = 0; t < n_groups_; ++t) {
            total += std::max(lower_bounds_[t], group_best_[t]);
            if (total < best_value_) return false;
        }
        return cut_off(total);
    }

    void include(int c) {
        const double* col = coeff_by_col_.data() + static_cast<std::size_t>(c) * n_cuts_;
        for (int i = 0; i < n_cuts_; ++i) cut_fixed_[i] += col[i];
        const double* agg =
            agg_coeff_by_col_.data() + static_cast<std::size_t>(c) * n_aggregates_;
        for (int k = 0; k < n_aggregates_; ++k) agg_fixed_[k] += agg[k];
    }
    void exclude(int c) {
        const double* col = coeff_by_col_.data() + static_cast<std::size_t>(c) * n_cuts_;
        for (int i = 0; i < n_cuts_; ++i) cut_fixed_[i] -= col[i];
        const double* agg =
            agg_coeff_by_col_.data() + static_cast<std::size_t>(c) * n_aggregates_;
        for (int k = 0; k < n_aggregates_; ++k) agg_fixed_[k] -= agg[k];
    }

    bool cut_off(double bound) const {
        return bound > best_value_ || (bound == best_value_ && has_incumbent_);
    }

    void descend(int depth, int slots) {
        ++nodes_;
        if (n_cols_ - depth < slots) return;
        if (slots == 0) {
            // Exact value: with nothing left to open, every cut's best
            // completion is the cut itself.
            double value = node_bound(depth, 0);
            if (value < best_value_ || (value == best_value_ && !has_incumbent_)) {
                best_value_ = value;
                incumbent_ = current_;
                has_incumbent_ = true;
            }
            return;
        }
        if (n_aggregates_ > 0 && cut_off(aggregate_bound(depth, slots))) return;
        if (per_cut_bound_prunes(depth, slots)) return;

        include(depth);
        current_.set(depth);
        descend(depth + 1, slots - 1);
        current_.set(depth, false);
        exclude(depth);

        if (n_cols_ - depth - 1 >= slots) descend(depth + 1, slots);
    }

    int n_cols_;
    int budget_;
    int n_groups_;
    std::vector<double> lower_bounds_;
    int n_cuts_;

    std::vector<int> cut_group_;
    std::vector<double> cut_intercept_;
    std::vector<double> cut_fixed_;
    std::vector<double> coeff_by_col_;  // column-major: [col][cut]
    std::vector<double> table_;         // per cut: (n_cols+1) x (budget+1)
    std::vector<double> group_best_;

    int n_aggregates_ = 0;
    std::vector<double> agg_intercept_;
    std::vector<double> agg_fixed_;
    std::vector<double> agg_coeff_by_col_;  // column-major: [col][aggregate]
    std::vector<double> agg_table_;

    DecisionVector current_;
    DecisionVector incumbent_;
    double best_value_ = kInf;
    bool has_incumbent_ = false;
    std::int64_t nodes_ = 0;
};

}  // namespace

MasterResult solve_master(std::span<const Cut> cuts, std::span<const double> lower_bounds,
                          int n_candidates, int budget, const DecisionVector* hint) {
    if (budget < 1 || budget > n_candidates)
        throw std::invalid_argument("solve_master: budget must lie in [1, |D|]");
    if (lower_bounds.empty())
        throw std::invalid_argument("solve_master: need at least one group bound");
    MasterSearch search(cuts, lower_bounds, n_candidates, budget);
    if (hint) search.prime(*hint);
    return search.run();
}

Solution moa_solve(const ChoiceInstance& instance, const MoaConfig& config) {
    const int d = instance.n_candidates();
    const int r = instance.budget;
    if (r < 1 || r > d) throw std::invalid_argument("moa_solve: invalid budget");
    const int n = instance.n_customers();
    const int n_groups = config.n_groups > 0 ? std::min(config.n_groups, n) : n;

    auto start = Clock::now();
    std::vector<CustomerGroup> groups = partition(instance, n_groups);
    std::vector<double> lower_bounds(groups.size());
    for (std::size_t t = 0; t < groups.size(); ++t) {
        lower_bounds[t] = group_lower_bound(groups[t]);
    }

    DecisionVector x(d);
    for (int c = 0; c < r; ++c) x.set(c);

    std::vector<Cut> cuts;
    std::unordered_set<std::uint64_t> cut_hashes;
    auto add_cut = [&](Cut cut) {
        std::uint64_t h = hash_bytes(cut.coefficients.data(),
                                     cut.coefficients.size() * sizeof(double),
                                     0xcbf29ce484222325ull ^ cut.group);
        h = hash_bytes(&cut.intercept, sizeof(double), h);
        if (!cut_hashes.insert(h).second) {
            // Possible duplicate: confirm by exact comparison before skipping.
            for (const Cut& existing : cuts) {
                if (existing.group == cut.group && existing.intercept == cut.intercept &&
                    existing.coefficients == cut.coefficients) {
                    return false;
                }
            }
        }
        cuts.push_back(std::move(cut));
        return true;
    };

    double best_g = kInf;
    DecisionVector best_x;
    bool converged = false;
    int iterations = 0;

    for (int iter = 1; iter <= config.max_iterations; ++iter) {
        iterations = iter;
        std::vector<double> x_real = to_real(x);
        double g_total = 0.0;
        bool added_any = false;
        for (std::size_t t = 0; t < groups.size(); ++t) {
            auto [value, grad] = group_value_grad(groups[t], x_real);
            g_total += value;
            double intercept = value;
            for (int c = 0; c < d; ++c) intercept -= grad[c] * x_real[c];
            added_any |= add_cut(Cut{static_cast<int>(t), std::move(grad), intercept});
        }
        if (g_total < best_g) {
            best_g = g_total;
            best_x = x;
        }

        MasterResult master = solve_master(cuts, lower_bounds, d, r, &best_x);
        double gap = best_g - master.value;
        if (config.trace) {
            config.trace->push_back(MoaIteration{iter, master.value, best_g, gap});
        }
        if (gap <= config.tolerance) {
            converged = true;
            break;
        }
        if (!added_any) {
            // Every cut at this iterate already exists, so the master cannot
            // move; report convergence only if the gap actually closed.
            converged = gap <= config.tolerance;
            break;
        }
        x = master.decision;
    }

    Solution solution;
    solution.decision = best_x;
    solution.objective = objective_mnl(instance, best_x);
    solution.method = Method::MOA;
    solution.iterations = iterations;
    solution.optimal = converged;
    solution.wall_time = Clock::now() - start;
    return solution;
}

}  // namespace maxcap
