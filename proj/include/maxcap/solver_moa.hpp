#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "maxcap/types.hpp"

namespace maxcap {

/// A block of customers with cached per-customer terms: exp-utilities over
/// the candidates and the competitor mass, both scaled by the customer's max
/// utility so that every ratio stays in range (the scaling cancels exactly).
struct CustomerGroup {
    std::vector<int> members;
    std::vector<double> weight;     // q_n
    std::vector<double> comp_mass;  // scaled sum of competitor exp-utilities
    std::vector<double> exp_util;   // |members| x |D|, row-major, scaled
    int n_candidates = 0;
};

/// Subgradient cut for one group: phi_t >= coefficients . x + intercept.
struct Cut {
    int group = 0;
    std::vector<double> coefficients;
    double intercept = 0.0;
};

struct MoaIteration {
    int iteration = 0;
    double master_value = 0.0;     // lower bound on the minimum
    double incumbent_value = 0.0;  // best true value seen (minimization form)
    double gap = 0.0;
};

struct MoaConfig {
    int n_groups = 0;  // 0 = one group per customer (pure multicut)
    double tolerance = 1e-6;
    int max_iterations = 500;
    std::vector<MoaIteration>* trace = nullptr;  // optional per-iteration log
};

/// Contiguous index blocks whose sizes differ by at most one.
std::vector<std::pair<int, int>> partition_ranges(int n_customers, int n_groups);

/// Splits customers into contiguous equal-size groups with cached terms.
std::vector<CustomerGroup> partition(const ChoiceInstance& instance, int n_groups);

/// Group objective in minimization form at a relaxed point x in [0,1]^|D|:
/// minus the captured share of the group's customers.
double group_value(const CustomerGroup& group, std::span<const double> x);

/// Value plus gradient; both are smooth in x and convex per coordinate.
std::pair<double, std::vector<double>> group_value_grad(const CustomerGroup& group,
                                                        std::span<const double> x);

/// Constant lower bound on the group objective: its value with every
/// candidate open (the objective is componentwise nonincreasing).
double group_lower_bound(const CustomerGroup& group);

struct MasterResult {
    DecisionVector decision;
    std::vector<double> phi;  // per-group epigraph value at the optimum
    double value = 0.0;
    std::int64_t nodes = 0;
};

/// Exact minimizer of sum_t max(L_t, best cut of t) over decisions opening
/// exactly `budget` candidates. Branch-and-bound with per-cut suffix tables;
/// among optima returns the lex-smallest decision. A feasible `hint` primes
/// the incumbent value (not the decision) and only speeds up the search.
MasterResult solve_master(std::span<const Cut> cuts, std::span<const double> lower_bounds,
                          int n_candidates, int budget,
                          const DecisionVector* hint = nullptr);

/// Multicut outer approximation: alternately solves the cut-based master
/// problem and adds one subgradient cut per group at the master solution,
/// until the master bound meets the best evaluated decision within
/// `tolerance`. Returns the incumbent with its exact capture objective.
Solution moa_solve(const ChoiceInstance& instance, const MoaConfig& config = {});

}  // namespace maxcap
