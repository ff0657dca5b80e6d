#pragma once

#include <chrono>
#include <cstdint>
#include <limits>

#include "maxcap/simulate.hpp"
#include "maxcap/types.hpp"

namespace maxcap {

struct SolverConfig {
    enum class Mode { BranchAndBound, Exhaustive };
    Mode mode = Mode::BranchAndBound;
    std::int64_t node_limit = std::numeric_limits<std::int64_t>::max();
    std::chrono::duration<double> time_limit{std::numeric_limits<double>::infinity()};
};

/// Candidate columns split into fixed-open / fixed-closed / free.
struct PartialAssignment {
    DecisionVector fixed_in;
    DecisionVector fixed_out;
};

/// Canonical objective of a decision: covered mass summed in profile order,
/// divided by the total market mass. Every solver reports objectives through
/// this one path so equal decisions always yield bit-equal objectives.
double covered_fraction(const ClusteredProblem& problem, const DecisionVector& x);
double covered_fraction(const CoverageProblem& problem, const DecisionVector& x);

/// Exact maximizer of the clustered 0-1 capture model. Opens exactly
/// `budget` candidates (coverage is monotone, so this loses nothing) and
/// among optima returns the lex-smallest decision. On node/time exhaustion
/// returns the best incumbent with optimal=false.
Solution solve_exact(const ClusteredProblem& problem, const SolverConfig& config = {});

/// Same optimization over the raw, unclustered rows.
Solution solve_coverage(const CoverageProblem& problem, const SolverConfig& config = {});

/// Exhaustive enumeration of all budget-sized candidate subsets; requires
/// C(|D|, r) <= 10^6. Shares the tie-breaking rule with solve_exact.
Solution solve_bruteforce(const ClusteredProblem& problem);

/// Exhaustive maximization of the finite-support MNL objective itself
/// (reference exact method for small instances; same enumeration budget).
Solution solve_bruteforce_mnl(const ChoiceInstance& instance);

/// Admissible bound for a partial assignment: mass already covered by
/// fixed-in columns, plus the cheaper of (a) the sum of the r' largest
/// residual column gains and (b) the total residual mass still coverable by
/// free columns. Never below the value of the best completion.
double upper_bound(const ClusteredProblem& problem, const PartialAssignment& partial);

}  // namespace maxcap
