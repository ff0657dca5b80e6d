#pragma once

#include <span>
#include <vector>

#include "maxcap/types.hpp"

namespace maxcap {

/// Sum of exp(utility) over the competitor block for customer n. This is the
/// decision-independent denominator term of the capture probability.
double competitor_mass(const ChoiceInstance& instance, int n);

/// Softmax choice probabilities over an arbitrary finite choice set.
/// Max-subtraction keeps the computation finite for |utility| up to several
/// hundred. Throws std::invalid_argument on an empty input.
std::vector<double> mnl_probabilities(std::span<const double> utilities);

/// Probability that customer n picks one of the open candidates of x rather
/// than any competitor. Zero when nothing is open; one when there are open
/// candidates and no competition.
double capture_probability(const ChoiceInstance& instance, int n,
                           const DecisionVector& x);

/// Expected captured market share of decision x: sum over customers of
/// q_n * capture_probability(n, x). Throws when x is infeasible (wrong
/// length or more than `budget` open candidates).
double objective_mnl(const ChoiceInstance& instance, const DecisionVector& x);

}  // namespace maxcap
