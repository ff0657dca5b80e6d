#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "maxcap/generators.hpp"
#include "maxcap/types.hpp"

namespace maxcap {

enum class EntropyVariant { MnlExact, MmnlMonteCarlo };

/// Expected conditional choice entropy among the candidate locations, in
/// nats. Lies in [0, ln |D|]; low values mean customer behavior is nearly
/// determined by observable attributes.
struct EntropyReport {
    double expected_entropy = 0.0;
    EntropyVariant variant = EntropyVariant::MnlExact;
    std::int64_t sample_size = 0;
    std::optional<double> capture_entropy;  // binary captured-vs-lost entropy
};

/// Out-of-sample estimate of a decision's market share.
struct ZEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t sample_size = 0;
};

struct GapReport {
    double rgap_pct = 0.0;
    double rgen_gap_pct = 0.0;
    double z_insample = 0.0;
    double z_estimate = 0.0;
    double size_reduction_pct = 0.0;
    std::int64_t eval_sample_size = 0;
};

/// Exact expected entropy of the candidate choice for a finite-support
/// instance: average over customers of the entropy of the softmax over the
/// candidate block only.
double entropy_mnl(const ChoiceInstance& instance);

/// Monte-Carlo estimate of the same quantity for a generative model,
/// averaging per-draw entropies over n_tilde sampled customers.
double entropy_mmnl(const GenerativeModel& model, std::int64_t n_tilde,
                    std::uint64_t seed);

/// Expected binary entropy of "the best alternative is one of ours" with
/// every candidate open, the coarser randomness measure: zero when capture
/// is certain either way, ln 2 when it is a coin flip.
double capture_entropy(const ChoiceInstance& instance);
double capture_entropy(const GenerativeModel& model, std::int64_t n_tilde,
                       std::uint64_t seed);

/// Relative optimality gap, in percent, of decision x against an exact
/// optimum of the same instance: 100 * (Z* - Z(x)) / Z*. Throws when the
/// exact optimum has value zero.
double rgap(const ChoiceInstance& instance, const DecisionVector& x,
            const Solution& exact_optimum);

/// Market share of x on a fresh sample of n_tilde customers, with its
/// standard error. A fixed seed pins the sample, so every decision compared
/// under the same seed is scored against the same customers.
ZEstimate estimate_Z(const GenerativeModel& model, const DecisionVector& x,
                     std::int64_t n_tilde, std::uint64_t seed);

/// One pass over the sample scoring many decisions at once.
std::vector<ZEstimate> estimate_Z_batch(const GenerativeModel& model,
                                        std::span<const DecisionVector> decisions,
                                        std::int64_t n_tilde, std::uint64_t seed);

/// Relative generalization gap, in percent: how much the in-sample value
/// overstates the estimated true value. Throws on nonpositive in-sample
/// values.
double rgen_gap(double in_sample_value, double z_estimate);

}  // namespace maxcap
