#include "maxcap/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "maxcap/model.hpp"

namespace maxcap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Entropy of the softmax distribution of `utilities`, in nats, computed as
// log-sum-exp minus the mean scaled utility. 0 * log 0 reads as 0.
double softmax_entropy(std::span<const double> utilities) {
    double vmax = -kInf;
    for (double v : utilities) vmax = std::max(vmax, v);
    double total = 0.0;
    for (double v : utilities) total += std::exp(v - vmax);
    double entropy = 0.0;
    for (double v : utilities) {
        double p = std::exp(v - vmax) / total;
        if (p > 0.0) entropy -= p * std::log(p);
    }
    return entropy;
}

double binary_entropy(double p) {
    double h = 0.0;
    if (p > 0.0) h -= p * std::log(p);
    if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
    return h;
}

// Probability that the best alternative lies among the candidates when all
// of them are open, for one utility row (candidates first).
double capture_share(std::span<const double> utilities, int n_candidates) {
    double vmax = -kInf;
    for (double v : utilities) vmax = std::max(vmax, v);
    double own = 0.0, other = 0.0;
    for (int c = 0; c < static_cast<int>(utilities.size()); ++c) {
        double e = std::exp(utilities[c] - vmax);
        (c < n_candidates ? own : other) += e;
    }
    return own / (own + other);
}

}  // namespace

double entropy_mnl(const ChoiceInstance& instance) {
    const int d = instance.n_candidates();
    const int alt = instance.n_alternatives();
    double total = 0.0;
    for (int n = 0; n < instance.n_customers(); ++n) {
        std::span<const double> row{
            instance.utilities.data() + static_cast<std::size_t>(n) * alt,
            static_cast<std::size_t>(d)};
        total += softmax_entropy(row);
    }
    return total / instance.n_customers();
}

double entropy_mmnl(const GenerativeModel& model, std::int64_t n_tilde,
                    std::uint64_t seed) {
    if (n_tilde < 1) throw std::invalid_argument("entropy_mmnl: n_tilde must be >= 1");
    SplitMix64 rng = SplitMix64(seed).stream(rng_stream::entropy);
    const int d = model.n_candidates();
    std::vector<double> utilities(static_cast<std::size_t>(d));
    double total = 0.0;
    for (std::int64_t i = 0; i < n_tilde; ++i) {
        CustomerAttributes attr = model.sample_attributes(rng);
        for (int c = 0; c < d; ++c) {
            utilities[c] = model.utility(attr, model.candidates()[c]);
        }
        total += softmax_entropy(utilities);
    }
    return total / static_cast<double>(n_tilde);
}

double capture_entropy(const ChoiceInstance& instance) {
    const int alt = instance.n_alternatives();
    double total = 0.0;
    for (int n = 0; n < instance.n_customers(); ++n) {
        std::span<const double> row{
            instance.utilities.data() + static_cast<std::size_t>(n) * alt,
            static_cast<std::size_t>(alt)};
        total += instance.weights[n] * binary_entropy(capture_share(row, instance.n_candidates()));
    }
    return total;
}

double capture_entropy(const GenerativeModel& model, std::int64_t n_tilde,
                       std::uint64_t seed) {
    if (n_tilde < 1) throw std::invalid_argument("capture_entropy: n_tilde must be >= 1");
    SplitMix64 rng = SplitMix64(seed).stream(rng_stream::entropy);
    const int d = model.n_candidates();
    const int alt = d + model.n_competitors();
    std::vector<double> utilities(static_cast<std::size_t>(alt));
    double total = 0.0;
    for (std::int64_t i = 0; i < n_tilde; ++i) {
        CustomerAttributes attr = model.sample_attributes(rng);
        for (int c = 0; c < d; ++c) {
            utilities[c] = model.utility(attr, model.candidates()[c]);
        }
        for (int k = 0; k < model.n_competitors(); ++k) {
            utilities[d + k] = model.utility(attr, model.competitors()[k]);
        }
        total += binary_entropy(capture_share(utilities, d));
    }
    return total / static_cast<double>(n_tilde);
}

double rgap(const ChoiceInstance& instance, const DecisionVector& x,
            const Solution& exact_optimum) {
    double z_star = objective_mnl(instance, exact_optimum.decision);
    if (z_star <= 0.0)
        throw std::invalid_argument("rgap: reference optimum has zero value");
    double z = objective_mnl(instance, x);
    return 100.0 * (z_star - z) / z_star;
}

ZEstimate estimate_Z(const GenerativeModel& model, const DecisionVector& x,
                     std::int64_t n_tilde, std::uint64_t seed) {
    std::vector<DecisionVector> one{x};
    return estimate_Z_batch(model, one, n_tilde, seed).front();
}

std::vector<ZEstimate> estimate_Z_batch(const GenerativeModel& model,
                                        std::span<const DecisionVector> decisions,
                                        std::int64_t n_tilde, std::uint64_t seed) {
    if (n_tilde < 1) throw std::invalid_argument("estimate_Z: n_tilde must be >= 1");
    const int d = model.n_candidates();
    const int e = model.n_competitors();
    std::vector<std::vector<int>> open_lists;
    open_lists.reserve(decisions.size());
    for (const DecisionVector& x : decisions) {
        if (x.size() != d)
            throw std::invalid_argument("estimate_Z: decision length mismatch");
        open_lists.push_back(x.open_indices());
    }

    SplitMix64 rng = SplitMix64(seed).stream(rng_stream::evaluation);
    std::vector<double> sum(decisions.size(), 0.0);
    std::vector<double> sum_sq(decisions.size(), 0.0);
    for (std::int64_t i = 0; i < n_tilde; ++i) {
        CustomerAttributes attr = model.sample_attributes(rng);
        // Competitor part is shared across decisions: log-sum-exp once.
        double comp_max = -kInf;
        double comp_log = -kInf;
        if (e > 0) {
            std::vector<double> comp(static_cast<std::size_t>(e));
            for (int k = 0; k < e; ++k) {
                comp[k] = model.utility(attr, model.competitors()[k]);
                comp_max = std::max(comp_max, comp[k]);
            }
            double total = 0.0;
            for (double v : comp) total += std::exp(v - comp_max);
            comp_log = comp_max + std::log(total);
        }
        for (std::size_t j = 0; j < open_lists.size(); ++j) {
            double p = 0.0;
            if (!open_lists[j].empty()) {
                double own_max = -kInf;
                for (int c : open_lists[j]) {
                    own_max = std::max(own_max, model.utility(attr, model.candidates()[c]));
                }
                double own = 0.0;
                for (int c : open_lists[j]) {
                    own += std::exp(model.utility(attr, model.candidates()[c]) - own_max);
                }
                double own_log = own_max + std::log(own);
                p = comp_log == -kInf ? 1.0 : 1.0 / (1.0 + std::exp(comp_log - own_log));
            }
            sum[j] += p;
            sum_sq[j] += p * p;
        }
    }

    std::vector<ZEstimate> out(decisions.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
        double mean = sum[j] / static_cast<double>(n_tilde);
        double var = std::max(0.0, sum_sq[j] / static_cast<double>(n_tilde) - mean * mean);
        out[j].value = mean;
        out[j].std_error =
            n_tilde > 1 ? std::sqrt(var / static_cast<double>(n_tilde - 1)) : 0.0;
        out[j].sample_size = n_tilde;
    }
    return out;
}

double rgen_gap(double in_sample_value, double z_estimate) {
    if (!(in_sample_value > 0.0))
        throw std::invalid_argument("rgen_gap: in-sample value must be positive");
    return 100.0 * (in_sample_value - z_estimate) / in_sample_value;
}

}  // namespace maxcap
