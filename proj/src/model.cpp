#include "maxcap/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace maxcap {

double competitor_mass(const ChoiceInstance& instance, int n) {
    if (n < 0 || n >= instance.n_customers())
        throw std::out_of_range("customer index out of range");
    double mass = 0.0;
    const int d = instance.n_candidates();
    for (int k = 0; k < instance.n_competitors(); ++k) {
        mass += std::exp(instance.utility(n, d + k));
    }
    return mass;
}

std::vector<double> mnl_probabilities(std::span<const double> utilities) {
    if (utilities.empty())
        throw std::invalid_argument("mnl_probabilities: empty choice set");
    double vmax = -std::numeric_limits<double>::infinity();
    for (double v : utilities) vmax = std::max(vmax, v);
    std::vector<double> p(utilities.size());
    double total = 0.0;
    for (std::size_t i = 0; i < utilities.size(); ++i) {
        p[i] = std::exp(utilities[i] - vmax);
        total += p[i];
    }
    for (double& pi : p) pi /= total;
    return p;
}

double capture_probability(const ChoiceInstance& instance, int n,
                           const DecisionVector& x) {
    if (n < 0 || n >= instance.n_customers())
        throw std::out_of_range("customer index out of range");
    const int d = instance.n_candidates();
    const int e = instance.n_competitors();

    // Common max over open candidates and competitors keeps both exp sums in
    // range; the ratio is shift-invariant.
    double vmax = -std::numeric_limits<double>::infinity();
    bool any_open = false;
    for (int c = 0; c < d; ++c) {
        if (x.test(c)) {
            any_open = true;
            vmax = std::max(vmax, instance.utility(n, c));
        }
    }
    if (!any_open) return 0.0;
    for (int k = 0; k < e; ++k) vmax = std::max(vmax, instance.utility(n, d + k));

    double own = 0.0;
    for (int c = 0; c < d; ++c) {
        if (x.test(c)) own += std::exp(instance.utility(n, c) - vmax);
    }
    double other = 0.0;
    for (int k = 0; k < e; ++k) other += std::exp(instance.utility(n, d + k) - vmax);
    return own / (own + other);
}

double objective_mnl(const ChoiceInstance& instance, const DecisionVector& x) {
    if (x.size() != instance.n_candidates())
        throw std::invalid_argument("decision vector length does not match instance");
    if (x.popcount() > instance.budget)
        throw std::invalid_argument("decision opens more candidates than the budget allows");
    double share = 0.0;
    for (int n = 0; n < instance.n_customers(); ++n) {
        share += instance.weights[n] * capture_probability(instance, n, x);
    }
    return share;
}

}  // namespace maxcap
