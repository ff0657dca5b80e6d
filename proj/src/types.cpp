#include "maxcap/types.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace maxcap {

double euclidean_distance(const Point2D& a, const Point2D& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

double manhattan_distance(const Point2D& a, const Point2D& b) {
    return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

DecisionVector DecisionVector::from_indices(int size, const std::vector<int>& open) {
    DecisionVector d(size);
    for (int i : open) {
        if (i < 0 || i >= size) throw std::out_of_range("decision index out of range");
        d.set(i);
    }
    return d;
}

int DecisionVector::popcount() const {
    int total = 0;
    for (std::uint64_t w : words_) total += std::popcount(w);
    return total;
}

std::vector<int> DecisionVector::open_indices() const {
    std::vector<int> open;
    open.reserve(static_cast<std::size_t>(popcount()));
    for (int i = 0; i < size_; ++i) {
        if (test(i)) open.push_back(i);
    }
    return open;
}

bool lex_before(const DecisionVector& a, const DecisionVector& b) {
    // First index where the two differ decides; having that index open wins.
    std::size_t words = std::min(a.words().size(), b.words().size());
    for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t diff = a.words()[w] ^ b.words()[w];
        if (diff != 0) {
            int bit = std::countr_zero(diff);
            return (a.words()[w] >> bit) & 1u;
        }
    }
    return false;
}

bool ChoiceInstance::uniform_weights() const {
    if (weights.empty()) return true;
    for (double q : weights) {
        if (q != weights[0]) return false;
    }
    return true;
}

void validate(const ChoiceInstance& instance) {
    const int n = instance.n_customers();
    const int d = instance.n_candidates();
    const int e = instance.n_competitors();
    if (n <= 0) throw std::invalid_argument("instance has no customers");
    if (d <= 0) throw std::invalid_argument("instance has no candidate locations");
    if (instance.budget < 1 || instance.budget > d)
        throw std::invalid_argument("budget must lie in [1, |D|]");
    if (instance.utilities.size() != static_cast<std::size_t>(n) * (d + e))
        throw std::invalid_argument("utility matrix has wrong shape");
    double total = 0.0;
    for (double q : instance.weights) {
        if (!(q > 0.0)) throw std::invalid_argument("customer weights must be positive");
        total += q;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("customer weights must sum to 1");
    for (double v : instance.utilities) {
        if (!std::isfinite(v)) throw std::invalid_argument("utilities must be finite");
    }
}

const char* to_string(Method m) {
    switch (m) {
        case Method::SB: return "sb";
        case Method::SBC: return "sbc";
        case Method::MOA: return "moa";
        case Method::BRUTE: return "brute";
    }
    return "?";
}

}  // namespace maxcap
