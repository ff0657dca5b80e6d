#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace maxcap {

struct Point2D {
    double x = 0.0;
    double y = 0.0;
};

double euclidean_distance(const Point2D& a, const Point2D& b);
double manhattan_distance(const Point2D& a, const Point2D& b);

enum class FacilityKind { Candidate, Competitor };

struct Facility {
    int id = 0;
    Point2D position;
    FacilityKind kind = FacilityKind::Candidate;
    int location_type = -1;  // -1 when the instance carries no location types
};

/// Set of open candidates encoded as a packed bit vector of length |D|.
class DecisionVector {
public:
    DecisionVector() = default;
    explicit DecisionVector(int size)
        : size_(size), words_(static_cast<std::size_t>((size + 63) / 64), 0) {}

    static DecisionVector from_indices(int size, const std::vector<int>& open);

    int size() const { return size_; }
    bool test(int i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(int i, bool value = true) {
        std::uint64_t bit = std::uint64_t{1} << (i & 63);
        if (value) {
            words_[i >> 6] |= bit;
        } else {
            words_[i >> 6] &= ~bit;
        }
    }
    int popcount() const;
    std::vector<int> open_indices() const;
    bool empty_decision() const { return popcount() == 0; }

    const std::vector<std::uint64_t>& words() const { return words_; }

    bool operator==(const DecisionVector&) const = default;

private:
    int size_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Ordering used everywhere ties between optima are broken: the decision
/// whose sorted list of open indices is lexicographically smallest wins
/// (an open facility at a lower index beats one at a higher index).
bool lex_before(const DecisionVector& a, const DecisionVector& b);

/// Finite-support choice instance: deterministic utilities for every
/// customer over candidates (first) and competitors, customer weights that
/// sum to one, and a budget on how many candidates may be opened.
struct ChoiceInstance {
    std::vector<Facility> candidates;   // set D, utility columns [0, |D|)
    std::vector<Facility> competitors;  // set E, utility columns [|D|, |D|+|E|)
    std::vector<double> utilities;      // row-major |N| x (|D|+|E|)
    std::vector<double> weights;        // q_n, strictly positive, sums to 1
    int budget = 1;                     // r, at most this many candidates open
    std::map<std::string, std::string> meta;  // provenance (family, seed, ...)

    int n_customers() const { return static_cast<int>(weights.size()); }
    int n_candidates() const { return static_cast<int>(candidates.size()); }
    int n_competitors() const { return static_cast<int>(competitors.size()); }
    int n_alternatives() const { return n_candidates() + n_competitors(); }

    double utility(int n, int c) const {
        return utilities[static_cast<std::size_t>(n) * n_alternatives() + c];
    }

    /// True when all weights are exactly equal (enables exact count
    /// arithmetic downstream).
    bool uniform_weights() const;
};

/// Throws std::invalid_argument when an instance violates its invariants
/// (weights positive and normalized, budget within [1, |D|], finite data).
void validate(const ChoiceInstance& instance);

enum class Method { SB, SBC, MOA, BRUTE };
const char* to_string(Method m);

struct Solution {
    DecisionVector decision;
    double objective = 0.0;  // market share in [0, 1]
    Method method = Method::BRUTE;
    std::chrono::duration<double> wall_time{0.0};
    std::int64_t iterations = 0;  // solver-specific: nodes or cut rounds
    bool optimal = false;
};

}  // namespace maxcap
