#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "maxcap/generators.hpp"
#include "maxcap/types.hpp"

namespace maxcap {

/// Dense packed bit matrix, one row per simulated customer, one column per
/// candidate location.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::int64_t rows, int cols)
        : rows_(rows), cols_(cols), words_per_row_((cols + 63) / 64),
          data_(static_cast<std::size_t>(rows) * words_per_row_, 0) {}

    std::int64_t rows() const { return rows_; }
    int cols() const { return cols_; }
    int words_per_row() const { return words_per_row_; }

    bool test(std::int64_t r, int c) const {
        return (row(r)[c >> 6] >> (c & 63)) & 1u;
    }
    void set(std::int64_t r, int c) {
        row(r)[c >> 6] |= std::uint64_t{1} << (c & 63);
    }

    std::span<std::uint64_t> row(std::int64_t r) {
        return {data_.data() + r * words_per_row_, static_cast<std::size_t>(words_per_row_)};
    }
    std::span<const std::uint64_t> row(std::int64_t r) const {
        return {data_.data() + r * words_per_row_, static_cast<std::size_t>(words_per_row_)};
    }

    void append_row(std::span<const std::uint64_t> words);

private:
    std::int64_t rows_ = 0;
    int cols_ = 0;
    int words_per_row_ = 0;
    std::vector<std::uint64_t> data_;
};

/// 0-1 capture model over simulated customers: row (n,s) marks which
/// candidates would beat every competitor for customer n under noise
/// scenario s. Empty `weights` means all rows carry 1/(|N||S|), which keeps
/// downstream mass arithmetic exact.
struct CoverageProblem {
    BitMatrix rows;
    std::vector<double> weights;  // per row; empty => uniform
    int n_customers = 0;
    int n_scenarios = 0;
    int n_candidates = 0;
    int budget = 0;

    std::int64_t n_rows() const { return rows.rows(); }
    bool uniform() const { return weights.empty(); }
    double row_weight(std::int64_t i) const {
        return weights.empty() ? 1.0 / static_cast<double>(n_rows()) : weights[i];
    }
};

/// Coverage model after merging identical preference profiles and dropping
/// the all-zero profile (customers lost to the competition no matter what).
/// The dropped mass stays inside total_mass so objectives remain fractions
/// of the whole market.
struct ClusteredProblem {
    BitMatrix profiles;                // pairwise distinct, no all-zero row
    std::vector<std::int64_t> counts;  // merged row count per profile
    std::vector<double> masses;        // summed row weight per profile
    std::int64_t total_rows = 0;       // |N| * |S| before clustering
    double total_mass = 0.0;           // includes the dropped zero profile
    bool uniform = true;               // counts carry the exact arithmetic
    int n_candidates = 0;
    int budget = 0;

    std::int64_t n_profiles() const { return profiles.rows(); }
};

/// Preference profile of one simulated customer: bit c set iff candidate c's
/// noisy utility is >= every competitor's. With no competitors every bit is
/// set. `utilities` holds candidates first, competitors after.
std::vector<std::uint8_t> capture_row(std::span<const double> utilities,
                                      int n_candidates);

/// Simulated 0-1 problem for a finite-support instance: |S| i.i.d. noise
/// scenarios per customer, row weight q_n / |S|.
CoverageProblem build_coverage(const ChoiceInstance& instance, int n_scenarios,
                               const NoiseModel& noise, std::uint64_t seed);

/// Same, drawing the customers themselves from a generative model first.
/// The customer sample depends only on (model, n, seed), never on |S|.
CoverageProblem build_coverage(const GenerativeModel& model, int n_customers,
                               int n_scenarios, const NoiseModel& noise,
                               std::uint64_t seed);

/// Two-step reduction: merge rows with identical profiles (first-occurrence
/// order), then drop the all-zero profile while keeping its mass in
/// total_mass.
ClusteredProblem cluster(const CoverageProblem& problem);

/// Percentage drop in the number of decision variables, 100 * (1 - |P| / (|N||S|)).
double size_reduction(const CoverageProblem& before, const ClusteredProblem& after);

}  // namespace maxcap
