#include "maxcap/simulate.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace maxcap {

void BitMatrix::append_row(std::span<const std::uint64_t> words) {
    data_.insert(data_.end(), words.begin(), words.end());
    ++rows_;
}

namespace {

// Writes the capture bits of one simulated customer into `out_words`.
void capture_row_into(std::span<const double> utilities, int n_candidates,
                      std::span<std::uint64_t> out_words) {
    const int n_competitors = static_cast<int>(utilities.size()) - n_candidates;
    double best_competitor = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_competitors; ++k) {
        best_competitor = std::max(best_competitor, utilities[n_candidates + k]);
    }
    std::fill(out_words.begin(), out_words.end(), 0);
    for (int c = 0; c < n_candidates; ++c) {
        if (utilities[c] >= best_competitor) {
            out_words[c >> 6] |= std::uint64_t{1} << (c & 63);
        }
    }
}

// Scenario index packed next to the customer index so that growing |S|
// extends each customer's scenario list instead of reshuffling it.
std::uint64_t row_stream_id(int customer, int scenario) {
    return (static_cast<std::uint64_t>(customer) << 20) |
           static_cast<std::uint64_t>(scenario);
}

}  // namespace

std::vector<std::uint8_t> capture_row(std::span<const double> utilities,
                                      int n_candidates) {
    if (n_candidates < 0 || n_candidates > static_cast<int>(utilities.size()))
        throw std::invalid_argument("capture_row: candidate count out of range");
    std::vector<std::uint64_t> words(static_cast<std::size_t>((n_candidates + 63) / 64), 0);
    capture_row_into(utilities, n_candidates, words);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n_candidates));
    for (int c = 0; c < n_candidates; ++c) {
        bits[c] = (words[c >> 6] >> (c & 63)) & 1u;
    }
    return bits;
}

CoverageProblem build_coverage(const ChoiceInstance& instance, int n_scenarios,
                               const NoiseModel& noise, std::uint64_t seed) {
    if (n_scenarios < 1)
        throw std::invalid_argument("build_coverage: need at least one scenario");
    if (n_scenarios >= (1 << 20))
        throw std::invalid_argument("build_coverage: scenario count too large");

    const int n = instance.n_customers();
    const int d = instance.n_candidates();
    const int alt = instance.n_alternatives();
    const bool uniform = instance.uniform_weights();

    CoverageProblem problem;
    problem.rows = BitMatrix(static_cast<std::int64_t>(n) * n_scenarios, d);
    problem.n_customers = n;
    problem.n_scenarios = n_scenarios;
    problem.n_candidates = d;
    problem.budget = instance.budget;
    if (!uniform) problem.weights.reserve(static_cast<std::size_t>(n) * n_scenarios);

    SplitMix64 scenario_root = SplitMix64(seed).stream(rng_stream::scenarios);
    std::vector<double> noisy(static_cast<std::size_t>(alt));
    std::int64_t row = 0;
    for (int i = 0; i < n; ++i) {
        for (int s = 0; s < n_scenarios; ++s, ++row) {
            SplitMix64 rng = scenario_root.stream(row_stream_id(i, s));
            std::vector<double> draws = sample_noise(noise, rng, alt);
            for (int c = 0; c < alt; ++c) noisy[c] = instance.utility(i, c) + draws[c];
            capture_row_into(noisy, d, problem.rows.row(row));
            if (!uniform) problem.weights.push_back(instance.weights[i] / n_scenarios);
        }
    }
    return problem;
}

CoverageProblem build_coverage(const GenerativeModel& model, int n_customers,
                               int n_scenarios, const NoiseModel& noise,
                               std::uint64_t seed) {
    ChoiceInstance instance = materialize_sample(model, n_customers, seed);
    return build_coverage(instance, n_scenarios, noise, seed);
}

ClusteredProblem cluster(const CoverageProblem& problem) {
    const std::int64_t n_rows = problem.n_rows();
    const int words = problem.rows.words_per_row();

    ClusteredProblem out;
    out.profiles = BitMatrix(0, problem.n_candidates);
    out.total_rows = n_rows;
    out.uniform = problem.uniform();
    out.n_candidates = problem.n_candidates;
    out.budget = problem.budget;

    // Open-addressing table over profile indices; grows once, never rehashes.
    std::size_t table_size = 1;
    while (table_size < static_cast<std::size_t>(n_rows) * 2 + 4) table_size <<= 1;
    std::vector<std::int64_t> table(table_size, -1);
    const std::size_t mask = table_size - 1;

    auto hash_row = [&](std::span<const std::uint64_t> row) {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (std::uint64_t w : row) {
            h ^= w;
            h *= 0x100000001b3ull;
            h ^= h >> 29;
        }
        return h;
    };

    double zero_mass = 0.0;
    for (std::int64_t r = 0; r < n_rows; ++r) {
        std::span<const std::uint64_t> row = problem.rows.row(r);
        const double weight = problem.row_weight(r);

        bool all_zero = true;
        for (std::uint64_t w : row) {
            if (w != 0) {
                all_zero = false;
                break;
            }
        }
        if (all_zero) {
            zero_mass += weight;
            continue;
        }

        std::size_t slot = hash_row(row) & mask;
        std::int64_t profile = -1;
        while (true) {
            std::int64_t occupant = table[slot];
            if (occupant < 0) break;
            if (std::equal(row.begin(), row.end(), out.profiles.row(occupant).begin())) {
                profile = occupant;
                break;
            }
            slot = (slot + 1) & mask;
        }
        if (profile < 0) {
            profile = out.profiles.rows();
            out.profiles.append_row(row);
            out.counts.push_back(0);
            out.masses.push_back(0.0);
            table[slot] = profile;
        }
        out.counts[profile] += 1;
        out.masses[profile] += weight;
    }

    double kept = 0.0;
    for (double m : out.masses) kept += m;
    out.total_mass = kept + zero_mass;
    if (out.uniform) out.total_mass = 1.0;  // exact: every row weighs 1/(|N||S|)
    return out;
}

double size_reduction(const CoverageProblem& before, const ClusteredProblem& after) {
    if (before.n_rows() <= 0)
        throw std::invalid_argument("size_reduction: empty coverage problem");
    double ratio = static_cast<double>(after.n_profiles()) /
                   static_cast<double>(before.n_rows());
    return 100.0 * (1.0 - ratio);
}

}  // namespace maxcap
