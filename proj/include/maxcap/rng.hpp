#pragma once

#include <cmath>
#include <cstdint>

namespace maxcap {

/// Splittable 64-bit pseudo-random generator (SplitMix64 step function,
/// SplittableRandom-style stream derivation).
///
/// Streams derived via stream(id) are a pure function of (current state, id),
/// so sibling streams stay identical no matter how many draws the parent or
/// any other stream consumes. Generators, simulation and evaluation each pull
/// from their own stream of a root seed; enlarging one sample never perturbs
/// the others.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    SplitMix64() = default;
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~std::uint64_t{0}; }

    result_type operator()() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Derives an independent child stream without advancing this one.
    SplitMix64 stream(std::uint64_t id) const {
        return SplitMix64(mix(state_ ^ mix(id + 0x632be59bd9b4e019ull)));
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(operator()() >> 11) * 0x1.0p-53; }

    /// Uniform double in the open interval (0, 1); safe under log(-log(u)).
    double uniform_open() {
        return (static_cast<double>(operator()() >> 12) + 0.5) * 0x1.0p-52;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard Gumbel draw by quantile inversion.
    double gumbel() { return -std::log(-std::log(uniform_open())); }

    /// Standard normal draw (Box-Muller, two uniforms per call).
    double normal() {
        double u1 = uniform_open();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_ = 0x853c49e6748fea9bull;
};

/// Fixed stream ids hung off a root seed. Keeping these stable is what makes
/// a facility layout, a customer sample and a scenario set independently
/// reproducible from one seed.
namespace rng_stream {
inline constexpr std::uint64_t facilities = 0;
inline constexpr std::uint64_t customers = 1;
inline constexpr std::uint64_t scenarios = 2;
inline constexpr std::uint64_t evaluation = 3;
inline constexpr std::uint64_t entropy = 4;
}  // namespace rng_stream

}  // namespace maxcap
