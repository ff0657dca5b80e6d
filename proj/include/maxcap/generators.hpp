#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "maxcap/rng.hpp"
#include "maxcap/types.hpp"

namespace maxcap {

/// Parameters of the planar benchmark family: customers and facilities
/// uniform on [0,30]^2, candidate utility -beta * distance, competitor
/// utility -alpha * beta * distance (small alpha = attractive competition).
struct Hm14Params {
    int n_customers = 50;
    int n_candidates = 25;
    int n_competitors = 10;
    double beta = 1.0;
    double alpha = 0.1;
    int budget = 5;
};

/// Three customer segments, three location types, four residential
/// neighborhoods. All defaults are the reference parameter set used by the
/// experiment harness.
struct Mmnl3Params {
    double beta = 1.0;  // utility scale; lower values mean noisier choices

    // Segment k's aversion to travel distance and to each location type.
    std::array<double, 3> delta{3.0, 1.0, 2.0};
    std::array<std::array<double, 3>, 3> gamma{{
        {20.0, 60.0, 30.0},
        {40.0, 20.0, 60.0},
        {60.0, 40.0, 20.0},
    }};

    // Neighborhood mixture: share pi_j, segment mix rho_j, world position
    // Normal(mu_j, sigma_j). sigma stored as (xx, xy, yy).
    std::array<double, 4> pi{0.4, 0.3, 0.2, 0.1};
    std::array<std::array<double, 3>, 4> rho{{
        {0.2, 0.7, 0.1},
        {0.3, 0.4, 0.3},
        {0.3, 0.4, 0.3},
        {0.0, 0.2, 0.8},
    }};
    std::array<Point2D, 4> mu{Point2D{2.0, -2.0}, Point2D{-10.0, -10.0},
                              Point2D{-4.0, 10.0}, Point2D{12.0, -5.0}};
    std::array<std::array<double, 3>, 4> sigma{{
        {9.0, 1.0, 9.0},
        {9.0, -6.0, 9.0},
        {16.0, 1.0, 4.0},
        {2.0, 0.0, 21.0},
    }};

    int candidates_per_type = 20;
    int competitors_per_type = 10;
    int budget = 10;
    double region_half_width = 15.0;  // facilities uniform on [-w, w]^2
};

void validate(const Hm14Params& params);
void validate(const Mmnl3Params& params);

/// Random attributes of one customer: a position, plus the segment index
/// (1-based) for typed families; segment == 0 means the family has none.
struct CustomerAttributes {
    Point2D position;
    int segment = 0;
};

enum class ModelFamily { Hm14, Hm14Mmnl, Mmnl3 };
const char* to_string(ModelFamily family);

/// I.i.d. additive utility noise. Gumbel yields logit choice probabilities;
/// the normal option exists for noise models without closed forms.
struct NoiseModel {
    enum class Kind { Gumbel, Normal };
    Kind kind = Kind::Gumbel;
    double sigma = 1.0;  // normal only
};

/// A choice model with infinite attribute support: fixed facilities plus a
/// sampler over customer attributes and the deterministic utility each
/// attribute vector assigns to a facility. Immutable once built.
class GenerativeModel {
public:
    ModelFamily family() const { return family_; }
    const std::vector<Facility>& candidates() const { return candidates_; }
    const std::vector<Facility>& competitors() const { return competitors_; }
    int n_candidates() const { return static_cast<int>(candidates_.size()); }
    int n_competitors() const { return static_cast<int>(competitors_.size()); }
    int budget() const { return budget_; }
    std::uint64_t seed() const { return seed_; }

    CustomerAttributes sample_attributes(SplitMix64& rng) const;
    double utility(const CustomerAttributes& attributes, const Facility& facility) const;

    friend GenerativeModel gen_hm14_mmnl(std::uint64_t seed);
    friend GenerativeModel gen_mmnl3(const Mmnl3Params& params, std::uint64_t seed);

private:
    GenerativeModel() = default;

    ModelFamily family_ = ModelFamily::Hm14Mmnl;
    std::vector<Facility> candidates_;
    std::vector<Facility> competitors_;
    int budget_ = 1;
    std::uint64_t seed_ = 0;
    Mmnl3Params mmnl3_;                         // Mmnl3 only
    std::array<std::array<double, 3>, 4> chol_{};  // lower Cholesky factors of sigma
    double uniform_lo_ = 0.0, uniform_hi_ = 30.0;  // Hm14Mmnl position support
};

/// Finite-support planar instance; customers, candidates and competitors all
/// drawn uniformly, utilities from Euclidean distances, uniform weights.
ChoiceInstance gen_hm14(const Hm14Params& params, std::uint64_t seed);

/// Generative counterpart of the planar family: 50 candidates, 10
/// competitors, positions uniform on [0,30]^2, utility minus the Manhattan
/// distance, budget 5.
GenerativeModel gen_hm14_mmnl(std::uint64_t seed);

/// Typed-segment mixture model described by Mmnl3Params.
GenerativeModel gen_mmnl3(const Mmnl3Params& params, std::uint64_t seed);

/// `count` i.i.d. noise draws from the given model.
std::vector<double> sample_noise(const NoiseModel& noise, SplitMix64& rng, int count);

/// Draws n customers from the model and evaluates their utilities against
/// every facility, producing a finite-support instance with weights 1/n.
ChoiceInstance materialize_sample(const GenerativeModel& model, int n,
                                  std::uint64_t seed);

}  // namespace maxcap
