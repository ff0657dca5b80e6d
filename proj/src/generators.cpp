#include "maxcap/generators.hpp"

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace maxcap {

namespace {

Point2D uniform_point(SplitMix64& rng, double lo, double hi) {
    double x = rng.uniform(lo, hi);
    double y = rng.uniform(lo, hi);
    return {x, y};
}

std::vector<Facility> uniform_facilities(SplitMix64& rng, int count, int first_id,
                                         FacilityKind kind, double lo, double hi,
                                         int location_type = -1) {
    std::vector<Facility> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        out.push_back(Facility{first_id + i, uniform_point(rng, lo, hi), kind, location_type});
    }
    return out;
}

int sample_categorical(SplitMix64& rng, std::span<const double> weights) {
    double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        acc += weights[j];
        if (u < acc) return static_cast<int>(j);
    }
    return static_cast<int>(weights.size()) - 1;
}

}  // namespace

const char* to_string(ModelFamily family) {
    switch (family) {
        case ModelFamily::Hm14: return "hm14";
        case ModelFamily::Hm14Mmnl: return "hm14-mmnl";
        case ModelFamily::Mmnl3: return "mmnl3";
    }
    return "?";
}

void validate(const Hm14Params& params) {
    if (params.n_customers <= 0 || params.n_candidates <= 0 || params.n_competitors < 0)
        throw std::invalid_argument("hm14: counts must be positive");
    if (!(params.beta > 0.0)) throw std::invalid_argument("hm14: beta must be positive");
    if (!(params.alpha >= 0.0)) throw std::invalid_argument("hm14: alpha must be nonnegative");
    if (params.budget < 1 || params.budget > params.n_candidates)
        throw std::invalid_argument("hm14: budget must lie in [1, |D|]");
}

void validate(const Mmnl3Params& params) {
    if (!(params.beta > 0.0)) throw std::invalid_argument("mmnl3: beta must be positive");
    double pi_total = 0.0;
    for (double p : params.pi) {
        if (p < 0.0) throw std::invalid_argument("mmnl3: pi must be nonnegative");
        pi_total += p;
    }
    if (std::abs(pi_total - 1.0) > 1e-9)
        throw std::invalid_argument("mmnl3: pi must sum to 1");
    for (const auto& row : params.rho) {
        double total = 0.0;
        for (double p : row) {
            if (p < 0.0) throw std::invalid_argument("mmnl3: rho must be nonnegative");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument("mmnl3: each rho row must sum to 1");
    }
    for (const auto& s : params.sigma) {
        // (xx, xy, yy) must be symmetric positive definite
        if (!(s[0] > 0.0) || !(s[0] * s[2] - s[1] * s[1] > 0.0))
            throw std::invalid_argument("mmnl3: sigma must be positive definite");
    }
    if (params.candidates_per_type <= 0 || params.competitors_per_type < 0)
        throw std::invalid_argument("mmnl3: counts must be positive");
    if (params.budget < 1 || params.budget > 3 * params.candidates_per_type)
        throw std::invalid_argument("mmnl3: budget must lie in [1, |D|]");
}

ChoiceInstance gen_hm14(const Hm14Params& params, std::uint64_t seed) {
    validate(params);
    SplitMix64 root(seed);

    SplitMix64 facility_rng = root.stream(rng_stream::facilities);
    ChoiceInstance instance;
    instance.candidates = uniform_facilities(facility_rng, params.n_candidates, 0,
                                             FacilityKind::Candidate, 0.0, 30.0);
    instance.competitors =
        uniform_facilities(facility_rng, params.n_competitors, params.n_candidates,
                           FacilityKind::Competitor, 0.0, 30.0);

    SplitMix64 customer_rng = root.stream(rng_stream::customers);
    const int n = params.n_customers;
    const int alt = params.n_candidates + params.n_competitors;
    instance.utilities.resize(static_cast<std::size_t>(n) * alt);
    for (int i = 0; i < n; ++i) {
        Point2D pos = uniform_point(customer_rng, 0.0, 30.0);
        std::size_t row = static_cast<std::size_t>(i) * alt;
        for (int c = 0; c < params.n_candidates; ++c) {
            instance.utilities[row + c] =
                -params.beta * euclidean_distance(pos, instance.candidates[c].position);
        }
        for (int k = 0; k < params.n_competitors; ++k) {
            instance.utilities[row + params.n_candidates + k] =
                -params.alpha * params.beta *
                euclidean_distance(pos, instance.competitors[k].position);
        }
    }
    instance.weights.assign(static_cast<std::size_t>(n), 1.0 / n);
    instance.budget = params.budget;
    instance.meta = {{"family", "hm14"},
                     {"beta", std::to_string(params.beta)},
                     {"alpha", std::to_string(params.alpha)},
                     {"seed", std::to_string(seed)},
                     {"distance", "euclidean"}};
    return instance;
}

GenerativeModel gen_hm14_mmnl(std::uint64_t seed) {
    GenerativeModel model;
    model.family_ = ModelFamily::Hm14Mmnl;
    model.seed_ = seed;
    model.budget_ = 5;
    model.uniform_lo_ = 0.0;
    model.uniform_hi_ = 30.0;

    SplitMix64 facility_rng = SplitMix64(seed).stream(rng_stream::facilities);
    model.candidates_ =
        uniform_facilities(facility_rng, 50, 0, FacilityKind::Candidate, 0.0, 30.0);
    model.competitors_ =
        uniform_facilities(facility_rng, 10, 50, FacilityKind::Competitor, 0.0, 30.0);
    return model;
}

GenerativeModel gen_mmnl3(const Mmnl3Params& params, std::uint64_t seed) {
    validate(params);
    GenerativeModel model;
    model.family_ = ModelFamily::Mmnl3;
    model.seed_ = seed;
    model.budget_ = params.budget;
    model.mmnl3_ = params;

    for (int j = 0; j < 4; ++j) {
        const auto& s = params.sigma[j];
        double l11 = std::sqrt(s[0]);
        double l21 = s[1] / l11;
        double l22 = std::sqrt(s[2] - l21 * l21);
        model.chol_[j] = {l11, l21, l22};
    }

    SplitMix64 facility_rng = SplitMix64(seed).stream(rng_stream::facilities);
    const double w = params.region_half_width;
    int id = 0;
    for (int type = 0; type < 3; ++type) {
        auto block = uniform_facilities(facility_rng, params.candidates_per_type, id,
                                        FacilityKind::Candidate, -w, w, type);
        id += params.candidates_per_type;
        model.candidates_.insert(model.candidates_.end(), block.begin(), block.end());
    }
    for (int type = 0; type < 3; ++type) {
        auto block = uniform_facilities(facility_rng, params.competitors_per_type, id,
                                        FacilityKind::Competitor, -w, w, type);
        id += params.competitors_per_type;
        model.competitors_.insert(model.competitors_.end(), block.begin(), block.end());
    }
    return model;
}

CustomerAttributes GenerativeModel::sample_attributes(SplitMix64& rng) const {
    CustomerAttributes attr;
    switch (family_) {
        case ModelFamily::Hm14:
        case ModelFamily::Hm14Mmnl: {
            attr.position = uniform_point(rng, uniform_lo_, uniform_hi_);
            attr.segment = 0;
            break;
        }
        case ModelFamily::Mmnl3: {
            int j = sample_categorical(rng, mmnl3_.pi);
            attr.segment = 1 + sample_categorical(rng, mmnl3_.rho[j]);
            double z1 = rng.normal();
            double z2 = rng.normal();
            const auto& l = chol_[j];
            attr.position.x = mmnl3_.mu[j].x + l[0] * z1;
            attr.position.y = mmnl3_.mu[j].y + l[1] * z1 + l[2] * z2;
            break;
        }
    }
    return attr;
}

double GenerativeModel::utility(const CustomerAttributes& attributes,
                                const Facility& facility) const {
    double m = manhattan_distance(attributes.position, facility.position);
    switch (family_) {
        case ModelFamily::Hm14:
        case ModelFamily::Hm14Mmnl:
            return -m;
        case ModelFamily::Mmnl3: {
            int k = attributes.segment - 1;
            int l = facility.location_type;
            return -mmnl3_.beta * (mmnl3_.delta[k] * m + mmnl3_.gamma[k][l]);
        }
    }
    return 0.0;
}

std::vector<double> sample_noise(const NoiseModel& noise, SplitMix64& rng, int count) {
    if (count < 1) throw std::invalid_argument("sample_noise: count must be >= 1");
    std::vector<double> draws(static_cast<std::size_t>(count));
    switch (noise.kind) {
        case NoiseModel::Kind::Gumbel:
            for (double& d : draws) d = rng.gumbel();
            break;
        case NoiseModel::Kind::Normal:
            for (double& d : draws) d = noise.sigma * rng.normal();
            break;
    }
    return draws;
}

ChoiceInstance materialize_sample(const GenerativeModel& model, int n,
                                  std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("materialize_sample: n must be >= 1");
    SplitMix64 customer_rng = SplitMix64(seed).stream(rng_stream::customers);

    ChoiceInstance instance;
    instance.candidates = model.candidates();
    instance.competitors = model.competitors();
    instance.budget = model.budget();
    const int d = model.n_candidates();
    const int alt = d + model.n_competitors();
    instance.utilities.resize(static_cast<std::size_t>(n) * alt);
    for (int i = 0; i < n; ++i) {
        CustomerAttributes attr = model.sample_attributes(customer_rng);
        std::size_t row = static_cast<std::size_t>(i) * alt;
        for (int c = 0; c < d; ++c) {
            instance.utilities[row + c] = model.utility(attr, instance.candidates[c]);
        }
        for (int k = 0; k < model.n_competitors(); ++k) {
            instance.utilities[row + d + k] = model.utility(attr, instance.competitors[k]);
        }
    }
    instance.weights.assign(static_cast<std::size_t>(n), 1.0 / n);
    instance.meta = {{"family", to_string(model.family())},
                     {"model_seed", std::to_string(model.seed())},
                     {"sample_seed", std::to_string(seed)}};
    return instance;
}

}  // namespace maxcap
