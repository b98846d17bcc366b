// Generative scenario presets: inhomogeneous density and label families
// satisfying (or deliberately violating) the Cesaro ergodic conditions,
// the wireless path-loss and cognitive-radio presets, and the seeded
// stream sampler.

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nonstat/core.hpp"
#include "nonstat/families.hpp"

namespace nonstat {

// ---------------------------------------------------------------------------
// Family constructors

/// A density together with its support and bounds, as handed to the family
/// constructors.
struct DensitySpec {
    DensityFn fn;
    Box support;
    double min_positive = 0.0;  // inf of f on {f > 0}; 0 when not bounded away
    double max_value = 0.0;     // sup of f
};

/// Builds f_i = (1 - beta_i) f + beta_i q. mixture_decay (beta_i = i^{-1/2})
/// keeps the Cesaro density condition; mixture_constant with q != f breaks it.
inline DensityFamily make_density_family(const DensitySpec& base, DensityDrift drift,
                                         const DensitySpec& alt = {}, double beta = 0.0) {
    DensityFamily fam;
    fam.base = base.fn;
    fam.support = base.support;
    fam.c1 = base.min_positive;
    fam.c2 = base.max_value;
    fam.envelope = base.max_value;
    fam.drift = drift;
    if (drift != DensityDrift::none) {
        if (!alt.fn) throw std::invalid_argument("make_density_family: drift requires a mixture component");
        if (!(alt.support == base.support))
            throw std::invalid_argument("make_density_family: mismatched supports");
        fam.alt = alt.fn;
        fam.beta = drift == DensityDrift::mixture_constant ? beta : 0.0;
        fam.envelope = std::max(base.max_value, alt.max_value);
    }
    return fam;
}

namespace detail {

inline void check_label_range(const LabelField& field, const Box& support, double lo, double hi) {
    // Coefficients are monotone in |c|, so the range extremes over i are
    // attained at the extreme coefficients.
    double c_max = 0.0, c_min = 0.0;
    switch (field.perturbation) {
        case LabelPerturbation::none: break;
        case LabelPerturbation::alternating:
            c_max = field.amplitude;
            c_min = -field.amplitude;
            break;
        default:
            c_max = field.amplitude;
            break;
    }
    const int d = support.dim();
    const long ppa = d == 1 ? 2048 : 64;
    std::vector<long> ji(static_cast<std::size_t>(d), 0);
    Point x;
    x.coords.resize(static_cast<std::size_t>(d));
    long total = 1;
    for (int a = 0; a < d; ++a) total *= ppa;
    for (long c = 0; c < total; ++c) {
        long rem = c;
        for (int a = d - 1; a >= 0; --a) {
            ji[static_cast<std::size_t>(a)] = rem % ppa;
            rem /= ppa;
        }
        for (int a = 0; a < d; ++a)
            x[a] = support.lo[a] + (ji[static_cast<std::size_t>(a)] + 0.5) *
                                       (support.hi[a] - support.lo[a]) / ppa;
        const double h = field.limit(x);
        const double g = field.perturbation == LabelPerturbation::none ? 0.0 : field.bump(x);
        for (double cc : {0.0, c_min, c_max}) {
            const double v = h + cc * g;
            if (v < lo || v > hi)
                throw std::invalid_argument("make_label_family: perturbed field leaves [" +
                                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
    }
}

}  // namespace detail

/// Builds h_i = h + c_i g and tags the ergodic mode the construction
/// satisfies. Throws if any h_i leaves [lo, hi] on the support grid.
inline LabelField make_label_family(FieldFn limit, double lo, double hi,
                                    LabelPerturbation perturbation, const Box& support,
                                    FieldFn bump = {}, double amplitude = 0.0) {
    LabelField field;
    field.limit = std::move(limit);
    field.bump = std::move(bump);
    field.perturbation = perturbation;
    field.amplitude = perturbation == LabelPerturbation::none ? 0.0 : amplitude;
    field.lo_bound = lo;
    field.hi_bound = hi;
    switch (perturbation) {
        case LabelPerturbation::alternating: field.mode = ErgodicMode::signed_cesaro; break;
        case LabelPerturbation::constant: field.mode = ErgodicMode::violating; break;
        default: field.mode = ErgodicMode::absolute_cesaro; break;
    }
    if (perturbation != LabelPerturbation::none && !field.bump)
        throw std::invalid_argument("make_label_family: perturbation requires a bump shape");
    detail::check_label_range(field, support, lo, hi);
    return field;
}

// ---------------------------------------------------------------------------
// Wireless presets

/// Path-loss model parameters; received power decays as distance^{-delta}
/// with delta > 2, capped at p_max.
struct PathLossParams {
    double delta = 3.0;
    double r0 = 1.5;   // inner annulus radius
    double R = 2.5;    // outer annulus radius
    double p_max = 0.4;

    void validate() const {
        if (!(delta > 2.0)) throw std::invalid_argument("PathLossParams: delta must exceed 2");
        if (!(r0 > 0.0 && R > r0)) throw std::invalid_argument("PathLossParams: need 0 < r0 < R");
        if (!(p_max > 0.0)) throw std::invalid_argument("PathLossParams: p_max must be positive");
    }
};

/// Transmission-power target h(x) = min(p_max, |x|^{-delta}).
inline FieldFn wireless_power_target(const PathLossParams& params) {
    params.validate();
    return [params](const Point& x) {
        return std::min(params.p_max, std::pow(norm(x), -params.delta));
    };
}

/// Disturbance probability around the licensed user: a radial sigmoid that
/// is near 1 close to the primary user and near 0 far away. The level set
/// {h = 1/2} is the sphere |x - center| = radius_soft, which has measure
/// zero under any density.
inline LabelField cr_disturbance_field(const Point& center, double radius_soft, double steepness,
                                       const Box& support,
                                       LabelPerturbation perturbation = LabelPerturbation::none,
                                       FieldFn bump = {}, double amplitude = 0.0) {
    if (!(steepness > 0.0)) throw std::invalid_argument("cr_disturbance_field: steepness must be positive");
    FieldFn limit = [center, radius_soft, steepness](const Point& x) {
        double s = 0.0;
        for (std::size_t a = 0; a < center.coords.size(); ++a) {
            const double t = x.coords[a] - center.coords[a];
            s += t * t;
        }
        const double dist = std::sqrt(s);
        return 1.0 / (1.0 + std::exp(steepness * (dist - radius_soft)));
    };
    return make_label_family(std::move(limit), 0.0, 1.0, perturbation, support, std::move(bump),
                             amplitude);
}

// ---------------------------------------------------------------------------
// Scenarios

struct ScenarioBounds {
    double c1 = 0.0, c2 = 0.0;    // density bounds on its support
    double eta1 = 0.0, eta2 = 0.0;  // regression target bounds
};

struct Scenario {
    std::string name;
    DataKind kind = DataKind::classification;
    int dim = 1;
    DensityFamily density;
    LabelField labels;
    NoiseModel noise;  // regression only
    Schedules schedules;
    ScenarioBounds validity;
    ErgodicMode declared_mode = ErgodicMode::absolute_cesaro;
};

struct ScenarioOverrides {
    std::optional<double> noise_bound;
    std::optional<double> zeta;
    std::optional<double> k_exponent;
    std::optional<double> k_coef;
    std::optional<double> r_coef;
};

inline const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = {
        "smooth_iid_reg", "drift_reg", "wireless_power",     "iid_class",
        "decay_class",    "alternating_class", "cr_network", "violating_class"};
    return names;
}

namespace detail {

inline DensitySpec uniform_box_density(const Box& box) {
    const double v = 1.0 / box.volume();
    return {[box, v](const Point& x) { return box.contains(x) ? v : 0.0; }, box, v, v};
}

/// q(x) = 1 + 0.9 cos(2 pi x) on [0,1]; integrates to 1 exactly.
inline DensitySpec cosine_density_1d(const Box& box) {
    return {[box](const Point& x) {
                if (!box.contains(x)) return 0.0;
                return 1.0 + 0.9 * std::cos(6.283185307179586476925286766559 * x[0]);
            },
            box, 0.1, 1.9};
}

/// Mollified annulus density on r0 <= |x| <= R in d=2: smoothstep edges of
/// width w so the limit density is uniformly continuous, with closed-form
/// normalization (the radial profile is piecewise polynomial).
struct AnnulusDensity {
    double r0, R, w, norm_const;

    AnnulusDensity(double r0_, double R_, double w_) : r0(r0_), R(R_), w(w_) {
        // integral of rho(r) r dr: smoothstep t^2(3-2t) contributes
        // 1/2 in t and 7/20 against the linear factor.
        const double up = w * (r0 / 2.0 + 7.0 * w / 20.0);
        const double plateau = 0.5 * ((R - w) * (R - w) - (r0 + w) * (r0 + w));
        const double down = w * (R / 2.0 - 7.0 * w / 20.0);
        norm_const = 1.0 / (6.283185307179586476925286766559 * (up + plateau + down));
    }

    double profile(double r) const {
        if (r <= r0 || r >= R) return 0.0;
        if (r < r0 + w) {
            const double t = (r - r0) / w;
            return t * t * (3.0 - 2.0 * t);
        }
        if (r > R - w) {
            const double t = (R - r) / w;
            return t * t * (3.0 - 2.0 * t);
        }
        return 1.0;
    }

    double operator()(const Point& x) const { return norm_const * profile(norm(x)); }
};

inline FieldFn sin_field_1d(double offset, double amplitude) {
    return [offset, amplitude](const Point& x) {
        return offset + amplitude * std::sin(6.283185307179586476925286766559 * x[0]);
    };
}

inline Box perturbation_bump_box() { return {{0.55}, {0.8}}; }

inline Scenario classification_base(const std::string& name, LabelPerturbation perturbation,
                                    double amplitude) {
    Scenario sc;
    sc.name = name;
    sc.kind = DataKind::classification;
    sc.dim = 1;
    const Box box{{0.0}, {1.0}};
    sc.density = make_density_family(uniform_box_density(box), DensityDrift::none);
    FieldFn bump = perturbation == LabelPerturbation::none ? FieldFn{}
                                                           : raised_cosine_bump(perturbation_bump_box());
    sc.labels = make_label_family(sin_field_1d(0.5, 0.3), 0.0, 1.0, perturbation, box,
                                  std::move(bump), amplitude);
    sc.noise = NoiseModel{NoiseKind::uniform_symmetric, 0.0};
    sc.validity = {1.0, 1.0, 0.0, 1.0};
    sc.declared_mode = sc.labels.mode;
    return sc;
}

inline Scenario regression_base(const std::string& name, DensityDrift drift) {
    Scenario sc;
    sc.name = name;
    sc.kind = DataKind::regression;
    sc.dim = 1;
    const Box box{{0.0}, {1.0}};
    sc.density = make_density_family(uniform_box_density(box), drift, cosine_density_1d(box));
    sc.labels = make_label_family(sin_field_1d(1.0, 0.5), 0.5, 1.5, LabelPerturbation::none, box);
    sc.noise = NoiseModel{NoiseKind::uniform_symmetric, 0.3};
    sc.validity = {1.0, 1.0, 0.5, 1.5};  // bounds of the limit density and target
    sc.declared_mode = ErgodicMode::absolute_cesaro;
    return sc;
}

}  // namespace detail

/// Builds a preset scenario by name; throws on unknown names. Overrides
/// replace the preset's noise bound or schedule parameters.
inline Scenario make_scenario(const std::string& name, const ScenarioOverrides& ov = {}) {
    Scenario sc;
    if (name == "smooth_iid_reg") {
        sc = detail::regression_base(name, DensityDrift::none);
    } else if (name == "drift_reg") {
        sc = detail::regression_base(name, DensityDrift::mixture_decay);
    } else if (name == "wireless_power") {
        sc.name = name;
        sc.kind = DataKind::regression;
        sc.dim = 2;
        const PathLossParams params;
        const Box box{{-params.R, -params.R}, {params.R, params.R}};
        const detail::AnnulusDensity annulus(params.r0, params.R, 0.25);
        DensitySpec spec{annulus, box, 0.0, annulus.norm_const};
        sc.density = make_density_family(spec, DensityDrift::none);
        // Bounds valid over the whole support box (the target is evaluated
        // at grid points outside the annulus too): the farthest box point
        // sits at distance R sqrt(2) and the cap tops out at p_max.
        const double eta1 = std::pow(params.R * std::sqrt(2.0), -params.delta);
        const double eta2 = params.p_max;
        sc.labels = make_label_family(wireless_power_target(params), eta1, eta2,
                                      LabelPerturbation::none, box);
        sc.noise = NoiseModel{NoiseKind::uniform_symmetric, 0.3};
        // Flatter neighbor growth: the delta = 3 target is steep, so the
        // k-NN ball must stay small relative to the annulus at desk scale.
        sc.schedules.k_exponent = 0.4;
        sc.validity = {0.0, annulus.norm_const, eta1, eta2};
        sc.declared_mode = ErgodicMode::absolute_cesaro;
    } else if (name == "iid_class") {
        sc = detail::classification_base(name, LabelPerturbation::none, 0.0);
    } else if (name == "decay_class") {
        sc = detail::classification_base(name, LabelPerturbation::decaying, 0.2);
    } else if (name == "alternating_class") {
        sc = detail::classification_base(name, LabelPerturbation::alternating, 0.2);
    } else if (name == "violating_class") {
        sc = detail::classification_base(name, LabelPerturbation::constant, 0.2);
    } else if (name == "cr_network") {
        sc.name = name;
        sc.kind = DataKind::classification;
        sc.dim = 2;
        const Box box{{0.0, 0.0}, {1.0, 1.0}};
        sc.density = make_density_family(detail::uniform_box_density(box), DensityDrift::none);
        sc.labels = cr_disturbance_field(Point{0.5, 0.5}, 0.3, 12.0, box);
        sc.noise = NoiseModel{NoiseKind::uniform_symmetric, 0.0};
        sc.validity = {1.0, 1.0, 0.0, 1.0};
        sc.declared_mode = ErgodicMode::absolute_cesaro;
    } else {
        throw std::invalid_argument("unknown scenario: " + name);
    }
    if (ov.noise_bound) sc.noise.bound = *ov.noise_bound;
    if (ov.zeta) sc.schedules.zeta = *ov.zeta;
    if (ov.k_exponent) sc.schedules.k_exponent = *ov.k_exponent;
    if (ov.k_coef) sc.schedules.k_coef = *ov.k_coef;
    if (ov.r_coef) sc.schedules.r_coef = *ov.r_coef;
    return sc;
}

// ---------------------------------------------------------------------------
// Stream sampling

/// Draws from a density by rejection against a constant envelope over the
/// support box. Throws once the attempt budget is exhausted (an envelope
/// below sup f is a configuration error, not a statistical event).
template <typename DensityEval>
Point rejection_sample(DensityEval&& f, const Box& box, double envelope, Rng& rng,
                       long budget = 1000000) {
    Point x;
    x.coords.resize(static_cast<std::size_t>(box.dim()));
    for (long attempt = 0; attempt < budget; ++attempt) {
        for (int a = 0; a < box.dim(); ++a) x[a] = rng.uniform(box.lo[a], box.hi[a]);
        if (rng.uniform() * envelope <= f(x)) return x;
    }
    throw std::runtime_error("rejection_sample: attempt budget exceeded (envelope misconfigured?)");
}

/// Samples an ordered stream of n points. Regression: X_i ~ f_i,
/// Y_i = h(X_i) + N_i. Classification: X_i ~ the fixed base density,
/// Y_i ~ Bernoulli(h_i(X_i)). Features, labels and noise consume dedicated
/// substreams derived from (seed.master, seed.replication), so the stream
/// is bit-reproducible.
inline Dataset sample_stream(const Scenario& sc, long n, const SeedSpec& seed) {
    if (n < 1) throw std::invalid_argument("sample_stream: n must be >= 1");
    Rng features(derive_seed({seed.master, seed.replication, Stream::features}));
    Rng labels(derive_seed({seed.master, seed.replication, Stream::labels}));
    Rng noise(derive_seed({seed.master, seed.replication, Stream::noise}));
    Dataset ds;
    ds.kind = sc.kind;
    ds.dim = sc.dim;
    ds.samples.reserve(static_cast<std::size_t>(n));
    for (long i = 1; i <= n; ++i) {
        Sample s;
        s.index = i;
        if (sc.kind == DataKind::regression) {
            s.x = rejection_sample([&](const Point& p) { return sc.density.at(i, p); },
                                   sc.density.support, sc.density.envelope, features);
            s.y = sc.labels.limit_at(s.x) + sc.noise.draw(noise);
        } else {
            s.x = rejection_sample([&](const Point& p) { return sc.density.limit_at(p); },
                                   sc.density.support, sc.density.envelope, features);
            s.y = labels.bernoulli(sc.labels.at(i, s.x)) ? 1.0 : 0.0;
        }
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

}  // namespace nonstat
