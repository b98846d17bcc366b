// Indexed generative families: feature densities {f_i} and label fields
// {h_i} with their Cesaro limits. Inhomogeneity lives here.

#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "nonstat/core.hpp"

namespace nonstat {

using DensityFn = std::function<double(const Point&)>;
using FieldFn = std::function<double(const Point&)>;

enum class DensityDrift { none, mixture_decay, mixture_constant };

/// Family of densities f_i = (1 - beta_i) f + beta_i q on a common support
/// box. beta_i = 0 (none), i^{-1/2} (mixture_decay, Cesaro-vanishing) or a
/// constant (mixture_constant, Cesaro-persistent).
struct DensityFamily {
    DensityFn base;  // the Cesaro limit f
    DensityFn alt;   // the mixture component q (unused when drift == none)
    DensityDrift drift = DensityDrift::none;
    double beta = 0.0;  // constant mixture weight
    Box support;
    double c1 = 0.0;        // lower bound of f on {f > 0}
    double c2 = 0.0;        // upper bound of f
    double envelope = 0.0;  // sup over i and x of f_i, for rejection sampling

    double beta_at(long i) const {
        switch (drift) {
            case DensityDrift::none: return 0.0;
            case DensityDrift::mixture_decay: return 1.0 / std::sqrt(static_cast<double>(i));
            default: return beta;
        }
    }

    double limit_at(const Point& x) const { return base(x); }

    double at(long i, const Point& x) const {
        const double b = beta_at(i);
        if (b == 0.0) return base(x);
        return (1.0 - b) * base(x) + b * alt(x);
    }

    /// (1/n) sum_{i=1..n} beta_i.
    double mean_beta(long n) const {
        switch (drift) {
            case DensityDrift::none: return 0.0;
            case DensityDrift::mixture_constant: return beta;
            default: {
                double s = 0.0;
                for (long i = 1; i <= n; ++i) s += 1.0 / std::sqrt(static_cast<double>(i));
                return s / static_cast<double>(n);
            }
        }
    }
};

enum class LabelPerturbation { none, alternating, decaying, constant };

/// Which ergodic condition the family is built to satisfy: the absolute
/// Cesaro condition (the stronger one), only the signed condition, or
/// neither (a deliberate negative control).
enum class ErgodicMode { absolute_cesaro, signed_cesaro, violating };

inline const char* to_string(ErgodicMode m) {
    switch (m) {
        case ErgodicMode::absolute_cesaro: return "absolute_cesaro";
        case ErgodicMode::signed_cesaro: return "signed_cesaro";
        default: return "violating";
    }
}

/// Family of label functions h_i = h + c_i g, where g is a fixed bump with
/// sup|g| = 1 and c_i is the perturbation coefficient: 0 (none),
/// +-a alternating in i (signed condition only), a i^{-1/2} (both
/// conditions) or a constant a (neither).
struct LabelField {
    FieldFn limit;  // h
    FieldFn bump;   // g (unused when perturbation == none)
    LabelPerturbation perturbation = LabelPerturbation::none;
    double amplitude = 0.0;
    ErgodicMode mode = ErgodicMode::absolute_cesaro;
    double lo_bound = 0.0;  // range of the limit: [0,1] or [eta1, eta2]
    double hi_bound = 1.0;

    double coef_at(long i) const {
        switch (perturbation) {
            case LabelPerturbation::none: return 0.0;
            case LabelPerturbation::alternating:
                return (i % 2 == 0) ? amplitude : -amplitude;
            case LabelPerturbation::decaying:
                return amplitude / std::sqrt(static_cast<double>(i));
            default: return amplitude;
        }
    }

    double limit_at(const Point& x) const { return limit(x); }

    double at(long i, const Point& x) const {
        const double c = coef_at(i);
        if (c == 0.0) return limit(x);
        return limit(x) + c * bump(x);
    }

    double mean_coef(long n) const {
        switch (perturbation) {
            case LabelPerturbation::none: return 0.0;
            case LabelPerturbation::alternating:
                return (n % 2 == 0) ? 0.0 : -amplitude / static_cast<double>(n);
            case LabelPerturbation::constant: return amplitude;
            default: {
                double s = 0.0;
                for (long i = 1; i <= n; ++i) s += 1.0 / std::sqrt(static_cast<double>(i));
                return amplitude * s / static_cast<double>(n);
            }
        }
    }

    double mean_abs_coef(long n) const {
        switch (perturbation) {
            case LabelPerturbation::none: return 0.0;
            case LabelPerturbation::alternating: return amplitude;
            case LabelPerturbation::constant: return amplitude;
            default: return mean_coef(n);
        }
    }
};

/// Smooth bump supported on a sub-box: product over axes of the raised
/// cosine 0.5 (1 + cos(2 pi (x - c)/w)), so sup|g| = 1 at the center and
/// g vanishes with its first derivative at the sub-box boundary.
inline FieldFn raised_cosine_bump(Box b) {
    return [b = std::move(b)](const Point& x) -> double {
        double v = 1.0;
        for (int a = 0; a < b.dim(); ++a) {
            const double w = b.hi[a] - b.lo[a];
            const double c = 0.5 * (b.lo[a] + b.hi[a]);
            const double t = x[a] - c;
            if (std::fabs(t) >= 0.5 * w) return 0.0;
            v *= 0.5 * (1.0 + std::cos(6.283185307179586476925286766559 * t / w));
        }
        return v;
    };
}

}  // namespace nonstat
