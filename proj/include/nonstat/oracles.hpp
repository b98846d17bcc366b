// Ground-truth targets and condition verifiers: Bayes error, the finite-n
// classifier-independent floor, margin mass, Cesaro ergodic-gap checks, the
// exact binomial Chernoff verifier, and the truncated variance target.
//
// "sup_x" and integrals are realized on a uniform midpoint grid over the
// support box; quadrature outputs carry a refinement delta measured against
// a half-resolution grid. Accumulation is in fixed index order for
// bit-reproducibility.

#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "nonstat/families.hpp"

namespace nonstat {

struct GridSpec {
    Box box;
    long points_per_axis = 0;

    long total() const {
        long t = 1;
        for (int a = 0; a < box.dim(); ++a) t *= points_per_axis;
        return t;
    }
};

/// Default resolution: 4096 cells in d=1, 128 per axis in d=2, 32 beyond.
inline long default_points_per_axis(int d) {
    if (d <= 1) return 4096;
    if (d == 2) return 128;
    return 32;
}

inline GridSpec make_grid(const Box& box, long points_per_axis = 0) {
    return {box, points_per_axis > 0 ? points_per_axis : default_points_per_axis(box.dim())};
}

namespace detail {

template <typename F>
void for_each_grid_point(const GridSpec& g, F&& fn) {
    const int d = g.box.dim();
    const long ppa = g.points_per_axis;
    std::vector<double> step(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) step[static_cast<std::size_t>(a)] = (g.box.hi[a] - g.box.lo[a]) / ppa;
    std::vector<long> ji(static_cast<std::size_t>(d), 0);
    Point x;
    x.coords.resize(static_cast<std::size_t>(d));
    const long total = g.total();
    for (long c = 0; c < total; ++c) {
        long rem = c;
        for (int a = d - 1; a >= 0; --a) {
            ji[static_cast<std::size_t>(a)] = rem % ppa;
            rem /= ppa;
        }
        for (int a = 0; a < d; ++a)
            x[a] = g.box.lo[a] + (ji[static_cast<std::size_t>(a)] + 0.5) * step[static_cast<std::size_t>(a)];
        fn(x);
    }
}

template <typename F>
double grid_integral(const GridSpec& g, F&& integrand) {
    if (g.total() < 2) throw std::invalid_argument("grid_integral: grid too coarse");
    double cell = 1.0;
    for (int a = 0; a < g.box.dim(); ++a) cell *= (g.box.hi[a] - g.box.lo[a]) / g.points_per_axis;
    double sum = 0.0;
    for_each_grid_point(g, [&](const Point& x) { sum += integrand(x); });
    return sum * cell;
}

template <typename F>
double grid_max(const GridSpec& g, F&& fn) {
    double m = 0.0;
    for_each_grid_point(g, [&](const Point& x) { m = std::max(m, fn(x)); });
    return m;
}

}  // namespace detail

/// Quadrature value plus the change observed against a half-resolution
/// grid; for the uniformly continuous integrands used here, a further grid
/// doubling moves the value by less than this delta.
struct QuadResult {
    double value = 0.0;
    double refinement_delta = 0.0;
};

template <typename F>
QuadResult quadrature(const GridSpec& g, F&& integrand) {
    const double fine = detail::grid_integral(g, integrand);
    GridSpec coarse = g;
    coarse.points_per_axis = std::max(2L, g.points_per_axis / 2);
    const double rough = detail::grid_integral(coarse, integrand);
    return {fine, std::fabs(fine - rough)};
}

/// Bayes classification error L* = integral of min(h, 1-h) d(mu).
inline QuadResult bayes_error(const LabelField& labels, const DensityFamily& density,
                              const GridSpec& grid) {
    return quadrature(grid, [&](const Point& x) {
        const double h = labels.limit_at(x);
        return std::min(h, 1.0 - h) * density.limit_at(x);
    });
}

/// Finite-n classifier-independent floor M_n =
/// (1/n) sum_i integral of min(h_i, 1-h_i) d(mu).
inline QuadResult m_star_finite(const LabelField& labels, long n, const DensityFamily& density,
                                const GridSpec& grid) {
    if (n < 1) throw std::invalid_argument("m_star_finite: n must be >= 1");
    std::vector<double> coefs(static_cast<std::size_t>(n));
    for (long i = 1; i <= n; ++i) coefs[static_cast<std::size_t>(i - 1)] = labels.coef_at(i);
    return quadrature(grid, [&](const Point& x) {
        const double h = labels.limit_at(x);
        const double f = density.limit_at(x);
        if (labels.perturbation == LabelPerturbation::none)
            return std::min(h, 1.0 - h) * f;
        const double g = labels.bump(x);
        double s = 0.0;
        for (double c : coefs) {
            const double hi = h + c * g;
            s += std::min(hi, 1.0 - hi);
        }
        return s / static_cast<double>(n) * f;
    });
}

/// Margin mass b(zeta) = P(h(X) in [1/2 - zeta, 1/2) u (1/2, 1/2 + zeta]).
inline QuadResult margin_mass(const LabelField& labels, const DensityFamily& density, double zeta,
                              const GridSpec& grid) {
    if (!(zeta > 0.0 && zeta < 0.25)) throw std::invalid_argument("margin_mass: zeta outside (0, 1/4)");
    return quadrature(grid, [&](const Point& x) {
        const double h = labels.limit_at(x);
        const bool in_band = (h >= 0.5 - zeta && h < 0.5) || (h > 0.5 && h <= 0.5 + zeta);
        return in_band ? density.limit_at(x) : 0.0;
    });
}

/// sup_x |(1/n) sum_i f_i(x) - f(x)| over the grid. Exact for the affine
/// mixture families this library generates: the gap is mean(beta_i) |q - f|.
inline double cesaro_density_gap(const DensityFamily& family, long n, const GridSpec& grid) {
    if (n < 1) throw std::invalid_argument("cesaro_density_gap: n must be >= 1");
    if (family.drift == DensityDrift::none) return 0.0;
    const double mb = family.mean_beta(n);
    return detail::grid_max(grid, [&](const Point& x) {
        return mb * std::fabs(family.alt(x) - family.base(x));
    });
}

enum class GapMode { absolute, signed_mode };

/// Label-field Cesaro gap over the grid:
///   absolute: sup_x (1/n) sum_i |h_i(x) - h(x)|  (Theorem condition)
///   signed:   sup_x |(1/n) sum_i h_i(x) - h(x)|  (Lemma condition)
/// Both reduce to a coefficient statistic times |g(x)| for h_i = h + c_i g.
inline double cesaro_label_gap(const LabelField& labels, long n, const GridSpec& grid, GapMode mode) {
    if (n < 1) throw std::invalid_argument("cesaro_label_gap: n must be >= 1");
    if (labels.perturbation == LabelPerturbation::none) return 0.0;
    const double stat = mode == GapMode::absolute ? labels.mean_abs_coef(n)
                                                  : std::fabs(labels.mean_coef(n));
    if (stat == 0.0) return 0.0;
    return detail::grid_max(grid, [&](const Point& x) { return stat * std::fabs(labels.bump(x)); });
}

// ---------------------------------------------------------------------------
// Exact binomial tail vs the Chernoff-type deviation bound

struct TailCheckResult {
    double p = 0.0;
    long r = 0;
    double gamma = 0.0;
    double exact_tail = 0.0;  // P(|U_r - theta_r| >= theta_r gamma), exact
    double bound = 0.0;       // 2 exp(-gamma^2 theta_r / 4)
    bool holds = false;
};

/// Exact two-sided binomial tail against the deviation estimate
/// P(|U_r - theta_r| >= theta_r gamma) <= 2 exp(-gamma^2 theta_r / 4),
/// theta_r = p r. Terms are summed in log space via lgamma; no sampling.
inline TailCheckResult chernoff_tail_check(double p, long r, double gamma) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("chernoff_tail_check: p outside (0,1)");
    if (r < 1) throw std::invalid_argument("chernoff_tail_check: r must be >= 1");
    if (!(gamma > 0.0 && gamma <= 0.5))
        throw std::invalid_argument("chernoff_tail_check: gamma outside (0, 1/2]");
    const double theta = p * static_cast<double>(r);
    const double thr = theta * gamma;
    const double lp = std::log(p), lq = std::log1p(-p);
    const double lgr = std::lgamma(static_cast<double>(r) + 1.0);
    double tail = 0.0;
    for (long j = 0; j <= r; ++j) {
        if (std::fabs(static_cast<double>(j) - theta) < thr) continue;
        const double lterm = lgr - std::lgamma(static_cast<double>(j) + 1.0) -
                             std::lgamma(static_cast<double>(r - j) + 1.0) +
                             static_cast<double>(j) * lp + static_cast<double>(r - j) * lq;
        tail += std::exp(lterm);
    }
    const double bound = 2.0 * std::exp(-gamma * gamma * theta / 4.0);
    return {p, r, gamma, tail, bound, tail <= bound};
}

/// The sweep grid used by the verification suite and the CLI.
inline std::vector<TailCheckResult> chernoff_tail_sweep() {
    std::vector<TailCheckResult> out;
    for (int pi = 1; pi <= 9; ++pi)
        for (long r : {10L, 100L, 1000L, 10000L})
            for (double gamma : {0.05, 0.1, 0.2, 0.5})
                out.push_back(chernoff_tail_check(0.1 * pi, r, gamma));
    return out;
}

/// Truncated variance target sigma_N^2 + mass of f outside
/// A_good = {zeta < f < 1/zeta} n {zeta < h < 1/zeta}.
inline QuadResult truncated_variance_target(const LabelField& target, const DensityFamily& family,
                                            double noise_variance, double zeta_trunc,
                                            const GridSpec& grid) {
    if (!(zeta_trunc > 0.0 && zeta_trunc < 1.0))
        throw std::invalid_argument("truncated_variance_target: zeta outside (0, 1)");
    QuadResult q = quadrature(grid, [&](const Point& x) {
        const double f = family.limit_at(x);
        const double h = target.limit_at(x);
        const bool good = f > zeta_trunc && f < 1.0 / zeta_trunc && h > zeta_trunc &&
                          h < 1.0 / zeta_trunc;
        return good ? 0.0 : f;
    });
    q.value += noise_variance;
    return q;
}

}  // namespace nonstat
