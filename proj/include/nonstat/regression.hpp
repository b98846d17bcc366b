// k-NN regression: the universal regressor, its ball-average variant used
// as an intermediate object in the consistency analysis, and the
// (log k)^2 / k rate reference.

#pragma once

#include <cmath>
#include <stdexcept>

#include "nonstat/neighbors.hpp"

namespace nonstat {

struct RegressionEstimate {
    double value = 0.0;
    long k_used = 0;
    bool fallback = false;  // true when the neighborhood was empty
};

/// Mean of the k nearest labels (ties by stream index). k > n averages all
/// n points. Summation follows the (distance, index) neighbor order, so the
/// result is bit-identical to a sort-then-average linear scan.
inline RegressionEstimate knn_regress(const SpatialIndex& idx, const Point& x, long k) {
    const auto nb = idx.k_nearest(x, k);
    double s = 0.0;
    for (long i : nb) s += idx.label(i);
    return {s / static_cast<double>(nb.size()), static_cast<long>(nb.size()), false};
}

/// Mean of the labels inside the closed ball of radius r; an empty ball
/// falls back to the caller-supplied global mean.
inline RegressionEstimate ball_regress(const SpatialIndex& idx, const Point& x, double r,
                                       double global_mean) {
    if (!(r > 0.0)) throw std::invalid_argument("ball_regress: radius must be positive");
    const BallCounts c = idx.ball_counts(x, r);
    if (c.n_tot == 0) return {global_mean, 0, true};
    return {c.y_sum / static_cast<double>(c.n_tot), c.n_tot, false};
}

struct RateBound {
    long k = 0;
    double epsilon = 0.0;  // (log k) / sqrt(k)
    double bound = 0.0;    // coef (log k)^2 / k
    double coef = 0.0;
};

inline RateBound rate_bound(long k, double coef) {
    if (k < 2) throw std::invalid_argument("rate_bound: k must be >= 2");
    if (!(coef > 0.0)) throw std::invalid_argument("rate_bound: coef must be positive");
    const double lk = std::log(static_cast<double>(k));
    return {k, lk / std::sqrt(static_cast<double>(k)), coef * lk * lk / static_cast<double>(k), coef};
}

}  // namespace nonstat
