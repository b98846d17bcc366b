// Classification rules: the k-NN majority rule, the zeta-majority rule
// with a fair-coin near-tie band, the plain ball majority rule, and the
// Bayes comparator.

#pragma once

#include <cmath>
#include <stdexcept>

#include "nonstat/families.hpp"
#include "nonstat/neighbors.hpp"

namespace nonstat {

/// k-NN rule: 0 iff the number of 1-labels among the k nearest neighbors
/// is at most half of them (the boundary goes to 0).
inline int knn_classify(const SpatialIndex& idx, const Point& x, long k) {
    const auto nb = idx.k_nearest(x, k);
    long n_one = 0;
    for (long i : nb) n_one += idx.label(i) == 1.0 ? 1 : 0;
    return 2 * n_one <= static_cast<long>(nb.size()) ? 0 : 1;
}

/// Zeta-majority rule, cases evaluated in order (first match wins):
///   1           if N1 - N0 >  zeta N_tot
///   coin        if |N1 - N0| <= 2 zeta^2 N_tot
///   0           otherwise.
/// An empty ball returns the coin. The caller supplies the fair-coin draw.
inline int zeta_majority_classify(const BallCounts& c, double zeta, int coin) {
    if (!(zeta > 0.0 && zeta < 0.25))
        throw std::invalid_argument("zeta_majority_classify: zeta outside (0, 1/4)");
    if (c.n_tot == 0) return coin;
    const double diff = static_cast<double>(c.n_one - c.n_zero);
    const double tot = static_cast<double>(c.n_tot);
    if (diff > zeta * tot) return 1;
    if (std::fabs(diff) <= 2.0 * zeta * zeta * tot) return coin;
    return 0;
}

/// Plain majority rule: 0 iff N1 <= N_tot / 2 (empty ball included).
inline int plain_majority_classify(const BallCounts& c) {
    return 2 * c.n_one <= c.n_tot ? 0 : 1;
}

/// Bayes rule on the limit field: 1 iff h(x) > 1/2 (strict).
inline int bayes_classify(const LabelField& labels, const Point& x) {
    return labels.limit_at(x) > 0.5 ? 1 : 0;
}

enum class RuleKind { knn_rule, zeta_majority, plain_majority, bayes };

inline const char* to_string(RuleKind k) {
    switch (k) {
        case RuleKind::knn_rule: return "knn";
        case RuleKind::zeta_majority: return "zeta_majority";
        case RuleKind::plain_majority: return "plain_majority";
        default: return "bayes";
    }
}

/// A classifier with its parameters resolved to concrete values.
struct ClassifierKind {
    RuleKind kind = RuleKind::plain_majority;
    long k = 0;                           // knn_rule
    double radius = 0.0;                  // zeta_majority, plain_majority
    double zeta = 0.0;                    // zeta_majority
    const LabelField* bayes_h = nullptr;  // bayes
};

/// Dispatch to the concrete rule. The zeta rule draws exactly one fair coin
/// from the coin substream per call, whether or not the near-tie case fires.
/// idx may be null for the Bayes rule.
inline int classify(const ClassifierKind& kind, const SpatialIndex* idx, const Point& x,
                    const SeedSpec& coin_seed) {
    if (kind.kind == RuleKind::bayes) return bayes_classify(*kind.bayes_h, x);
    if (idx == nullptr) throw std::invalid_argument("classify: rule requires a spatial index");
    switch (kind.kind) {
        case RuleKind::knn_rule:
            return knn_classify(*idx, x, kind.k);
        case RuleKind::zeta_majority: {
            Rng coin_rng(derive_seed(coin_seed));
            const int coin = coin_rng.coin();
            return zeta_majority_classify(idx->ball_counts(x, kind.radius), kind.zeta, coin);
        }
        default:
            return plain_majority_classify(idx->ball_counts(x, kind.radius));
    }
}

}  // namespace nonstat
