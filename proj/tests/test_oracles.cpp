#include <gtest/gtest.h>

#include <cmath>

#include "nonstat/oracles.hpp"
#include "nonstat/scenarios.hpp"

using namespace nonstat;

namespace {

const Box kUnit{{0.0}, {1.0}};

DensityFamily uniform_family() {
    DensityFamily f;
    f.base = [](const Point& x) { return (x[0] >= 0.0 && x[0] <= 1.0) ? 1.0 : 0.0; };
    f.support = kUnit;
    f.c1 = f.c2 = f.envelope = 1.0;
    return f;
}

LabelField plain_field(FieldFn h) {
    LabelField f;
    f.limit = std::move(h);
    return f;
}

}  // namespace

TEST(BayesError, DegenerateFields) {
    const DensityFamily f = uniform_family();
    const GridSpec grid = make_grid(kUnit);
    EXPECT_EQ(bayes_error(plain_field([](const Point&) { return 0.0; }), f, grid).value, 0.0);
    EXPECT_NEAR(bayes_error(plain_field([](const Point&) { return 0.5; }), f, grid).value, 0.5, 1e-12);
}

TEST(BayesError, LinearFieldMatchesClosedForm) {
    // integral of min(x, 1-x) over [0,1] is 1/4; checked at two resolutions.
    const DensityFamily f = uniform_family();
    const LabelField h = plain_field([](const Point& x) { return x[0]; });
    const double v1 = bayes_error(h, f, make_grid(kUnit, 4096)).value;
    const double v2 = bayes_error(h, f, make_grid(kUnit, 8192)).value;
    EXPECT_NEAR(v1, 0.25, 1e-6);
    EXPECT_NEAR(v2, 0.25, 1e-6);
}

TEST(BayesError, HalfMinusAbsIdentity) {
    // min(a, 1-a) = 1/2 - |a - 1/2| pointwise, so the quadratures agree.
    const Scenario sc = make_scenario("iid_class");
    const GridSpec grid = make_grid(kUnit);
    const double direct = bayes_error(sc.labels, sc.density, grid).value;
    const double via_abs =
        0.5 - quadrature(grid, [&](const Point& x) {
                  return std::fabs(sc.labels.limit_at(x) - 0.5) * sc.density.limit_at(x);
              }).value;
    EXPECT_NEAR(direct, via_abs, 1e-12);
    EXPECT_GE(direct, 0.0);
    EXPECT_LE(direct, 0.5);
}

TEST(BayesError, RefinementDeltaBoundsNextRefinement) {
    const Scenario sc = make_scenario("iid_class");
    const QuadResult at512 = bayes_error(sc.labels, sc.density, make_grid(kUnit, 512));
    const QuadResult at1024 = bayes_error(sc.labels, sc.density, make_grid(kUnit, 1024));
    EXPECT_LT(std::fabs(at1024.value - at512.value), at512.refinement_delta);
}

TEST(MStarFinite, ConstantFamilyEqualsBayesError) {
    const Scenario sc = make_scenario("iid_class");
    const GridSpec grid = make_grid(kUnit);
    EXPECT_EQ(m_star_finite(sc.labels, 50, sc.density, grid).value,
              bayes_error(sc.labels, sc.density, grid).value);
}

TEST(MStarFinite, TwoTermAverage) {
    // h_1 = 0, h_2 = 1/2 via an alternating +-1/4 perturbation around 1/4.
    LabelField f;
    f.limit = [](const Point&) { return 0.25; };
    f.bump = [](const Point&) { return 1.0; };
    f.perturbation = LabelPerturbation::alternating;
    f.amplitude = 0.25;
    const GridSpec grid = make_grid(kUnit);
    EXPECT_NEAR(m_star_finite(f, 2, uniform_family(), grid).value, 0.25, 1e-12);
}

TEST(MStarFinite, MonteCarloCrossCheck) {
    // Independent oracle: draw X ~ uniform and i ~ Unif(1..n), average
    // min(h_i(X), 1 - h_i(X)) over one million draws.
    const Scenario sc = make_scenario("decay_class");
    const long n = 100;
    const GridSpec grid = make_grid(kUnit);
    const double quad = m_star_finite(sc.labels, n, sc.density, grid).value;
    Rng rng(derive_seed({404, 0, Stream::query}));
    const long draws = 1000000;
    double sum = 0.0, sumsq = 0.0;
    for (long t = 0; t < draws; ++t) {
        const Point x{rng.uniform()};
        const long i = 1 + static_cast<long>(rng.below(n));
        const double h = sc.labels.at(i, x);
        const double v = std::min(h, 1.0 - h);
        sum += v;
        sumsq += v * v;
    }
    const double mc = sum / draws;
    const double se = std::sqrt((sumsq / draws - mc * mc) / draws);
    EXPECT_NEAR(quad, mc, 4.0 * se + 1e-4);
}

TEST(MStarFinite, ApproachesBayesErrorUnderAbsoluteCondition) {
    // |M_n - L*| <= absolute Cesaro gap at n, up to quadrature error.
    const Scenario sc = make_scenario("decay_class");
    const GridSpec grid = make_grid(kUnit);
    const double lstar = bayes_error(sc.labels, sc.density, grid).value;
    for (long n : {100L, 1000L, 10000L}) {
        const double m = m_star_finite(sc.labels, n, sc.density, grid).value;
        const double gap = cesaro_label_gap(sc.labels, n, grid, GapMode::absolute);
        EXPECT_LE(std::fabs(m - lstar), gap + 1e-9) << "n=" << n;
    }
}

TEST(MarginMass, DegenerateAndLinearCases) {
    const DensityFamily f = uniform_family();
    const GridSpec grid = make_grid(kUnit);
    EXPECT_EQ(margin_mass(plain_field([](const Point&) { return 0.9; }), f, 0.2, grid).value, 0.0);
    // h == 1/2 everywhere: the band excludes the point 1/2 itself.
    EXPECT_EQ(margin_mass(plain_field([](const Point&) { return 0.5; }), f, 0.2, grid).value, 0.0);
    // h(x) = x: preimage length is 2 zeta (the single point 1/2 has measure zero).
    EXPECT_NEAR(margin_mass(plain_field([](const Point& x) { return x[0]; }), f, 0.1, grid).value,
                0.2, 1e-3);
}

TEST(MarginMass, NonDecreasingInZeta) {
    const Scenario sc = make_scenario("iid_class");
    const GridSpec grid = make_grid(kUnit);
    double prev = 0.0;
    for (double zeta : {0.01, 0.05, 0.1, 0.2}) {
        const double b = margin_mass(sc.labels, sc.density, zeta, grid).value;
        EXPECT_GE(b, prev);
        prev = b;
    }
}

TEST(CesaroDensityGap, IdenticalFamilyHasZeroGap) {
    const Scenario sc = make_scenario("smooth_iid_reg");
    const GridSpec grid = make_grid(kUnit);
    EXPECT_EQ(cesaro_density_gap(sc.density, 100, grid), 0.0);
}

TEST(CesaroDensityGap, DecayingMixtureGapShrinks) {
    const Scenario sc = make_scenario("drift_reg");
    const GridSpec grid = make_grid(kUnit);
    const double g100 = cesaro_density_gap(sc.density, 100, grid);
    const double g10k = cesaro_density_gap(sc.density, 10000, grid);
    EXPECT_GT(g100, g10k);
    EXPECT_GT(g10k, 0.0);
}

TEST(CesaroDensityGap, SingleTermIsSupDifference) {
    const Scenario sc = make_scenario("drift_reg");
    const GridSpec grid = make_grid(kUnit);
    // n = 1 means f_1 = q (beta_1 = 1): the gap is sup|q - f| on the grid.
    const double expected = detail::grid_max(grid, [&](const Point& x) {
        return std::fabs(sc.density.alt(x) - sc.density.base(x));
    });
    EXPECT_EQ(cesaro_density_gap(sc.density, 1, grid), expected);
    EXPECT_NEAR(expected, 0.9, 1e-5);
}

TEST(CesaroLabelGap, IdenticalFieldsHaveZeroGap) {
    const Scenario sc = make_scenario("iid_class");
    const GridSpec grid = make_grid(kUnit);
    EXPECT_EQ(cesaro_label_gap(sc.labels, 100, grid, GapMode::absolute), 0.0);
    EXPECT_EQ(cesaro_label_gap(sc.labels, 100, grid, GapMode::signed_mode), 0.0);
}

TEST(CesaroLabelGap, AlternatingCancelsOnlyInSignedMode) {
    const Scenario sc = make_scenario("alternating_class");
    const GridSpec grid = make_grid(kUnit);
    const double sup_bump =
        detail::grid_max(grid, [&](const Point& x) { return std::fabs(sc.labels.bump(x)); });
    for (long n : {100L, 10000L}) {
        EXPECT_EQ(cesaro_label_gap(sc.labels, n, grid, GapMode::signed_mode), 0.0);
        EXPECT_EQ(cesaro_label_gap(sc.labels, n, grid, GapMode::absolute),
                  sc.labels.amplitude * sup_bump);
    }
    EXPECT_NEAR(sup_bump, 1.0, 1e-4);
}

TEST(CesaroLabelGap, DecayingAmplitudeShrinks) {
    const Scenario sc = make_scenario("decay_class");
    const GridSpec grid = make_grid(kUnit);
    EXPECT_LT(cesaro_label_gap(sc.labels, 10000, grid, GapMode::absolute),
              cesaro_label_gap(sc.labels, 100, grid, GapMode::absolute));
}

TEST(ChernoffTail, HandEnumeratedSmallCases) {
    // r = 10, p = 1/2, gamma = 1/2: tail set {0,1,2,8,9,10}, mass 112/1024.
    const TailCheckResult a = chernoff_tail_check(0.5, 10, 0.5);
    EXPECT_NEAR(a.exact_tail, 112.0 / 1024.0, 1e-12);
    EXPECT_NEAR(a.bound, 2.0 * std::exp(-5.0 / 16.0), 1e-12);
    EXPECT_TRUE(a.holds);  // bound above 1, trivially

    // r = 4, p = 1/2, gamma = 1/2: tail set {0,1,3,4}, mass 10/16.
    const TailCheckResult b = chernoff_tail_check(0.5, 4, 0.5);
    EXPECT_NEAR(b.exact_tail, 10.0 / 16.0, 1e-12);
}

TEST(ChernoffTail, MidSizeCase) {
    const TailCheckResult res = chernoff_tail_check(0.5, 1000, 0.2);
    EXPECT_TRUE(res.holds);
    EXPECT_GT(res.exact_tail, 0.0);
    EXPECT_LT(res.exact_tail, res.bound);
    // Independent long-double route over the same tail set.
    long double tail = 0.0L;
    const long double log_half = std::log(0.5L);
    for (long j = 0; j <= 1000; ++j) {
        if (std::fabs(static_cast<double>(j) - 500.0) < 100.0) continue;
        const long double lterm = std::lgamma(1001.0L) - std::lgamma(j + 1.0L) -
                                  std::lgamma(1001.0L - j) + 1000.0L * log_half;
        tail += std::exp(lterm);
    }
    EXPECT_NEAR(res.exact_tail, static_cast<double>(tail), 1e-12);
}

TEST(ChernoffTail, FullSweepHolds) {
    const auto results = chernoff_tail_sweep();
    EXPECT_EQ(results.size(), 9u * 4u * 4u);
    for (const auto& res : results) {
        EXPECT_TRUE(res.holds) << "p=" << res.p << " r=" << res.r << " gamma=" << res.gamma;
        EXPECT_GE(res.exact_tail, 0.0);
        EXPECT_LE(res.exact_tail, 1.0 + 1e-12);
    }
}

TEST(TruncatedVariance, InteriorFieldsGiveNoiseVariance) {
    const Scenario sc = make_scenario("smooth_iid_reg");
    const GridSpec grid = make_grid(kUnit);
    const double s2 = sc.noise.variance();
    // f = 1 and h in [0.5, 1.5] both sit inside (0.1, 10): empty complement.
    EXPECT_EQ(truncated_variance_target(sc.labels, sc.density, s2, 0.1, grid).value, s2);
}

TEST(TruncatedVariance, FullMassWhenFieldBelowThreshold) {
    const LabelField h = plain_field([](const Point&) { return 0.05; });  // = zeta/2
    const GridSpec grid = make_grid(kUnit);
    const QuadResult q = truncated_variance_target(h, uniform_family(), 0.03, 0.1, grid);
    EXPECT_NEAR(q.value, 0.03 + 1.0, 1e-9);
}

TEST(TruncatedVariance, ShrinksTowardNoiseVarianceAsZetaVanishes) {
    const Scenario sc = make_scenario("wireless_power");
    const GridSpec grid = make_grid(sc.density.support, 128);
    const double s2 = sc.noise.variance();
    double prev = 2.0;
    for (double zeta : {0.1, 0.01, 0.001}) {
        const double v = truncated_variance_target(sc.labels, sc.density, s2, zeta, grid).value;
        EXPECT_LE(v, prev);
        prev = v;
    }
    EXPECT_NEAR(prev, s2, 0.02);
}
