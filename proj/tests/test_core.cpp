#include <gtest/gtest.h>

#include <cmath>
#include <unordered_set>

#include "nonstat/core.hpp"

using namespace nonstat;

namespace {

Dataset small_regression_dataset() {
    Dataset ds;
    ds.kind = DataKind::regression;
    ds.dim = 1;
    ds.samples = {{Point{0.1}, 1.0, 1}, {Point{0.5}, 2.0, 2}, {Point{0.9}, 0.5, 3}};
    return ds;
}

}  // namespace

TEST(ValidateDataset, ValidDatasetGivesEmptyReport) {
    EXPECT_TRUE(validate_dataset(small_regression_dataset()).empty());
}

TEST(ValidateDataset, LabelOutOfRangeIsNamed) {
    Dataset ds;
    ds.kind = DataKind::classification;
    ds.dim = 1;
    ds.samples = {{Point{0.1}, 0.0, 1}, {Point{0.2}, 2.0, 2}, {Point{0.3}, 1.0, 3}};
    const auto report = validate_dataset(ds);
    ASSERT_EQ(report.size(), 1u);
    EXPECT_EQ(report[0].position, 2);
    EXPECT_EQ(report[0].message, "label out of range");
}

TEST(ValidateDataset, NonConsecutiveIndexIsNamed) {
    Dataset ds;
    ds.kind = DataKind::regression;
    ds.dim = 1;
    ds.samples = {{Point{0.1}, 1.0, 1}, {Point{0.2}, 1.0, 3}};
    const auto report = validate_dataset(ds);
    ASSERT_EQ(report.size(), 1u);
    EXPECT_EQ(report[0].message, "non-consecutive index at position 2");
}

TEST(ValidateDataset, DimensionMismatchReported) {
    Dataset ds;
    ds.kind = DataKind::regression;
    ds.dim = 2;
    ds.samples = {{Point{0.1, 0.2}, 1.0, 1}, {Point{0.3}, 1.0, 2}};
    const auto report = validate_dataset(ds);
    ASSERT_EQ(report.size(), 1u);
    EXPECT_EQ(report[0].message, "dimension mismatch");
}

TEST(DeriveSeed, Deterministic) {
    const SeedSpec spec{123456789ull, 7, Stream::noise};
    EXPECT_EQ(derive_seed(spec), derive_seed(spec));
}

// Exhaustive oracle: across many masters, distinct streams and distinct
// replications must never collide.
TEST(DeriveSeed, StreamsAndReplicationsSeparate) {
    const Stream streams[] = {Stream::features, Stream::labels, Stream::noise,
                              Stream::coin,     Stream::query,  Stream::indices};
    Rng rng(0xABCDEFull);
    std::unordered_set<std::uint64_t> seen;
    const int masters = 10000;
    for (int m = 0; m < masters; ++m) {
        const std::uint64_t master = rng.u64();
        for (Stream s : streams) seen.insert(derive_seed({master, 0, s}));
        EXPECT_NE(derive_seed({master, 0, Stream::features}),
                  derive_seed({master, 1, Stream::features}));
    }
    EXPECT_EQ(seen.size(), static_cast<std::size_t>(masters) * 6);
}

TEST(Rng, UniformInUnitIntervalAndReproducible) {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        EXPECT_EQ(u, b.uniform());
    }
}

TEST(Rng, BelowIsInRange) {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) EXPECT_LT(rng.below(13), 13u);
}

TEST(NoiseModel, ClosedFormVariances) {
    EXPECT_NEAR((NoiseModel{NoiseKind::uniform_symmetric, 0.3}.variance()), 0.03, 1e-15);
    EXPECT_NEAR((NoiseModel{NoiseKind::scaled_rademacher, 0.3}.variance()), 0.09, 1e-15);
    // truncated normal at two scale units: sigma^2 (1 - 2k phi(k)/(2Phi(k)-1))
    const double sigma2 = 0.15 * 0.15;
    const double phi2 = std::exp(-2.0) / std::sqrt(2.0 * 3.14159265358979323846);
    const double expected = sigma2 * (1.0 - 4.0 * phi2 / std::erf(std::sqrt(2.0)));
    EXPECT_NEAR((NoiseModel{NoiseKind::truncated_centered, 0.3}.variance()), expected, 1e-15);
}

TEST(NoiseModel, EmpiricalMomentsMatch) {
    for (NoiseKind kind :
         {NoiseKind::uniform_symmetric, NoiseKind::scaled_rademacher, NoiseKind::truncated_centered}) {
        const NoiseModel model{kind, 0.3};
        Rng rng(derive_seed({99, 0, Stream::noise}));
        const long draws = 1000000;
        double sum = 0.0, sumsq = 0.0;
        for (long i = 0; i < draws; ++i) {
            const double v = model.draw(rng);
            ASSERT_LE(std::fabs(v), model.bound);
            sum += v;
            sumsq += v * v;
        }
        const double mean = sum / draws;
        const double var = sumsq / draws - mean * mean;
        const double sigma = std::sqrt(model.variance());
        EXPECT_LE(std::fabs(mean), 4.0 * sigma / 1000.0) << to_string(kind);
        EXPECT_NEAR(var, model.variance(), 0.01 * model.variance()) << to_string(kind);
    }
}

TEST(NoiseModel, ZeroBoundIsNoiseless) {
    const NoiseModel model{NoiseKind::uniform_symmetric, 0.0};
    Rng rng(1);
    EXPECT_EQ(model.draw(rng), 0.0);
    EXPECT_EQ(model.variance(), 0.0);
}

TEST(Schedules, DefaultSatisfiesGrowthConditions) {
    const Schedules s;
    EXPECT_TRUE(validate_schedules(s, 1).empty());
    EXPECT_TRUE(validate_schedules(s, 2).empty());
}

TEST(Schedules, LinearNeighborCountIsRejected) {
    Schedules s;
    s.k_exponent = 1.0;  // k/n no longer vanishes
    EXPECT_FALSE(validate_schedules(s, 1).empty());
}

TEST(Schedules, ZetaOutsideIntervalIsRejected) {
    Schedules s;
    s.zeta = 0.3;
    EXPECT_FALSE(validate_schedules(s, 1).empty());
}

TEST(Schedules, DefaultValuesMatchContract) {
    const Schedules s;
    EXPECT_EQ(s.k_of_n(1000), static_cast<long>(std::ceil(std::pow(1000.0, 0.7))));
    EXPECT_NEAR(s.r_of_n(10000, 1), std::pow(10000.0, -0.5), 1e-15);
    EXPECT_NEAR(s.r_of_n(10000, 2), std::pow(10000.0, -0.25), 1e-15);
}
