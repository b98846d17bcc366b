// Core domain types: points, samples, datasets, noise models, schedules,
// and deterministic seed derivation for reproducible substreams.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace nonstat {

// ---------------------------------------------------------------------------
// Geometry primitives

struct Point {
    std::vector<double> coords;

    Point() = default;
    explicit Point(std::vector<double> c) : coords(std::move(c)) {}
    Point(std::initializer_list<double> c) : coords(c) {}

    int dim() const { return static_cast<int>(coords.size()); }
    double operator[](int a) const { return coords[static_cast<std::size_t>(a)]; }
    double& operator[](int a) { return coords[static_cast<std::size_t>(a)]; }
};

inline double squared_distance(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.coords.size(); ++j) {
        const double t = a.coords[j] - b.coords[j];
        s += t * t;
    }
    return s;
}

inline double norm(const Point& a) {
    double s = 0.0;
    for (double c : a.coords) s += c * c;
    return std::sqrt(s);
}

/// Axis-aligned box; the support of every density in this library.
struct Box {
    std::vector<double> lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }

    double volume() const {
        double v = 1.0;
        for (int a = 0; a < dim(); ++a) v *= hi[a] - lo[a];
        return v;
    }

    bool contains(const Point& x) const {
        for (int a = 0; a < dim(); ++a)
            if (x[a] < lo[a] || x[a] > hi[a]) return false;
        return true;
    }

    bool operator==(const Box& o) const { return lo == o.lo && hi == o.hi; }
};

// ---------------------------------------------------------------------------
// Samples and datasets

enum class DataKind { regression, classification };

inline const char* to_string(DataKind k) {
    return k == DataKind::regression ? "regression" : "classification";
}

struct Sample {
    Point x;
    double y = 0.0;  // real observation (regression) or 0/1 label
    long index = 0;  // 1-based position in the stream
};

struct Dataset {
    DataKind kind = DataKind::regression;
    int dim = 0;
    std::vector<Sample> samples;

    long n() const { return static_cast<long>(samples.size()); }
};

struct ValidationIssue {
    long position = 0;  // 1-based position in the sample list
    std::string message;
};

/// Report-style invariant check; empty result means the dataset is valid.
inline std::vector<ValidationIssue> validate_dataset(const Dataset& ds) {
    std::vector<ValidationIssue> issues;
    if (ds.dim < 1)
        issues.push_back({0, "dimension must be at least 1"});
    for (std::size_t p = 0; p < ds.samples.size(); ++p) {
        const Sample& s = ds.samples[p];
        const long pos = static_cast<long>(p) + 1;
        if (s.index != pos)
            issues.push_back({pos, "non-consecutive index at position " + std::to_string(pos)});
        if (s.x.dim() != ds.dim)
            issues.push_back({pos, "dimension mismatch"});
        for (double c : s.x.coords)
            if (!std::isfinite(c)) {
                issues.push_back({pos, "non-finite coordinate"});
                break;
            }
        if (ds.kind == DataKind::classification) {
            if (s.y != 0.0 && s.y != 1.0)
                issues.push_back({pos, "label out of range"});
        } else if (!std::isfinite(s.y)) {
            issues.push_back({pos, "non-finite observation"});
        }
    }
    return issues;
}

// ---------------------------------------------------------------------------
// Seed derivation
//
// Every source of randomness is a substream addressed by (master seed,
// replication, stream role). Substreams are derived by collision-resistant
// mixing so that workers never share RNG state.

enum class Stream : std::uint64_t {
    features = 1,
    labels = 2,
    noise = 3,
    coin = 4,
    query = 5,
    indices = 6,  // index subsampling in the harness
};

struct SeedSpec {
    std::uint64_t master = 0;
    std::uint64_t replication = 0;
    Stream stream = Stream::features;
};

/// SplitMix64 finalizer; full-avalanche 64-bit mixing.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(const SeedSpec& s) {
    std::uint64_t h = mix64(s.master);
    h = mix64(h ^ mix64(s.replication + 1));
    h = mix64(h ^ mix64(static_cast<std::uint64_t>(s.stream) + 0x51ull));
    return h;
}

/// Deterministic RNG wrapper. All draws go through hand-rolled conversions
/// (never std::*_distribution) so that streams are bit-identical across
/// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t u64() { return eng_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    int coin() { return static_cast<int>(u64() & 1u); }

    /// Unbiased uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = u64();
        while (v >= limit) v = u64();
        return v % n;
    }

    /// Standard normal via Box-Muller (no cached spare, keeps draw count
    /// predictable).
    double gaussian() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::mt19937_64 eng_;
};

// ---------------------------------------------------------------------------
// Bounded zero-mean noise

enum class NoiseKind { uniform_symmetric, scaled_rademacher, truncated_centered };

inline const char* to_string(NoiseKind k) {
    switch (k) {
        case NoiseKind::uniform_symmetric: return "uniform_symmetric";
        case NoiseKind::scaled_rademacher: return "scaled_rademacher";
        default: return "truncated_centered";
    }
}

/// Bounded noise |N| <= bound with zero mean and closed-form variance.
/// truncated_centered is a centered normal with scale bound/2 truncated at
/// +-bound (two scale units), so the truncated-normal variance formula
/// sigma^2 (1 - 2 k phi(k) / (2 Phi(k) - 1)) applies with k = 2.
struct NoiseModel {
    NoiseKind kind = NoiseKind::uniform_symmetric;
    double bound = 0.3;

    double variance() const {
        if (bound == 0.0) return 0.0;
        switch (kind) {
            case NoiseKind::uniform_symmetric:
                return bound * bound / 3.0;
            case NoiseKind::scaled_rademacher:
                return bound * bound;
            case NoiseKind::truncated_centered: {
                const double sigma = bound / 2.0;
                const double k = 2.0;
                const double phi_k = std::exp(-0.5 * k * k) / std::sqrt(6.283185307179586476925286766559);
                const double mass = std::erf(k / std::sqrt(2.0));
                return sigma * sigma * (1.0 - 2.0 * k * phi_k / mass);
            }
        }
        return 0.0;
    }

    double draw(Rng& rng) const {
        if (bound == 0.0) return 0.0;
        switch (kind) {
            case NoiseKind::uniform_symmetric:
                return bound * (2.0 * rng.uniform() - 1.0);
            case NoiseKind::scaled_rademacher:
                return rng.coin() ? bound : -bound;
            case NoiseKind::truncated_centered: {
                const double sigma = bound / 2.0;
                for (;;) {
                    const double v = sigma * rng.gaussian();
                    if (std::fabs(v) <= bound) return v;
                }
            }
        }
        return 0.0;
    }
};

// ---------------------------------------------------------------------------
// Schedules

/// Neighbor-count and radius schedules plus the zeta-majority margin.
/// Defaults: k(n) = ceil(n^0.7), r(n) = n^{-1/(2d)}, zeta = 0.1.
struct Schedules {
    double k_exponent = 0.7;
    double k_coef = 1.0;
    double r_coef = 1.0;
    double zeta = 0.1;

    long k_of_n(long n) const {
        const double v = k_coef * std::pow(static_cast<double>(n), k_exponent);
        long k = static_cast<long>(std::ceil(v));
        return k < 1 ? 1 : k;
    }

    double r_of_n(long n, int d) const {
        return r_coef * std::pow(static_cast<double>(n), -1.0 / (2.0 * d));
    }
};

/// Finite-grid check of the asymptotic schedule conditions: k -> inf with
/// k/n -> 0, r_n -> 0 with n r_n^d / log n -> inf, and 0 < zeta < 1/4.
inline std::vector<std::string> validate_schedules(const Schedules& s, int d) {
    std::vector<std::string> issues;
    for (long n : {64L, 256L, 1024L, 4096L, 16384L}) {
        const long k1 = s.k_of_n(n), k4 = s.k_of_n(4 * n);
        if (k4 <= k1)
            issues.push_back("k(4n) <= k(n) at n=" + std::to_string(n));
        if (static_cast<double>(k4) / (4.0 * n) >= static_cast<double>(k1) / n)
            issues.push_back("k(n)/n not decreasing at n=" + std::to_string(n));
        const double r1 = s.r_of_n(n, d), r4 = s.r_of_n(4 * n, d);
        if (r4 >= r1)
            issues.push_back("r(4n) >= r(n) at n=" + std::to_string(n));
        const double g1 = n * std::pow(r1, d) / std::log(static_cast<double>(n));
        const double g4 = 4.0 * n * std::pow(r4, d) / std::log(4.0 * n);
        if (g4 <= g1)
            issues.push_back("n r^d / log n not increasing at n=" + std::to_string(n));
    }
    if (!(s.zeta > 0.0 && s.zeta < 0.25))
        issues.push_back("zeta outside (0, 1/4)");
    return issues;
}

}  // namespace nonstat
