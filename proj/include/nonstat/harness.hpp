// Monte Carlo experiment engine.
//
// T_n and average-variance estimates use unbiased index subsampling: per
// replication, prefix lengths i are drawn uniformly from {1..n}, the rule
// is built on the first i samples of one incrementally extended stream,
// and fresh queries are scored against the index-(i+1) generative state.
// Replications run in parallel on worker threads but are reduced in
// replication order, so output is bit-identical for any worker count.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "nonstat/classification.hpp"
#include "nonstat/oracles.hpp"
#include "nonstat/regression.hpp"
#include "nonstat/scenarios.hpp"

namespace nonstat {

struct ExperimentConfig {
    Scenario scenario;
    RuleKind rule = RuleKind::plain_majority;
    std::vector<long> n_grid;
    int replications = 200;
    int index_samples = 16;  // prefix lengths sampled per replication
    int queries = 8;         // fresh queries per sampled prefix
    std::uint64_t master_seed = 1;
    long grid_points = 0;  // oracle grid resolution, 0 = per-dimension default
    bool query_crn = false;  // common query random numbers across rules
    bool enumerate_indices = false;  // i = 1..n instead of uniform draws (tests)
    int threads = 0;  // 0 = NONSTAT_THREADS or hardware concurrency
    std::string output;

    void validate() const {
        if (n_grid.empty()) throw std::invalid_argument("config: n_grid must not be empty");
        for (std::size_t j = 0; j + 1 < n_grid.size(); ++j)
            if (n_grid[j] >= n_grid[j + 1])
                throw std::invalid_argument("config: n_grid must be strictly increasing");
        if (replications < 1 || index_samples < 1 || queries < 1)
            throw std::invalid_argument("config: replications, index_samples, queries must be >= 1");
    }
};

struct MetricRow {
    std::string scenario;
    std::string rule;
    long n = 0;
    double k_or_r = 0.0;
    double zeta = std::nan("");      // zeta rule only
    double estimate = 0.0;
    double se = 0.0;
    double target = 0.0;             // L* or sigma_N^2
    double gap = 0.0;                // estimate - target
    double rate_ref = std::nan("");  // (log k)^2 / k, regression only
    int replications = 0;
    std::uint64_t seed = 0;
};

using MetricSeries = std::vector<MetricRow>;

namespace detail {

inline int effective_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("NONSTAT_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

/// Runs fn(rep) for rep in [0, R) on worker threads; returns per-replication
/// results in replication order.
template <typename Fn>
std::vector<double> run_replications(int replications, int threads, Fn&& fn) {
    std::vector<double> out(static_cast<std::size_t>(replications), 0.0);
    const int workers = std::min(threads, replications);
    if (workers <= 1) {
        for (int rep = 0; rep < replications; ++rep) out[static_cast<std::size_t>(rep)] = fn(rep);
        return out;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (int rep = w; rep < replications; rep += workers)
                out[static_cast<std::size_t>(rep)] = fn(rep);
        });
    }
    for (auto& t : pool) t.join();
    return out;
}

inline std::pair<double, double> mean_and_se(const std::vector<double>& repl_means) {
    const double r = static_cast<double>(repl_means.size());
    double mean = 0.0;
    for (double v : repl_means) mean += v;
    mean /= r;
    if (repl_means.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : repl_means) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (r - 1.0));
    return {mean, sd / std::sqrt(r)};
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

/// Master seed for query/coin substreams: salted per rule unless common
/// random numbers across rules were requested.
inline std::uint64_t query_master(const ExperimentConfig& cfg, RuleKind rule) {
    if (cfg.query_crn) return cfg.master_seed;
    return mix64(cfg.master_seed ^ fnv1a64(to_string(rule)));
}

inline ClassifierKind resolve_rule(RuleKind rule, const Scenario& sc, long prefix) {
    ClassifierKind ck;
    ck.kind = rule;
    switch (rule) {
        case RuleKind::knn_rule:
            ck.k = sc.schedules.k_of_n(prefix);
            break;
        case RuleKind::zeta_majority:
            ck.radius = sc.schedules.r_of_n(prefix, sc.dim);
            ck.zeta = sc.schedules.zeta;
            break;
        case RuleKind::plain_majority:
            ck.radius = sc.schedules.r_of_n(prefix, sc.dim);
            break;
        case RuleKind::bayes:
            ck.bayes_h = &sc.labels;
            break;
    }
    return ck;
}

struct QueryContext {
    const SpatialIndex* index = nullptr;  // over the first `prefix` samples
    long prefix = 0;
    long query_counter = 0;  // per-replication, for coin keying
    SeedSpec coin_seed;
};

/// Generic subsampled-prefix loop shared by both estimators. loss must be
/// pure given (context, rng draws). needs_index skips index builds for
/// rules that never touch the data (the Bayes comparator, test doubles).
template <typename LossFn>
MetricRow estimate_metric(const ExperimentConfig& cfg, long n, bool needs_index, LossFn&& loss) {
    cfg.validate();
    const Scenario& sc = cfg.scenario;
    const std::uint64_t qmaster = query_master(cfg, cfg.rule);
    const int threads = effective_threads(cfg.threads);
    const long index_draws = cfg.enumerate_indices ? n : cfg.index_samples;

    auto one_replication = [&](int rep_i) -> double {
        const std::uint64_t rep = static_cast<std::uint64_t>(rep_i);
        const Dataset data = sample_stream(sc, n, {cfg.master_seed, rep, Stream::features});
        Rng index_rng(derive_seed({cfg.master_seed, rep, Stream::indices}));
        Rng query_rng(derive_seed({qmaster, rep, Stream::query}));
        double acc = 0.0;
        long counter = 0;
        for (long t = 0; t < index_draws; ++t) {
            const long prefix = cfg.enumerate_indices
                                    ? t + 1
                                    : 1 + static_cast<long>(index_rng.below(static_cast<std::uint64_t>(n)));
            std::optional<SpatialIndex> index;
            if (needs_index) index.emplace(data, prefix);
            for (int q = 0; q < cfg.queries; ++q) {
                QueryContext ctx;
                ctx.index = index ? &*index : nullptr;
                ctx.prefix = prefix;
                ctx.query_counter = counter++;
                ctx.coin_seed = {mix64(qmaster ^ static_cast<std::uint64_t>(ctx.query_counter)),
                                 rep, Stream::coin};
                acc += loss(ctx, query_rng);
            }
        }
        return acc / static_cast<double>(index_draws * cfg.queries);
    };

    const auto repl_means = run_replications(cfg.replications, threads, one_replication);
    const auto [mean, se] = mean_and_se(repl_means);

    MetricRow row;
    row.scenario = sc.name;
    row.rule = to_string(cfg.rule);
    row.n = n;
    row.estimate = mean;
    row.se = se;
    row.replications = cfg.replications;
    row.seed = cfg.master_seed;
    return row;
}

}  // namespace detail

/// Average error probability T_n for a classification scenario. The rule is
/// built on the first i samples (i uniform in 1..n) and scored on a fresh
/// query X ~ mu with label Y ~ Bernoulli(h_{i+1}(X)).
inline MetricRow estimate_Tn(const ExperimentConfig& cfg, long n) {
    const Scenario& sc = cfg.scenario;
    if (sc.kind != DataKind::classification)
        throw std::invalid_argument("estimate_Tn: classification scenario required");
    const bool needs_index = cfg.rule != RuleKind::bayes;
    MetricRow row = detail::estimate_metric(
        cfg, n, needs_index, [&](const detail::QueryContext& ctx, Rng& query_rng) -> double {
            Point x = rejection_sample([&](const Point& p) { return sc.density.limit_at(p); },
                                       sc.density.support, sc.density.envelope, query_rng);
            const int y = query_rng.bernoulli(sc.labels.at(ctx.prefix + 1, x)) ? 1 : 0;
            const ClassifierKind ck = detail::resolve_rule(cfg.rule, sc, ctx.prefix);
            const int pred = classify(ck, ctx.index, x, ctx.coin_seed);
            return pred != y ? 1.0 : 0.0;
        });
    const GridSpec grid = make_grid(sc.density.support, cfg.grid_points);
    row.target = bayes_error(sc.labels, sc.density, grid).value;
    row.gap = row.estimate - row.target;
    if (cfg.rule == RuleKind::knn_rule) {
        row.k_or_r = static_cast<double>(sc.schedules.k_of_n(n));
    } else if (cfg.rule == RuleKind::bayes) {
        row.k_or_r = std::nan("");
    } else {
        row.k_or_r = sc.schedules.r_of_n(n, sc.dim);
        if (cfg.rule == RuleKind::zeta_majority) row.zeta = sc.schedules.zeta;
    }
    return row;
}

/// Average prediction variance (1/n) sum E(Y_i - Z_i)^2 for a regression
/// scenario with the k-NN regressor. Queries are drawn from (f_{i+1}, h,
/// noise); the target column is sigma_N^2.
inline MetricRow estimate_avg_variance(const ExperimentConfig& cfg, long n) {
    const Scenario& sc = cfg.scenario;
    if (sc.kind != DataKind::regression)
        throw std::invalid_argument("estimate_avg_variance: regression scenario required");
    MetricRow row = detail::estimate_metric(
        cfg, n, true, [&](const detail::QueryContext& ctx, Rng& query_rng) -> double {
            Point x = rejection_sample(
                [&](const Point& p) { return sc.density.at(ctx.prefix + 1, p); },
                sc.density.support, sc.density.envelope, query_rng);
            const double y = sc.labels.limit_at(x) + sc.noise.draw(query_rng);
            const long k = sc.schedules.k_of_n(ctx.prefix);
            const double z = knn_regress(*ctx.index, x, k).value;
            return (y - z) * (y - z);
        });
    row.rule = "knn";
    row.target = sc.noise.variance();
    row.gap = row.estimate - row.target;
    const long k_n = sc.schedules.k_of_n(n);
    row.k_or_r = static_cast<double>(k_n);
    row.rate_ref = k_n >= 2 ? rate_bound(k_n, 1.0).bound : std::nan("");
    return row;
}

/// One row per n in the configured grid.
inline MetricSeries convergence_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    MetricSeries series;
    series.reserve(cfg.n_grid.size());
    for (long n : cfg.n_grid)
        series.push_back(cfg.scenario.kind == DataKind::classification
                             ? estimate_Tn(cfg, n)
                             : estimate_avg_variance(cfg, n));
    return series;
}

// ---------------------------------------------------------------------------
// Ergodic-condition report

struct ConditionReport {
    std::string scenario;
    ErgodicMode declared = ErgodicMode::absolute_cesaro;
    std::vector<long> n_values;
    std::vector<double> absolute_gap;  // label field, absolute mode
    std::vector<double> signed_gap;    // label field, signed mode
    std::vector<double> density_gap;
    std::string label;  // theorem-satisfying | lemma-only | violating
    bool matches_declared = false;
};

inline const char* condition_label(ErgodicMode m) {
    switch (m) {
        case ErgodicMode::absolute_cesaro: return "theorem-satisfying";
        case ErgodicMode::signed_cesaro: return "lemma-only";
        default: return "violating";
    }
}

/// Evaluates the Cesaro gaps at each n and labels the scenario. A gap
/// sequence counts as vanishing when the value at the largest n fell to a
/// quarter of the value at the smallest (or is zero outright).
inline ConditionReport condition_report(const Scenario& sc, std::vector<long> n_values,
                                        const GridSpec& grid) {
    if (n_values.empty()) n_values = {100, 1000, 10000};
    ConditionReport rep;
    rep.scenario = sc.name;
    rep.declared = sc.declared_mode;
    rep.n_values = n_values;
    for (long n : n_values) {
        rep.absolute_gap.push_back(cesaro_label_gap(sc.labels, n, grid, GapMode::absolute));
        rep.signed_gap.push_back(cesaro_label_gap(sc.labels, n, grid, GapMode::signed_mode));
        rep.density_gap.push_back(cesaro_density_gap(sc.density, n, grid));
    }
    auto vanishing = [](const std::vector<double>& g) {
        const double first = g.front(), last = g.back();
        return last <= std::max(0.25 * first, 1e-9);
    };
    const bool dens_ok = vanishing(rep.density_gap);
    const bool abs_ok = vanishing(rep.absolute_gap);
    const bool signed_ok = vanishing(rep.signed_gap);
    ErgodicMode observed;
    if (dens_ok && abs_ok)
        observed = ErgodicMode::absolute_cesaro;
    else if (dens_ok && signed_ok)
        observed = ErgodicMode::signed_cesaro;
    else
        observed = ErgodicMode::violating;
    rep.label = condition_label(observed);
    rep.matches_declared = observed == rep.declared;
    return rep;
}

}  // namespace nonstat
