// Command-line front end: config loading, experiment dispatch, CSV
// emission and the exit-code contract (0 ok, 1 config error, 2 runtime
// failure, 3 failed --assert check).

#pragma once

#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nonstat/config.hpp"
#include "nonstat/csv.hpp"
#include "nonstat/harness.hpp"

namespace nonstat {

namespace cli_detail {

struct AssertSpec {
    bool gap_positive = false;
    bool gap_decreasing = false;
    double final_gap_max = std::nan("");   // off when NaN
    double rate_band_factor = 0.0;         // off when 0
    bool floor_mstar = false;
    bool lemma_band = false;
    bool negative_control = false;
    bool any() const {
        return gap_positive || gap_decreasing || !std::isnan(final_gap_max) ||
               rate_band_factor > 0.0 || floor_mstar || lemma_band || negative_control;
    }
};

struct LoadedConfig {
    ExperimentConfig experiment;
    AssertSpec asserts;
    std::vector<long> condition_n;
    ScenarioOverrides overrides;
    std::string scenario_name;
};

inline RuleKind parse_rule(const std::string& name) {
    if (name == "knn") return RuleKind::knn_rule;
    if (name == "zeta_majority") return RuleKind::zeta_majority;
    if (name == "plain_majority") return RuleKind::plain_majority;
    if (name == "bayes") return RuleKind::bayes;
    throw ConfigError("unknown rule: " + name);
}

inline LoadedConfig load_experiment(const std::string& path) {
    const ConfigNode node = load_config_file(path);
    ConfigBinder bind(node);
    LoadedConfig out;

    out.scenario_name = bind.require_string("scenario");
    ConfigBinder& ov = bind.child("overrides");
    if (ov.has("noise_bound")) out.overrides.noise_bound = ov.get_double("noise_bound", 0.0);
    if (ov.has("zeta")) out.overrides.zeta = ov.get_double("zeta", 0.0);
    if (ov.has("k_exponent")) out.overrides.k_exponent = ov.get_double("k_exponent", 0.0);
    if (ov.has("k_coef")) out.overrides.k_coef = ov.get_double("k_coef", 0.0);
    if (ov.has("r_coef")) out.overrides.r_coef = ov.get_double("r_coef", 0.0);

    ExperimentConfig& cfg = out.experiment;
    cfg.scenario = make_scenario(out.scenario_name, out.overrides);
    cfg.rule = parse_rule(bind.get_string(
        "rule", cfg.scenario.kind == DataKind::regression ? "knn" : "plain_majority"));
    cfg.n_grid = bind.get_longs("n_grid", {1000, 4000, 16000});
    cfg.replications = static_cast<int>(bind.get_long("replications", 200));
    cfg.master_seed = static_cast<std::uint64_t>(bind.get_long("seed", 1));
    cfg.output = bind.get_string("output", "");

    ConfigBinder& h = bind.child("harness");
    cfg.index_samples = static_cast<int>(h.get_long("index_samples", 16));
    cfg.queries = static_cast<int>(h.get_long("queries", 8));
    cfg.query_crn = h.get_bool("query_crn", false);
    cfg.threads = static_cast<int>(h.get_long("threads", 0));

    ConfigBinder& g = bind.child("oracle_grid");
    cfg.grid_points = g.get_long("points_per_axis", 0);

    out.condition_n = bind.get_longs("condition_n", {100, 1000, 10000});

    ConfigBinder& a = bind.child("assert");
    out.asserts.gap_positive = a.get_bool("gap_positive", false);
    out.asserts.gap_decreasing = a.get_bool("gap_decreasing", false);
    out.asserts.final_gap_max = a.get_double("final_gap_max", std::nan(""));
    out.asserts.rate_band_factor = a.get_double("rate_band_factor", 0.0);
    out.asserts.floor_mstar = a.get_bool("floor_mstar", false);
    out.asserts.lemma_band = a.get_bool("lemma_band", false);
    out.asserts.negative_control = a.get_bool("negative_control", false);

    bind.finish();
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return out;
}

/// Every run logs the fully materialized configuration, so the emitted CSV
/// is reproducible from the log alone.
inline void log_resolved_config(const LoadedConfig& lc, std::ostream& os) {
    const ExperimentConfig& cfg = lc.experiment;
    const Scenario& sc = cfg.scenario;
    os << "# resolved-config scenario=" << sc.name << " kind=" << to_string(sc.kind)
       << " rule=" << to_string(cfg.rule) << " n_grid=";
    for (std::size_t j = 0; j < cfg.n_grid.size(); ++j)
        os << (j ? "," : "") << cfg.n_grid[j];
    os << " replications=" << cfg.replications << " index_samples=" << cfg.index_samples
       << " queries=" << cfg.queries << " query_crn=" << (cfg.query_crn ? "true" : "false")
       << " seed=" << cfg.master_seed << " grid_points_per_axis="
       << (cfg.grid_points > 0 ? cfg.grid_points : default_points_per_axis(sc.dim))
       << " noise_kind=" << to_string(sc.noise.kind) << " noise_bound=" << sc.noise.bound
       << " k_exponent=" << sc.schedules.k_exponent << " k_coef=" << sc.schedules.k_coef
       << " r_coef=" << sc.schedules.r_coef << " zeta=" << sc.schedules.zeta
       << " output=" << (cfg.output.empty() ? "(stdout)" : cfg.output) << "\n";
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Evaluates the configured acceptance checks against a finished series.
/// Returns the number of failed checks and prints one line per check.
inline int evaluate_asserts(const MetricSeries& series, const ExperimentConfig& cfg,
                            const AssertSpec& spec, std::ostream& os) {
    int failures = 0;
    auto report = [&](const std::string& name, bool ok, const std::string& detail) {
        os << (ok ? "ASSERT PASS " : "ASSERT FAIL ") << name << ": " << detail << "\n";
        if (!ok) ++failures;
    };
    const MetricRow& last = series.back();
    if (spec.gap_positive) {
        bool ok = true;
        for (const auto& r : series) ok = ok && r.gap > 0.0;
        report("gap_positive", ok, "all gaps > 0");
    }
    if (spec.gap_decreasing) {
        bool ok = true;
        for (std::size_t j = 0; j + 1 < series.size(); ++j)
            ok = ok && series[j + 1].gap < series[j].gap;
        report("gap_decreasing", ok, "gap strictly decreasing along n_grid");
    }
    if (!std::isnan(spec.final_gap_max)) {
        const bool ok = last.gap <= spec.final_gap_max;
        report("final_gap_max", ok,
               "gap(" + std::to_string(last.n) + ") = " + format_csv_number(last.gap) +
                   " vs limit " + format_csv_number(spec.final_gap_max));
    }
    if (spec.rate_band_factor > 0.0) {
        std::vector<double> ratios;
        for (const auto& r : series)
            if (!std::isnan(r.rate_ref) && r.rate_ref > 0.0) ratios.push_back(r.gap / r.rate_ref);
        bool ok = !ratios.empty();
        const double med = ok ? median(ratios) : 0.0;
        for (double q : ratios)
            ok = ok && q <= spec.rate_band_factor * med && q >= med / spec.rate_band_factor;
        report("rate_band", ok,
               "gap/rate_ref within factor " + format_csv_number(spec.rate_band_factor) +
                   " of median " + format_csv_number(med));
    }
    const GridSpec grid = make_grid(cfg.scenario.density.support, cfg.grid_points);
    if (spec.floor_mstar) {
        bool ok = true;
        std::string detail;
        for (const auto& r : series) {
            const double m = m_star_finite(cfg.scenario.labels, r.n, cfg.scenario.density, grid).value;
            if (r.estimate < m - 3.0 * r.se) {
                ok = false;
                detail = "estimate(" + std::to_string(r.n) + ") below M_n - 3se";
            }
        }
        report("floor_mstar", ok, ok ? "estimate >= M_n - 3se at every n" : detail);
    }
    if (spec.lemma_band) {
        const double b =
            margin_mass(cfg.scenario.labels, cfg.scenario.density, cfg.scenario.schedules.zeta, grid)
                .value;
        const bool ok = last.estimate <= last.target + b + 3.0 * last.se;
        report("lemma_band", ok,
               "T_n = " + format_csv_number(last.estimate) + " vs L* + b(zeta) + 3se = " +
                   format_csv_number(last.target + b + 3.0 * last.se));
    }
    if (spec.negative_control) {
        const bool ok = std::fabs(last.gap) > 3.0 * last.se;
        report("negative_control", ok,
               "|gap| = " + format_csv_number(std::fabs(last.gap)) + " vs 3se = " +
                   format_csv_number(3.0 * last.se));
    }
    return failures;
}

inline int run_simulation(const std::string& config_path, DataKind expected_kind, bool with_assert) {
    const LoadedConfig lc = load_experiment(config_path);
    if (lc.experiment.scenario.kind != expected_kind)
        throw ConfigError("scenario '" + lc.scenario_name + "' is a " +
                          to_string(lc.experiment.scenario.kind) + " scenario");
    if (expected_kind == DataKind::regression && lc.experiment.rule != RuleKind::knn_rule)
        throw ConfigError("regression experiments use the knn rule");
    log_resolved_config(lc, std::cerr);
    const MetricSeries series = convergence_sweep(lc.experiment);
    if (lc.experiment.output.empty())
        write_csv(series, std::cout);
    else
        write_csv_file(series, lc.experiment.output);
    if (with_assert && evaluate_asserts(series, lc.experiment, lc.asserts, std::cout) > 0)
        return 3;
    return 0;
}

inline int run_check_conditions(const std::string& config_path, bool with_assert) {
    const LoadedConfig lc = load_experiment(config_path);
    const Scenario& sc = lc.experiment.scenario;
    log_resolved_config(lc, std::cerr);
    const GridSpec grid = make_grid(sc.density.support, lc.experiment.grid_points);
    const ConditionReport rep = condition_report(sc, lc.condition_n, grid);
    std::cout << "scenario " << rep.scenario << " (declared "
              << condition_label(rep.declared) << ")\n";
    for (std::size_t j = 0; j < rep.n_values.size(); ++j) {
        std::cout << "  n=" << rep.n_values[j] << " absolute_gap="
                  << format_csv_number(rep.absolute_gap[j])
                  << " signed_gap=" << format_csv_number(rep.signed_gap[j])
                  << " density_gap=" << format_csv_number(rep.density_gap[j]) << "\n";
    }
    std::cout << rep.label << "\n";
    if (with_assert && !rep.matches_declared) {
        std::cout << "ASSERT FAIL condition_label: observed " << rep.label << ", declared "
                  << condition_label(rep.declared) << "\n";
        return 3;
    }
    return 0;
}

inline int run_oracle(const std::string& config_path) {
    const LoadedConfig lc = load_experiment(config_path);
    const Scenario& sc = lc.experiment.scenario;
    const GridSpec grid = make_grid(sc.density.support, lc.experiment.grid_points);
    log_resolved_config(lc, std::cerr);
    if (sc.kind == DataKind::classification) {
        const QuadResult lstar = bayes_error(sc.labels, sc.density, grid);
        std::cout << "L* = " << format_csv_number(lstar.value)
                  << " (refinement_delta " << format_csv_number(lstar.refinement_delta) << ")\n";
        for (long n : lc.experiment.n_grid) {
            const QuadResult m = m_star_finite(sc.labels, n, sc.density, grid);
            std::cout << "M_" << n << " = " << format_csv_number(m.value) << "\n";
        }
        const QuadResult b = margin_mass(sc.labels, sc.density, sc.schedules.zeta, grid);
        std::cout << "b(" << format_csv_number(sc.schedules.zeta)
                  << ") = " << format_csv_number(b.value) << "\n";
    } else {
        std::cout << "sigma_N^2 = " << format_csv_number(sc.noise.variance()) << "\n";
        const QuadResult t =
            truncated_variance_target(sc.labels, sc.density, sc.noise.variance(), 0.1, grid);
        std::cout << "truncated_target(0.1) = " << format_csv_number(t.value) << "\n";
    }
    return 0;
}

inline int run_tail_check(std::optional<double> p, std::optional<long> r,
                          std::optional<double> gamma, bool sweep, bool with_assert) {
    long violations = 0;
    if (sweep) {
        const auto results = chernoff_tail_sweep();
        for (const auto& res : results) {
            if (!res.holds) {
                ++violations;
                std::cout << "VIOLATION p=" << res.p << " r=" << res.r << " gamma=" << res.gamma
                          << " exact_tail=" << format_csv_number(res.exact_tail)
                          << " bound=" << format_csv_number(res.bound) << "\n";
            }
        }
        std::cout << "sweep: " << results.size() << " cells, violations: " << violations << "\n";
    } else {
        if (!p || !r || !gamma)
            throw ConfigError("tail-check requires --p, --r and --gamma (or --sweep)");
        const TailCheckResult res = chernoff_tail_check(*p, *r, *gamma);
        std::cout << "p=" << format_csv_number(res.p) << " r=" << res.r
                  << " gamma=" << format_csv_number(res.gamma)
                  << " exact_tail=" << format_csv_number(res.exact_tail)
                  << " bound=" << format_csv_number(res.bound) << " "
                  << (res.holds ? "HOLDS" : "VIOLATED") << "\n";
        if (!res.holds) ++violations;
    }
    return with_assert && violations > 0 ? 3 : 0;
}

}  // namespace cli_detail

inline int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"nonstat: universal classification and regression rules for "
                 "inhomogeneous data, with Bayes-target oracles and a seeded "
                 "Monte Carlo harness"};
    app.require_subcommand(1);

    std::string config_path;
    bool with_assert = false;

    auto* sim_reg = app.add_subcommand("simulate-regression",
                                       "average-variance convergence sweep for a regression scenario");
    sim_reg->add_option("config", config_path, "experiment config file")->required();
    sim_reg->add_flag("--assert", with_assert, "evaluate the config's assert block");

    auto* sim_cls = app.add_subcommand("simulate-classification",
                                       "T_n convergence sweep for a classification scenario");
    sim_cls->add_option("config", config_path, "experiment config file")->required();
    sim_cls->add_flag("--assert", with_assert, "evaluate the config's assert block");

    auto* check = app.add_subcommand("check-conditions",
                                     "evaluate the Cesaro ergodic gaps and label the scenario");
    check->add_option("config", config_path, "experiment config file")->required();
    check->add_flag("--assert", with_assert, "fail when the label mismatches the declared mode");

    std::optional<double> p, gamma;
    std::optional<long> r;
    bool sweep = false;
    auto* tail = app.add_subcommand("tail-check",
                                    "exact binomial tail vs the Chernoff deviation bound");
    tail->add_option("--p", p, "Bernoulli parameter in (0,1)");
    tail->add_option("--r", r, "trial count");
    tail->add_option("--gamma", gamma, "deviation fraction in (0, 1/2]");
    tail->add_flag("--sweep", sweep, "run the full verification sweep");
    tail->add_flag("--assert", with_assert, "exit 3 on any violation");

    auto* oracle = app.add_subcommand("oracle", "print oracle targets for a scenario");
    oracle->add_option("config", config_path, "experiment config file")->required();

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.push_back("nonstat");
    for (const auto& a : args) argv_storage.push_back(a);
    std::vector<char*> argv;
    for (auto& s : argv_storage) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return 1;
    }

    try {
        if (sim_reg->parsed()) return cli_detail::run_simulation(config_path, DataKind::regression, with_assert);
        if (sim_cls->parsed())
            return cli_detail::run_simulation(config_path, DataKind::classification, with_assert);
        if (check->parsed()) return cli_detail::run_check_conditions(config_path, with_assert);
        if (tail->parsed()) return cli_detail::run_tail_check(p, r, gamma, sweep, with_assert);
        if (oracle->parsed()) return cli_detail::run_oracle(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

inline int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

}  // namespace nonstat
