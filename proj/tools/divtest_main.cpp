// divtest: config-driven runner for divergence-test experiments.
//
// Subcommands: calibrate, errors, predict, verify-asymptotics, berry-esseen,
// optimizer-check, sweep.  Exit codes: 0 ok/PASS, 1 FAIL verdict, 2 config
// error, 3 enumeration budget exceeded, 4 math-domain error.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "divtest/asymptotics.hpp"
#include "divtest/divergences.hpp"
#include "divtest/errors.hpp"
#include "divtest/experiment_config.hpp"
#include "divtest/optimizer.hpp"
#include "divtest/simplex.hpp"
#include "divtest/special_functions.hpp"
#include "divtest/tests_engine.hpp"

namespace {

using nlohmann::json;
using namespace divtest;

constexpr int kSchemaVersion = 1;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string fmt_int(std::int64_t x) { return std::to_string(x); }

json resolved_config_json(const ExperimentConfig& cfg, const std::string& subcommand) {
    json j;
    j["subcommand"] = subcommand;
    j["null_dist"] = cfg.null_dist;
    j["alt_dist"] = cfg.alt_dist;
    j["divergence"] = cfg.divergence;
    j["alpha"] = cfg.alpha;
    j["eps"] = cfg.eps;
    j["n_grid"] = cfg.n_grid;
    j["mode"] = cfg.mode;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["output_path"] = cfg.output_path;
    j["margin"] = cfg.margin;
    j["threshold_r"] = cfg.threshold_r;
    j["r_tilde"] = cfg.r_tilde;
    j["grid_step"] = cfg.grid_step;
    j["threads"] = cfg.threads;
    j["dof_override"] = cfg.dof_override;
    return j;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw config_error("output_path: cannot open '" + path + "' for writing");
        write_row_raw(header);
    }
    void write_row_raw(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

void write_json_report(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw config_error("output_path: cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
}

int dof_k_of(const ExperimentConfig& cfg) {
    return cfg.dof_override > 0 ? cfg.dof_override : static_cast<int>(cfg.null_dist.size());
}

// ---- subcommands ----

int cmd_calibrate(const ExperimentConfig& cfg) {
    cfg.validate(/*require_alt=*/false);
    const Distribution p0 = cfg.null_distribution();
    const DivergenceSpec spec = cfg.divergence_spec();
    CsvWriter csv(cfg.output_path, {"n", "r_star", "achieved_type1", "asymptotic_r"});
    for (std::int64_t n : cfg.n_grid) {
        const CalibrationResult res = exact_calibrate(spec, p0, n, cfg.eps);
        const double asym = asymptotic_threshold(spec, p0.size(), n, cfg.eps, cfg.margin);
        csv.write_row_raw({fmt_int(n), fmt17(res.r_star), fmt17(res.achieved_type1), fmt17(asym)});
    }
    return 0;
}

int cmd_errors(const ExperimentConfig& cfg) {
    cfg.validate(/*require_alt=*/true);
    const Distribution p0 = cfg.null_distribution();
    const Distribution q = cfg.alt_distribution();
    const DivergenceSpec spec = cfg.divergence_spec();
    const bool run_exact = cfg.mode == "exact" || cfg.mode == "both";
    const bool run_mc = cfg.mode == "mc" || cfg.mode == "both";

    CsvWriter csv(cfg.output_path,
                  {"n", "r", "type1_exact", "ln_type1_exact", "type2_exact", "ln_type2_exact",
                   "type1_mc", "type1_mc_lo", "type1_mc_hi", "type2_mc", "type2_mc_lo",
                   "type2_mc_hi"});
    for (std::size_t row = 0; row < cfg.n_grid.size(); ++row) {
        const std::int64_t n = cfg.n_grid[row];
        const double r = cfg.threshold_r > 0.0
                             ? cfg.threshold_r
                             : exact_calibrate(spec, p0, n, cfg.eps).r_star;
        const TestConfig tc(spec, r, p0);
        std::vector<std::string> cells = {fmt_int(n), fmt17(r), "", "", "", "", "", "", "", "", "", ""};
        if (run_exact) {
            const ErrorValue a = type1_exact(tc, n);
            const ErrorValue b = type2_exact(tc, q, n);
            cells[2] = fmt17(a.value);
            cells[3] = fmt17(a.ln_value);
            cells[4] = fmt17(b.value);
            cells[5] = fmt17(b.ln_value);
        }
        if (run_mc) {
            SeededSource src1(static_cast<std::uint64_t>(cfg.seed), 2 * row);
            SeededSource src2(static_cast<std::uint64_t>(cfg.seed), 2 * row + 1);
            const McEstimate a = type1_mc(tc, n, cfg.trials, src1);
            const McEstimate b = type2_mc(tc, q, n, cfg.trials, src2);
            cells[6] = fmt17(a.estimate);
            cells[7] = fmt17(a.ci_low);
            cells[8] = fmt17(a.ci_high);
            cells[9] = fmt17(b.estimate);
            cells[10] = fmt17(b.ci_low);
            cells[11] = fmt17(b.ci_high);
        }
        csv.write_row_raw(cells);
    }
    return 0;
}

int cmd_predict(const ExperimentConfig& cfg) {
    cfg.validate(/*require_alt=*/true);
    const Distribution p = cfg.null_distribution();
    const Distribution q = cfg.alt_distribution();
    CsvWriter csv(cfg.output_path, {"n", "div_first", "div_second", "div_predicted", "np_first",
                                    "np_second", "np_predicted"});
    for (std::int64_t n : cfg.n_grid) {
        const Expansion d = predict_divergence_test(p, q, n, cfg.eps, dof_k_of(cfg));
        const Expansion e = predict_np(p, q, n, cfg.eps);
        csv.write_row_raw({fmt_int(n), fmt17(d.first_order), fmt17(d.second_order),
                           fmt17(d.predicted_minus_ln_beta), fmt17(e.first_order),
                           fmt17(e.second_order), fmt17(e.predicted_minus_ln_beta)});
    }
    return 0;
}

int cmd_verify_asymptotics(const ExperimentConfig& cfg) {
    cfg.validate(/*require_alt=*/true, /*min_grid=*/4);
    const Distribution p0 = cfg.null_distribution();
    const Distribution q = cfg.alt_distribution();
    const DivergenceSpec spec = cfg.divergence_spec();
    const int dof_k = dof_k_of(cfg);

    std::vector<ResidualPoint> pts;
    for (std::int64_t n : cfg.n_grid) {
        const CalibrationResult cal = exact_calibrate(spec, p0, n, cfg.eps);
        const TestConfig tc(spec, cal.r_star, p0);
        const double minus_ln_beta = -type2_exact(tc, q, n).ln_value;
        const Expansion pred = predict_divergence_test(p0, q, n, cfg.eps, dof_k);
        pts.push_back({static_cast<double>(n), minus_ln_beta, pred.predicted_minus_ln_beta, 0.0});
    }
    const ResidualSeries fit = fit_residuals(pts);

    CsvWriter csv(cfg.output_path,
                  {"n", "minus_ln_beta", "predicted", "residual", "residual_over_sqrt_n"});
    for (const ResidualPoint& p : fit.grid)
        csv.write_row_raw({fmt17(p.n), fmt17(p.exact_minus_ln_beta), fmt17(p.predicted),
                           fmt17(p.residual), fmt17(p.residual / std::sqrt(p.n))});

    // Verdict thresholds: |R|/sqrt(n) nonincreasing (one <=5% inversion
    // allowed), a 4x decay over the grid, and a sqrt-n residual coefficient
    // within 5% of the second-order constant sqrt(V q).
    const PqStatistics st = pq_statistics(p0, q);
    const double second_order_const =
        std::sqrt(st.variance * chi2_quantile(dof_k - 1, cfg.eps));
    std::vector<double> scaled;
    for (const ResidualPoint& p : fit.grid) scaled.push_back(std::fabs(p.residual) / std::sqrt(p.n));
    int inversions = 0;
    bool inversion_small = true;
    for (std::size_t i = 1; i < scaled.size(); ++i) {
        if (scaled[i] > scaled[i - 1]) {
            ++inversions;
            if (scaled[i] > 1.05 * scaled[i - 1]) inversion_small = false;
        }
    }
    const bool monotone_ok = inversions <= 1 && inversion_small;
    const bool decay_ok = scaled.back() <= 0.25 * scaled.front();
    const double sqrt_coeff_bound = 0.05 * second_order_const;
    const bool sqrt_coeff_ok = std::fabs(fit.sqrt_coeff) <= sqrt_coeff_bound;
    const bool pass = monotone_ok && decay_ok && sqrt_coeff_ok;

    json report;
    report["schema_version"] = kSchemaVersion;
    report["config"] = resolved_config_json(cfg, "verify-asymptotics");
    json rows = json::array();
    for (const ResidualPoint& p : fit.grid)
        rows.push_back({{"n", p.n},
                        {"minus_ln_beta", p.exact_minus_ln_beta},
                        {"predicted", p.predicted},
                        {"residual", p.residual}});
    report["rows"] = rows;
    report["fit"] = {{"const_coeff", fit.const_coeff},
                     {"log_coeff", fit.log_coeff},
                     {"sqrt_coeff", fit.sqrt_coeff}};
    report["checks"] = {{"monotone_ok", monotone_ok},
                        {"decay_ok", decay_ok},
                        {"sqrt_coeff_ok", sqrt_coeff_ok},
                        {"sqrt_coeff_bound", sqrt_coeff_bound}};
    report["verdict"] = pass ? "PASS" : "FAIL";
    write_json_report(cfg.output_path + ".report.json", report);
    std::cout << (pass ? "PASS" : "FAIL") << " verify-asymptotics sqrt_coeff="
              << fmt17(fit.sqrt_coeff) << " bound=" << fmt17(sqrt_coeff_bound) << "\n";
    return pass ? 0 : 1;
}

int cmd_berry_esseen(const ExperimentConfig& cfg) {
    cfg.validate(/*require_alt=*/false);
    const Distribution p0 = cfg.null_distribution();
    const DivergenceSpec spec = cfg.divergence_spec();
    CsvWriter csv(cfg.output_path, {"n", "sup_distance", "sqrt_n_sup"});
    for (std::int64_t n : cfg.n_grid) {
        const double sup = berry_esseen_sup(spec, p0, n);
        csv.write_row_raw({fmt_int(n), fmt17(sup), fmt17(std::sqrt(static_cast<double>(n)) * sup)});
    }
    return 0;
}

int cmd_optimizer_check(const ExperimentConfig& cfg) {
    cfg.validate(/*require_alt=*/true);
    const Distribution p = cfg.null_distribution();
    const Distribution q = cfg.alt_distribution();
    const PqStatistics st = pq_statistics(p, q);
    const FeasibilityData feas = feasibility_data(p, q);
    const double r_tilde =
        cfg.r_tilde > 0.0 ? cfg.r_tilde : 0.25 * st.variance / (feas.tau * feas.tau);
    const std::int64_t n = cfg.n_grid.back();

    const KktSolution kkt = kkt_minimize(p, q, r_tilde);
    const double boundary_residual = std::fabs(chi_sq(kkt.gamma_star.span(), p) - r_tilde);
    const double ell_residual =
        std::fabs(ell(kkt.gamma_star.span(), p, st.alphas) - kkt.min_value);
    const double lambda0 = std::sqrt(st.variance) / (2.0 * std::sqrt(r_tilde));
    double stationarity = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        const double g = st.alphas[i] + 2.0 * lambda0 * (kkt.gamma_star[i] / p[i] - 1.0) -
                         st.kl_divergence;
        stationarity = std::max(stationarity, std::fabs(g));
    }

    const BruteForceResult bf = brute_force_min(p, q, r_tilde, cfg.grid_step);
    const double lipschitz_tol = brute_force_tolerance(st.alphas, cfg.grid_step);

    const RoundedType rt = round_to_type(p, q, n, r_tilde);
    std::int64_t count_sum = 0;
    for (std::int64_t c : rt.t_star.counts) count_sum += c;
    const double rounded_chi2 = chi_sq(rt.t_star.fractions(), p);

    const bool kkt_ok = boundary_residual <= 1e-10 && ell_residual <= 1e-10 &&
                        stationarity <= 1e-10;
    const bool bf_ok = bf.value >= kkt.min_value - 1e-10 &&
                       bf.value <= kkt.min_value + lipschitz_tol;
    const bool rounding_ok = count_sum == n && rounded_chi2 <= r_tilde + 1e-12 &&
                             rt.ell_gap <= rt.kappa_bound;
    const bool all_ok = kkt_ok && bf_ok && rounding_ok;

    json report;
    report["schema_version"] = kSchemaVersion;
    report["config"] = resolved_config_json(cfg, "optimizer-check");
    report["instance"] = {{"kl_divergence", st.kl_divergence},
                          {"variance", st.variance},
                          {"alphas", st.alphas},
                          {"tau", feas.tau},
                          {"index_set_I", feas.index_set},
                          {"value_set_B", feas.value_set},
                          {"r_tilde", r_tilde},
                          {"n", n}};
    report["kkt"] = {{"gamma_star", kkt.gamma_star.probs()},
                     {"min_value", kkt.min_value},
                     {"boundary_residual", boundary_residual},
                     {"ell_residual", ell_residual},
                     {"stationarity_residual", stationarity},
                     {"ok", kkt_ok}};
    report["brute_force"] = {{"value", bf.value},
                             {"argmin", bf.argmin},
                             {"gap", bf.value - kkt.min_value},
                             {"lipschitz_tol", lipschitz_tol},
                             {"ok", bf_ok}};
    report["rounding"] = {{"t_star", rt.t_star.counts},
                          {"case_used", rt.case_used},
                          {"permutation", rt.permutation},
                          {"chi2", rounded_chi2},
                          {"ell_gap", rt.ell_gap},
                          {"kappa_bound", rt.kappa_bound},
                          {"ok", rounding_ok}};
    report["all_ok"] = all_ok;
    write_json_report(cfg.output_path, report);
    std::cout << (all_ok ? "PASS" : "FAIL") << " optimizer-check\n";
    return all_ok ? 0 : 1;
}

int cmd_sweep(const ExperimentConfig& cfg) {
    cfg.validate(/*require_alt=*/true);
    const Distribution p0 = cfg.null_distribution();
    const Distribution q = cfg.alt_distribution();
    const DivergenceSpec spec = cfg.divergence_spec();
    const bool run_mc = cfg.mode == "mc" || cfg.mode == "both";

    CsvWriter csv(cfg.output_path,
                  {"n", "r_star", "achieved_type1", "asymptotic_r", "minus_ln_beta_exact",
                   "predicted_div", "predicted_np", "residual", "type2_mc", "type2_mc_lo",
                   "type2_mc_hi"});
    for (std::size_t row = 0; row < cfg.n_grid.size(); ++row) {
        const std::int64_t n = cfg.n_grid[row];
        const CalibrationResult cal = exact_calibrate(spec, p0, n, cfg.eps);
        const double asym = asymptotic_threshold(spec, p0.size(), n, cfg.eps, cfg.margin);
        const TestConfig tc(spec, cal.r_star, p0);
        const double minus_ln_beta = -type2_exact(tc, q, n).ln_value;
        const Expansion pd = predict_divergence_test(p0, q, n, cfg.eps, dof_k_of(cfg));
        const Expansion pn = predict_np(p0, q, n, cfg.eps);
        std::vector<std::string> cells = {
            fmt_int(n),           fmt17(cal.r_star),
            fmt17(cal.achieved_type1), fmt17(asym),
            fmt17(minus_ln_beta), fmt17(pd.predicted_minus_ln_beta),
            fmt17(pn.predicted_minus_ln_beta),
            fmt17(minus_ln_beta - pd.predicted_minus_ln_beta), "", "", ""};
        if (run_mc) {
            SeededSource src(static_cast<std::uint64_t>(cfg.seed), row);
            const McEstimate b = type2_mc(tc, q, n, cfg.trials, src);
            cells[8] = fmt17(b.estimate);
            cells[9] = fmt17(b.ci_low);
            cells[10] = fmt17(b.ci_high);
        }
        csv.write_row_raw(cells);
    }
    return 0;
}

// ---- option plumbing ----

struct FlagValues {
    std::string config_path;
    std::vector<double> null_dist, alt_dist;
    std::string divergence, mode, output_path;
    double alpha = 0, eps = 0, margin = 0, threshold_r = 0, r_tilde = 0, grid_step = 0;
    std::vector<std::int64_t> n_grid;
    std::int64_t trials = 0, seed = 0;
    int threads = 0, dof_override = 0;
};

void add_options(CLI::App* app, FlagValues& fv) {
    app->add_option("--config", fv.config_path, "TOML experiment config");
    app->add_option("--null_dist", fv.null_dist, "null-hypothesis weights")->delimiter(',');
    app->add_option("--alt_dist", fv.alt_dist, "alternative weights")->delimiter(',');
    app->add_option("--divergence", fv.divergence, "kl|alpha|renyi|chisq");
    app->add_option("--alpha", fv.alpha, "alpha/Renyi order");
    app->add_option("--eps", fv.eps, "type-I level in (0,1)");
    app->add_option("--n_grid", fv.n_grid, "sample sizes")->delimiter(',');
    app->add_option("--mode", fv.mode, "exact|mc|both");
    app->add_option("--trials", fv.trials, "Monte Carlo trials");
    app->add_option("--seed", fv.seed, "RNG seed (beats config and DIVTEST_SEED)");
    app->add_option("--output_path", fv.output_path, "output file");
    app->add_option("--margin", fv.margin, "asymptotic-threshold slack");
    app->add_option("--threshold_r", fv.threshold_r, "fixed threshold (0 = calibrate)");
    app->add_option("--r_tilde", fv.r_tilde, "chi-squared ball radius (0 = auto)");
    app->add_option("--grid_step", fv.grid_step, "brute-force lattice spacing");
    app->add_option("--threads", fv.threads, "worker cap (0 = unlimited)");
    app->add_option("--dof_override", fv.dof_override, "override alphabet size in predictors");
}

ExperimentConfig build_config(const CLI::App* app, const FlagValues& fv) {
    ExperimentConfig cfg;
    try {
        if (app->count("--config")) cfg.apply_toml(TomlTable::parse_file(fv.config_path));
    } catch (const error& e) {
        throw config_error(e.what());  // parse errors are config errors
    }
    if (!app->count("--seed") && !cfg.seed_explicit) {
        if (const char* env = std::getenv("DIVTEST_SEED")) cfg.seed = std::atoll(env);
    }
    if (app->count("--null_dist")) cfg.null_dist = fv.null_dist;
    if (app->count("--alt_dist")) cfg.alt_dist = fv.alt_dist;
    if (app->count("--divergence")) cfg.divergence = fv.divergence;
    if (app->count("--alpha")) cfg.alpha = fv.alpha;
    if (app->count("--eps")) cfg.eps = fv.eps;
    if (app->count("--n_grid")) cfg.n_grid = fv.n_grid;
    if (app->count("--mode")) cfg.mode = fv.mode;
    if (app->count("--trials")) cfg.trials = fv.trials;
    if (app->count("--seed")) {
        cfg.seed = fv.seed;
        cfg.seed_explicit = true;
    }
    if (app->count("--output_path")) cfg.output_path = fv.output_path;
    if (app->count("--margin")) cfg.margin = fv.margin;
    if (app->count("--threshold_r")) cfg.threshold_r = fv.threshold_r;
    if (app->count("--r_tilde")) cfg.r_tilde = fv.r_tilde;
    if (app->count("--grid_step")) cfg.grid_step = fv.grid_step;
    if (app->count("--threads")) cfg.threads = fv.threads;
    if (app->count("--dof_override")) cfg.dof_override = fv.dof_override;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"divergence-test experiment runner"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* desc;
        int (*run)(const ExperimentConfig&);
    };
    const Sub subs[] = {
        {"calibrate", "exact + asymptotic threshold calibration per n", cmd_calibrate},
        {"errors", "exact and/or Monte Carlo type-I/type-II errors", cmd_errors},
        {"predict", "first/second-order predictions (divergence test and NP)", cmd_predict},
        {"verify-asymptotics", "second-order residual fit with PASS/FAIL verdict",
         cmd_verify_asymptotics},
        {"berry-esseen", "exact chi-squared approximation error of the statistic CDF",
         cmd_berry_esseen},
        {"optimizer-check", "KKT minimizer, brute-force oracle and type rounding report",
         cmd_optimizer_check},
        {"sweep", "calibration + errors + predictions over the n grid", cmd_sweep},
    };

    std::vector<FlagValues> fvs(std::size(subs));
    std::vector<CLI::App*> apps;
    for (std::size_t i = 0; i < std::size(subs); ++i) {
        CLI::App* sc = app.add_subcommand(subs[i].name, subs[i].desc);
        add_options(sc, fvs[i]);
        apps.push_back(sc);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    for (std::size_t i = 0; i < std::size(subs); ++i) {
        if (!apps[i]->parsed()) continue;
        try {
            const ExperimentConfig cfg = build_config(apps[i], fvs[i]);
            return subs[i].run(cfg);
        } catch (const config_error& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        } catch (const error& e) {
            std::cerr << errc_name(e.code()) << ": " << e.what() << "\n";
            return e.code() == errc::budget_exceeded ? 3 : 4;
        }
    }
    return 2;
}
