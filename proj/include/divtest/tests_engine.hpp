#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "divtest/divergences.hpp"
#include "divtest/rng.hpp"
#include "divtest/simplex.hpp"

namespace divtest {

/// One divergence-test configuration: accept H0 iff D~(t/n || null_dist) < threshold_r.
struct TestConfig {
    DivergenceSpec divergence;
    double threshold_r = 0.0;  // must be > 0
    Distribution null_dist;

    TestConfig(DivergenceSpec spec, double r, Distribution p0);
};

enum class Decision { accept_h0, reject_h0 };

/// Strict-inequality acceptance, exactly as the test is defined: a statistic
/// equal to the threshold rejects.
Decision decide(const TestConfig& cfg, const TypeDistribution& t);

struct CalibrationResult {
    double r_star = 0.0;
    double achieved_type1 = 0.0;
    enum class Mode { exact, asymptotic } mode = Mode::exact;
    double margin_used = 0.0;
};

/// Closed-form threshold (eta / n) * chi2_quantile(k-1, eps - margin).  The
/// margin stands in for the Berry-Esseen slack term of the calibration
/// guarantee; eps - margin must stay positive.
double asymptotic_threshold(const DivergenceSpec& spec, int k, std::int64_t n, double eps,
                            double margin);

/// Exact calibration by full type enumeration: the smallest distinct
/// statistic value d whose strict-upper tail under P0 is <= eps, returned as
/// a midpoint threshold inside the open gap above d (the infimum itself is
/// generally not attained).  achieved_type1 = P0^n(statistic >= r_star) <= eps.
CalibrationResult exact_calibrate(const DivergenceSpec& spec, const Distribution& P0,
                                  std::int64_t n, double eps);

/// Exact error probability together with its natural log, so values as small
/// as e^-500 and below stay meaningful.
struct ErrorValue {
    double value = 0.0;
    double ln_value = 0.0;
};

ErrorValue type1_exact(const TestConfig& cfg, std::int64_t n);
ErrorValue type2_exact(const TestConfig& cfg, const Distribution& Q, std::int64_t n);

/// Log-likelihood-ratio statistic sum counts_i ln(Q_i / P0_i) and the exact,
/// non-randomized Neyman-Pearson baseline calibrated the same way as
/// exact_calibrate.  Without boundary randomization the achieved type-I may
/// sit strictly below eps; reports note the conservatism.
double np_statistic(const TypeDistribution& t, const Distribution& P0, const Distribution& Q);
CalibrationResult np_exact_calibrate(const Distribution& P0, const Distribution& Q,
                                     std::int64_t n, double eps);
ErrorValue np_type2_exact(const Distribution& P0, const Distribution& Q, std::int64_t n,
                          double r_star);

/// Monte Carlo estimate with a 95% Wilson confidence interval.
struct McEstimate {
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::int64_t trials = 0;
};

McEstimate type1_mc(const TestConfig& cfg, std::int64_t n, std::int64_t trials, SeededSource& src);
McEstimate type2_mc(const TestConfig& cfg, const Distribution& Q, std::int64_t n,
                    std::int64_t trials, SeededSource& src);

// ---- shared exact-distribution machinery (also used by the asymptotics
// ---- diagnostics and by tests) ----

/// One support point of the exact statistic distribution under some law.
struct Atom {
    double value = 0.0;
    double weight = 0.0;
};

using StatFn = std::function<double(std::span<const std::int64_t>, std::int64_t)>;

/// Throws BudgetExceeded when the enumeration is out of reach
/// (k > 4 and C(n+k-1, k-1) > 10^7).
void check_enumeration_budget(int k, std::int64_t n);

/// Exact distribution of a statistic of the type, under weight_dist: one Atom
/// per distinct statistic value (values merged within 1e-12), sorted
/// ascending, weights summing to 1.
std::vector<Atom> exact_statistic_atoms(int k, std::int64_t n, const Distribution& weight_dist,
                                        const StatFn& stat);

/// Calibration core shared by the divergence test and the NP baseline.
CalibrationResult calibrate_from_atoms(const std::vector<Atom>& atoms, double eps);

/// StatFn evaluating a DivergenceSpec on the type's fraction vector.
StatFn divergence_stat_fn(const DivergenceSpec& spec, const Distribution& P0);

}  // namespace divtest
