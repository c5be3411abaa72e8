#pragma once

#include <functional>
#include <span>
#include <vector>

#include "divtest/simplex.hpp"

namespace divtest {

// Divergence functionals between a point T on the closed simplex (the
// empirical side; zero entries allowed) and a strictly positive distribution
// P.  All logarithms are natural, all values in nats.  Zero-count convention
// throughout: 0 ln 0 = 0, and zero entries of T contribute 0 to power sums.
//
// Argument order: the empirical argument always comes FIRST, matching the
// test statistic D(t || P).  Note this is the reverse of the classical
// f-divergence notation D_f(P || Q) = sum Q_i f(P_i / Q_i); here the second
// argument plays Q's role, i.e. f_div(f, T, P) = sum P_i f(T_i / P_i).  For
// asymmetric divergences the orientation matters; see README.

/// Kullback-Leibler divergence sum T_i ln(T_i / P_i).
double kl(std::span<const double> T, const Distribution& P);

/// f-divergence sum P_i f(T_i / P_i).  f must be convex with f(1) = 0;
/// callers own that contract (DivergenceSpec::generic_f spot-checks it).
double f_div(const std::function<double(double)>& f, std::span<const double> T,
             const Distribution& P);

/// alpha-divergence (4 / (1 - a^2)) * [1 - sum T_i^{(1-a)/2} P_i^{(1+a)/2}],
/// a not in {-1, +1}.
double alpha_div(double a, std::span<const double> T, const Distribution& P);

/// Renyi divergence (1 / (a - 1)) ln sum T_i^a P_i^{1-a}, a > 0, a != 1.
double renyi_div(double a, std::span<const double> T, const Distribution& P);

/// chi-squared divergence sum (T_i - P_i)^2 / P_i.
double chi_sq(std::span<const double> T, const Distribution& P);

/// Tagged descriptor selecting one of the divergence families above, plus
/// its second-order coefficient eta (the chi-squared Taylor coefficient at
/// T = P).
class DivergenceSpec {
public:
    enum class Kind { kl, alpha, renyi, chi_sq, generic_f };

    static DivergenceSpec kl_divergence();
    static DivergenceSpec alpha_divergence(double a);
    static DivergenceSpec renyi_divergence(double a);
    static DivergenceSpec chi_squared();
    /// f_second_at_1 = f''(1) must be supplied by the caller, not estimated:
    /// eta enters threshold calibration.  f is spot-checked for f(1)=0 and
    /// midpoint convexity at three point pairs.
    static DivergenceSpec generic_f(std::function<double(double)> f, double f_second_at_1);

    Kind kind() const noexcept { return kind_; }
    double alpha() const noexcept { return alpha_; }

    /// Second-order coefficient: 1/2 for KL and alpha-divergences, a/2 for
    /// Renyi(a), 1 for chi-squared, f''(1)/2 for a generic f-divergence.
    double eta() const;

    /// D~(T || P) for this divergence.
    double evaluate(std::span<const double> T, const Distribution& P) const;

    const char* name() const;

private:
    DivergenceSpec() = default;
    Kind kind_ = Kind::kl;
    double alpha_ = 0.0;
    std::function<double(double)> f_;
    double f_second_at_1_ = 0.0;
};

double eta_of(const DivergenceSpec& spec);

/// D(P||Q), V(P||Q) and the per-symbol log-likelihood ratios
/// alpha_i = ln(P_i / Q_i).  Defined only for P != Q (V > 0).
struct PqStatistics {
    double kl_divergence;    // D(P||Q)
    double variance;         // V(P||Q)
    std::vector<double> alphas;
};

PqStatistics pq_statistics(const Distribution& P, const Distribution& Q);

/// Power-divergence statistic T_lambda on raw counts Y (sum Y_i = n):
///   (2 / (lambda (lambda+1))) sum Y_i [ (Y_i / (n P_i))^lambda - 1 ]
/// with the limit forms at lambda = 0 (2n KL(t/n || P)) and lambda = -1
/// (2n KL(P || t/n), +inf if t has a zero count).
double power_div_statistic(double lambda, const TypeDistribution& t, const Distribution& P);

}  // namespace divtest
