#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "divtest/divergences.hpp"
#include "divtest/simplex.hpp"

namespace divtest {

/// Closed-form first/second-order prediction of -ln(type-II error) for a
/// fixed type-I level eps:
///   divergence test:  n D(P||Q) - sqrt(n V(P||Q) chi2_quantile(k-1, eps))
///   Neyman-Pearson:   n D(P||Q) - sqrt(n V(P||Q)) norm_quantile(eps)
struct Expansion {
    double first_order = 0.0;
    double second_order = 0.0;
    double predicted_minus_ln_beta = 0.0;
    enum class Flavor { divergence_test, neyman_pearson } flavor = Flavor::divergence_test;
};

/// `dof_k` selects the chi-squared degrees of freedom as dof_k - 1; pass
/// P.size() for the nominal prediction (it is a parameter so diagnostics can
/// run deliberate wrong-dof negative controls).
Expansion predict_divergence_test(const Distribution& P, const Distribution& Q, std::int64_t n,
                                  double eps, int dof_k);
Expansion predict_np(const Distribution& P, const Distribution& Q, std::int64_t n, double eps);

/// Quadratic expansion of T -> KL(T||Q) around T = P:
///   D(P||Q) + sum (T_i - P_i) ln(P_i/Q_i) + chi_sq(T, P) / 2.
/// The remainder is cubic in ||T - P||.
double kl_quadratic_approx(std::span<const double> T, const Distribution& P,
                           const Distribution& Q);

/// Exact Kolmogorov distance between the distribution of the scaled statistic
/// n D~(t/n || P0) / eta under P0 and the chi-squared(k-1) CDF.  The exact
/// distribution is discrete, so both one-sided limits are evaluated at every
/// atom; the sup is attained there.
double berry_esseen_sup(const DivergenceSpec& spec, const Distribution& P0, std::int64_t n);

struct ResidualPoint {
    double n = 0.0;
    double exact_minus_ln_beta = 0.0;
    double predicted = 0.0;
    double residual = 0.0;  // exact - predicted
};

/// Residuals of the second-order prediction fitted against the basis
/// {1, ln n, sqrt n}.  A sqrt-n coefficient near zero is what the
/// second-order law looks like at desk scale; the ln-n coefficient absorbs
/// the third-order term.
struct ResidualSeries {
    std::vector<ResidualPoint> grid;
    double const_coeff = 0.0;
    double log_coeff = 0.0;
    double sqrt_coeff = 0.0;
};

/// Input rows are (n, exact, predicted) with strictly increasing n; at least
/// 4 rows required.
ResidualSeries fit_residuals(std::span<const ResidualPoint> series);

}  // namespace divtest
