#pragma once

namespace divtest {

// Self-contained chi-squared and standard-normal distribution functions.
// Everything here is implemented in-repo (Lanczos ln-gamma, incomplete-gamma
// series / continued fraction, erfc series / continued fraction) so that
// results are bit-stable across platforms and the quantiles have a single
// source of truth: each quantile is a safeguarded bisection against the
// corresponding CDF implemented below.

/// ln Gamma(x) for x > 0 via the 14-term Lanczos series (g = 671/128).
/// Relative error is a few ulp over the whole positive axis.
double ln_gamma(double x);

/// Regularized lower incomplete gamma P(a, x): series for x < a + 1,
/// Lentz continued fraction otherwise.
double regularized_gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed from
/// whichever representation avoids cancellation.
double regularized_gamma_q(double a, double x);

/// Chi-squared CDF with `dof` degrees of freedom evaluated at c >= 0.
double chi2_cdf(int dof, double c);

/// Chi-squared upper tail 1 - CDF, computed without cancellation.
double chi2_tail(int dof, double c);

/// c such that chi2_tail(dof, c) == eps, eps in (0,1).  Bracketing +
/// bisection against chi2_tail; |error in c| <= 1e-10.
double chi2_quantile(int dof, double eps);

/// Complementary error function: power series for small arguments,
/// Lentz continued fraction for large ones.
double erfc_fn(double x);

/// Upper tail of the standard Normal, Q(x) = P(Z >= x).
double norm_tail(double x);

/// x such that norm_tail(x) == eps, eps in (0,1).
double norm_quantile(double eps);

}  // namespace divtest
