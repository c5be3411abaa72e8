#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "divtest/divergences.hpp"
#include "divtest/simplex.hpp"

namespace divtest {

/// ell(gamma) = sum (gamma_i - P_i) alpha_i, the linear functional whose
/// minimum over the chi-squared ball drives the second-order term.
double ell(std::span<const double> gamma, const Distribution& P, std::span<const double> alphas);

/// Feasibility data for the ball-radius guard: I = { i : alpha_i - D > 0 },
/// B = { alpha_j - D : j in I }, tau = max B.  I is nonempty whenever P != Q.
struct FeasibilityData {
    double tau = 0.0;
    std::vector<int> index_set;    // I (0-based indices)
    std::vector<double> value_set; // B
};

FeasibilityData feasibility_data(const Distribution& P, const Distribution& Q);

/// Closed-form KKT minimizer of ell over the closed chi-squared ball of
/// radius r_tilde around P:
///   gamma*_i = P_i + sqrt(r_tilde) (D - alpha_i) P_i / sqrt(V),
/// valid for 0 < sqrt(r_tilde) < sqrt(V)/tau (gamma* stays strictly
/// positive), with minimum value -sqrt(V r_tilde) attained on the ball
/// boundary.  KKT multipliers: lambda_0 = sqrt(V)/(2 sqrt(r_tilde)),
/// mu = -D.
struct KktSolution {
    Distribution gamma_star;  // strictly positive; validated on construction
    double min_value = 0.0;   // -sqrt(V r_tilde)
    double r_tilde = 0.0;
    double tau = 0.0;
    std::vector<int> index_set_I;
    std::vector<double> value_set_B;
};

KktSolution kkt_minimize(const Distribution& P, const Distribution& Q, double r_tilde);

/// Exhaustive lattice oracle for kkt_minimize: minimizes ell over simplex
/// lattice points with spacing grid_step that lie inside the closed ball.
/// value is +inf when no lattice point is feasible.  Ties broken by
/// lexicographically smallest argmin.
struct BruteForceResult {
    double value = 0.0;
    std::vector<double> argmin;
};

BruteForceResult brute_force_min(const Distribution& P, const Distribution& Q, double r_tilde,
                                 double grid_step);

/// How far above the analytic minimum the lattice oracle may legitimately
/// sit: the ell Lipschitz constant times the worst-case lattice rounding
/// radius, (sum_i |alpha_i| + (k-1) max_i |alpha_i|) * grid_step.
double brute_force_tolerance(std::span<const double> alphas, double grid_step);

/// Integer type T*_n approximating gamma*: floor/ceil rounding toward P in a
/// canonical coordinate order (zero-gap indices first, then the bulk, with a
/// negative-gap index at slot k-1 and a positive-gap index at slot k), then
/// an exact integer completion.  The output satisfies
///   (1) counts sum to n,
///   (2) chi_sq(t/n, P) <= r_bar,
///   (3) |n ell(gamma*) - n ell(t/n)| <= kappa_bound.
struct RoundedType {
    TypeDistribution t_star;
    double kappa_bound = 0.0;
    double ell_gap = 0.0;
    std::vector<int> permutation;  // permutation[slot] = original index (0-based)
    int case_used = 0;             // 1 or 2, the completion branch taken
};

/// Requires n large enough that |n gamma*_i - n P_i| >= C' + k for every
/// nonzero-gap coordinate; throws NTooSmall (naming the minimal admissible n)
/// otherwise.
RoundedType round_to_type(const Distribution& P, const Distribution& Q, std::int64_t n,
                          double r_bar);

/// kappa bound for the rounding gap, in the permuted labeling:
///   case 1: sum_{i<=k-2} |a_i| + |a_{k-1}| (C' P_{k-1} + 1) + |a_k| (C' P_{k-1} + k - 1)
///   case 2: sum_{i<=k-2} |a_i| + |a_{k-1}| (C' P_k + k - 1) + |a_k| (C' P_k + 1)
double kappa_of(std::span<const double> P_perm, std::span<const double> alphas_perm,
                double c_prime, int k, int case_id);

}  // namespace divtest
