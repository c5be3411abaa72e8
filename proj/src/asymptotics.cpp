#include "divtest/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "divtest/errors.hpp"
#include "divtest/special_functions.hpp"
#include "divtest/tests_engine.hpp"

namespace divtest {

Expansion predict_divergence_test(const Distribution& P, const Distribution& Q, std::int64_t n,
                                  double eps, int dof_k) {
    if (!(eps > 0.0 && eps < 1.0)) raise(errc::prob_out_of_range, "eps must lie in (0,1)");
    if (dof_k < 2) raise(errc::invalid_argument, "dof_k must be >= 2");
    const PqStatistics st = pq_statistics(P, Q);
    const double nn = static_cast<double>(n);
    Expansion e;
    e.flavor = Expansion::Flavor::divergence_test;
    e.first_order = nn * st.kl_divergence;
    e.second_order = -std::sqrt(nn * st.variance * chi2_quantile(dof_k - 1, eps));
    e.predicted_minus_ln_beta = e.first_order + e.second_order;
    return e;
}

Expansion predict_np(const Distribution& P, const Distribution& Q, std::int64_t n, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) raise(errc::prob_out_of_range, "eps must lie in (0,1)");
    const PqStatistics st = pq_statistics(P, Q);
    const double nn = static_cast<double>(n);
    Expansion e;
    e.flavor = Expansion::Flavor::neyman_pearson;
    e.first_order = nn * st.kl_divergence;
    e.second_order = -std::sqrt(nn * st.variance) * norm_quantile(eps);
    e.predicted_minus_ln_beta = e.first_order + e.second_order;
    return e;
}

double kl_quadratic_approx(std::span<const double> T, const Distribution& P,
                           const Distribution& Q) {
    if (static_cast<int>(T.size()) != P.size() || P.size() != Q.size())
        raise(errc::dimension_mismatch, "size mismatch in kl_quadratic_approx");
    double value = 0.0;
    for (int i = 0; i < P.size(); ++i) {
        const double alpha_i = std::log(P[i] / Q[i]);
        value += P[i] * alpha_i;                 // D(P||Q)
        value += (T[i] - P[i]) * alpha_i;        // linear term
    }
    return value + 0.5 * chi_sq(T, P);
}

double berry_esseen_sup(const DivergenceSpec& spec, const Distribution& P0, std::int64_t n) {
    const double scale = static_cast<double>(n) / spec.eta();
    StatFn base = divergence_stat_fn(spec, P0);
    StatFn scaled = [base = std::move(base), scale](std::span<const std::int64_t> counts,
                                                    std::int64_t nn) mutable {
        return scale * base(counts, nn);
    };
    const auto atoms = exact_statistic_atoms(P0.size(), n, P0, scaled);
    const int dof = P0.size() - 1;

    double sup = 0.0;
    double below = 0.0;  // P(statistic < current atom)
    for (const Atom& a : atoms) {
        const double f = chi2_cdf(dof, std::max(a.value, 0.0));
        sup = std::max(sup, std::fabs(below - f));
        below += a.weight;
        sup = std::max(sup, std::fabs(below - f));
    }
    return sup;
}

ResidualSeries fit_residuals(std::span<const ResidualPoint> series) {
    if (series.size() < 4) raise(errc::degenerate_grid, "fit_residuals needs at least 4 grid points");
    for (std::size_t i = 1; i < series.size(); ++i)
        if (!(series[i].n > series[i - 1].n))
            raise(errc::degenerate_grid, "fit_residuals needs strictly increasing n");

    ResidualSeries out;
    out.grid.assign(series.begin(), series.end());
    for (ResidualPoint& p : out.grid) p.residual = p.exact_minus_ln_beta - p.predicted;

    // Normal equations for residual ~ a + b ln n + c sqrt n, solved by
    // Gaussian elimination with partial pivoting (3x3).
    double ata[3][3] = {};
    double atb[3] = {};
    for (const ResidualPoint& p : out.grid) {
        const double phi[3] = {1.0, std::log(p.n), std::sqrt(p.n)};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) ata[r][c] += phi[r] * phi[c];
            atb[r] += phi[r] * p.residual;
        }
    }
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::fabs(ata[r][col]) > std::fabs(ata[pivot][col])) pivot = r;
        if (std::fabs(ata[pivot][col]) < 1e-12) raise(errc::degenerate_grid, "singular residual fit");
        if (pivot != col) {
            std::swap(ata[pivot], ata[col]);
            std::swap(atb[pivot], atb[col]);
        }
        for (int r = col + 1; r < 3; ++r) {
            const double f = ata[r][col] / ata[col][col];
            for (int c = col; c < 3; ++c) ata[r][c] -= f * ata[col][c];
            atb[r] -= f * atb[col];
        }
    }
    double coeff[3];
    for (int r = 2; r >= 0; --r) {
        double s = atb[r];
        for (int c = r + 1; c < 3; ++c) s -= ata[r][c] * coeff[c];
        coeff[r] = s / ata[r][r];
    }
    out.const_coeff = coeff[0];
    out.log_coeff = coeff[1];
    out.sqrt_coeff = coeff[2];
    return out;
}

}  // namespace divtest
