#include "divtest/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "divtest/errors.hpp"

namespace divtest {

namespace {

constexpr double kZeroGapTol = 1e-12;  // classification tolerance for (D - alpha_i) P_i == 0

}  // namespace

double ell(std::span<const double> gamma, const Distribution& P, std::span<const double> alphas) {
    if (static_cast<int>(gamma.size()) != P.size() || gamma.size() != alphas.size())
        raise(errc::dimension_mismatch, "size mismatch in ell");
    double s = 0.0;
    for (std::size_t i = 0; i < gamma.size(); ++i) s += (gamma[i] - P[i]) * alphas[i];
    return s;
}

FeasibilityData feasibility_data(const Distribution& P, const Distribution& Q) {
    const PqStatistics st = pq_statistics(P, Q);
    FeasibilityData f;
    for (int i = 0; i < P.size(); ++i) {
        const double gap = st.alphas[i] - st.kl_divergence;
        if (gap > 0.0) {
            f.index_set.push_back(i);
            f.value_set.push_back(gap);
        }
    }
    // Nonempty whenever P != Q: the P-weighted gaps sum to zero and cannot
    // all vanish.
    f.tau = *std::max_element(f.value_set.begin(), f.value_set.end());
    return f;
}

KktSolution kkt_minimize(const Distribution& P, const Distribution& Q, double r_tilde) {
    const PqStatistics st = pq_statistics(P, Q);
    const FeasibilityData feas = feasibility_data(P, Q);
    if (!(r_tilde > 0.0)) raise(errc::invalid_argument, "kkt_minimize requires r_tilde > 0");
    const double sqrt_r = std::sqrt(r_tilde);
    const double sqrt_v = std::sqrt(st.variance);
    if (!(sqrt_r < sqrt_v / feas.tau))
        raise(errc::radius_too_large,
              "kkt_minimize requires sqrt(r_tilde) < sqrt(V)/tau so the minimizer stays positive");

    std::vector<double> gamma(P.size());
    for (int i = 0; i < P.size(); ++i)
        gamma[i] = P[i] + sqrt_r * (st.kl_divergence - st.alphas[i]) * P[i] / sqrt_v;

    return KktSolution{Distribution(std::move(gamma)), -std::sqrt(st.variance * r_tilde), r_tilde,
                       feas.tau, feas.index_set, feas.value_set};
}

BruteForceResult brute_force_min(const Distribution& P, const Distribution& Q, double r_tilde,
                                 double grid_step) {
    if (P.size() > 4) raise(errc::budget_exceeded, "brute_force_min supports k <= 4 only");
    if (!(grid_step > 0.0 && grid_step <= 0.1))
        raise(errc::invalid_argument, "grid_step must lie in (0, 0.1]");
    if (r_tilde < 0.0) raise(errc::invalid_argument, "r_tilde must be >= 0");
    const PqStatistics st = pq_statistics(P, Q);

    const int k = P.size();
    const std::int64_t N = std::llround(1.0 / grid_step);  // lattice = {m/N}, step snapped to 1/N
    const double h = 1.0 / static_cast<double>(N);

    // Per-coordinate tables of the chi-squared and ell contributions.
    std::vector<std::vector<double>> chi_term(k), ell_term(k);
    for (int i = 0; i < k; ++i) {
        chi_term[i].resize(N + 1);
        ell_term[i].resize(N + 1);
        for (std::int64_t m = 0; m <= N; ++m) {
            const double d = static_cast<double>(m) * h - P[i];
            chi_term[i][m] = d * d / P[i];
            ell_term[i][m] = d * st.alphas[i];
        }
    }

    double best = std::numeric_limits<double>::infinity();
    std::vector<std::int64_t> best_counts;
    std::vector<std::int64_t> counts(k, 0);

    // Depth-first scan of the first k-1 coordinates; the last one is fixed by
    // the sum.  Box bounds from the remaining chi-squared budget prune most
    // of the lattice, and the innermost loop breaks once it leaves the
    // (convex) feasible interval.
    auto bounds = [&](int i, double chi_rem, std::int64_t sum_rem, std::int64_t& lo,
                      std::int64_t& hi) {
        const double half = std::sqrt(std::max(chi_rem, 0.0) * P[i]);
        lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil((P[i] - half) / h - 1e-9)));
        hi = std::min<std::int64_t>(sum_rem,
                                    static_cast<std::int64_t>(std::floor((P[i] + half) / h + 1e-9)));
    };

    auto scan = [&](auto&& self, int level, double chi_acc, double ell_acc,
                    std::int64_t sum_rem) -> void {
        if (level == k - 2) {
            std::int64_t lo, hi;
            bounds(level, r_tilde - chi_acc, sum_rem, lo, hi);
            bool seen_feasible = false;
            for (std::int64_t m = lo; m <= hi; ++m) {
                const std::int64_t last = sum_rem - m;
                const double chi = chi_acc + chi_term[level][m] + chi_term[k - 1][last];
                if (chi <= r_tilde) {
                    seen_feasible = true;
                    const double v = ell_acc + ell_term[level][m] + ell_term[k - 1][last];
                    if (v < best) {
                        best = v;
                        counts[level] = m;
                        counts[k - 1] = last;
                        best_counts = counts;
                    }
                } else if (seen_feasible) {
                    break;
                }
            }
            return;
        }
        std::int64_t lo, hi;
        bounds(level, r_tilde - chi_acc, sum_rem, lo, hi);
        for (std::int64_t m = lo; m <= hi; ++m) {
            const double chi = chi_acc + chi_term[level][m];
            if (chi > r_tilde) continue;
            counts[level] = m;
            self(self, level + 1, chi, ell_acc + ell_term[level][m], sum_rem - m);
        }
    };
    scan(scan, 0, 0.0, 0.0, N);

    BruteForceResult res;
    res.value = best;
    if (!best_counts.empty()) {
        res.argmin.resize(k);
        for (int i = 0; i < k; ++i) res.argmin[i] = static_cast<double>(best_counts[i]) * h;
    }
    return res;
}

double brute_force_tolerance(std::span<const double> alphas, double grid_step) {
    double sum = 0.0, max_abs = 0.0;
    for (double a : alphas) {
        sum += std::fabs(a);
        max_abs = std::max(max_abs, std::fabs(a));
    }
    const double k = static_cast<double>(alphas.size());
    return (sum + (k - 1.0) * max_abs) * grid_step;
}

double kappa_of(std::span<const double> P_perm, std::span<const double> alphas_perm,
                double c_prime, int k, int case_id) {
    if (static_cast<int>(P_perm.size()) != k || static_cast<int>(alphas_perm.size()) != k)
        raise(errc::dimension_mismatch, "size mismatch in kappa_of");
    if (case_id != 1 && case_id != 2) raise(errc::invalid_argument, "kappa case must be 1 or 2");
    double head = 0.0;
    for (int i = 0; i + 2 < k; ++i) head += std::fabs(alphas_perm[i]);
    const double a1 = std::fabs(alphas_perm[k - 2]);
    const double a2 = std::fabs(alphas_perm[k - 1]);
    if (case_id == 1) {
        const double cp = c_prime * P_perm[k - 2];
        return head + a1 * (cp + 1.0) + a2 * (cp + k - 1.0);
    }
    const double cp = c_prime * P_perm[k - 1];
    return head + a1 * (cp + k - 1.0) + a2 * (cp + 1.0);
}

RoundedType round_to_type(const Distribution& P, const Distribution& Q, std::int64_t n,
                          double r_bar) {
    const PqStatistics st = pq_statistics(P, Q);
    const KktSolution kkt = kkt_minimize(P, Q, r_bar);  // validates the radius guard
    const int k = P.size();
    const double sqrt_r = std::sqrt(r_bar);
    const double sqrt_v = std::sqrt(st.variance);

    // Signed gaps d_i = (D - alpha_i) P_i; their sign is the sign of
    // gamma*_i - P_i.
    std::vector<double> d(k);
    for (int i = 0; i < k; ++i) d[i] = (st.kl_divergence - st.alphas[i]) * P[i];

    std::vector<int> zeros, negatives, positives;
    for (int i = 0; i < k; ++i) {
        if (std::fabs(d[i]) <= kZeroGapTol)
            zeros.push_back(i);
        else if (d[i] < 0.0)
            negatives.push_back(i);
        else
            positives.push_back(i);
    }
    if (negatives.empty() || positives.empty())
        raise(errc::equal_distributions,
              "round_to_type: all signed gaps fall below the zero-classification tolerance");

    // Canonical ordering: zero-gap indices first, the largest-magnitude
    // negative gap at slot k-1, the largest-magnitude positive gap at slot k
    // (maximizes the admissibility slack), everything else in between.
    auto argmax_abs = [&](const std::vector<int>& idx) {
        int bi = idx[0];
        for (int i : idx)
            if (std::fabs(d[i]) > std::fabs(d[bi])) bi = i;
        return bi;
    };
    const int neg_slot = argmax_abs(negatives);
    const int pos_slot = argmax_abs(positives);

    std::vector<int> perm = zeros;
    for (int i = 0; i < k; ++i)
        if (std::fabs(d[i]) > kZeroGapTol && i != neg_slot && i != pos_slot) perm.push_back(i);
    perm.push_back(neg_slot);
    perm.push_back(pos_slot);
    const int m = static_cast<int>(zeros.size());

    double c_prime = 0.0;
    for (int i : zeros) c_prime += 1.0 / P[i];

    // Admissibility: |n gamma*_i - n P_i| >= C' + k for every nonzero-gap
    // coordinate.
    double min_gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i)
        if (std::fabs(d[i]) > kZeroGapTol) min_gap = std::min(min_gap, std::fabs(d[i]));
    const double scale = sqrt_r / sqrt_v;  // |n gamma*_i - n P_i| = n * scale * |d_i|
    if (static_cast<double>(n) * scale * min_gap < c_prime + k) {
        const std::int64_t n_min =
            static_cast<std::int64_t>(std::ceil((c_prime + k) / (scale * min_gap)));
        raise(errc::n_too_small, "round_to_type: n below the admissibility threshold; minimal n = " +
                                     std::to_string(n_min));
    }

    const auto& gamma = kkt.gamma_star;
    std::vector<std::int64_t> c(k, 0);  // counts in slot order
    double gamma_sum = 0.0;             // sum of (n gamma* - count) over slots 0..k-3
    for (int slot = 0; slot < k - 2; ++slot) {
        const int i = perm[slot];
        const double ng = static_cast<double>(n) * gamma[i];
        if (slot < m)
            c[slot] = static_cast<std::int64_t>(std::floor(ng));
        else
            c[slot] = static_cast<std::int64_t>(d[i] < 0.0 ? std::ceil(ng) : std::floor(ng));
        gamma_sum += ng - static_cast<double>(c[slot]);
    }

    int case_used;
    if (gamma_sum <= 0.0) {
        case_used = 1;
        const int i = perm[k - 2];
        c[k - 2] = static_cast<std::int64_t>(
            std::ceil(static_cast<double>(n) * gamma[i] + c_prime * P[i]));
        std::int64_t used = 0;
        for (int slot = 0; slot < k - 1; ++slot) used += c[slot];
        c[k - 1] = n - used;  // exact integer completion of n gamma*_k + gamma'
    } else {
        case_used = 2;
        const int i = perm[k - 1];
        c[k - 1] = static_cast<std::int64_t>(
            std::floor(static_cast<double>(n) * gamma[i] - c_prime * P[i]));
        std::int64_t used = 0;
        for (int slot = 0; slot < k; ++slot)
            if (slot != k - 2) used += c[slot];
        c[k - 2] = n - used;
    }
    for (int slot = 0; slot < k; ++slot)
        if (c[slot] < 0)
            raise(errc::invalid_argument, "round_to_type produced a negative count (internal error)");

    RoundedType out;
    out.t_star.counts.assign(k, 0);
    out.t_star.n = n;
    for (int slot = 0; slot < k; ++slot) out.t_star.counts[perm[slot]] = c[slot];
    out.permutation = perm;
    out.case_used = case_used;

    std::vector<double> p_perm(k), a_perm(k);
    for (int slot = 0; slot < k; ++slot) {
        p_perm[slot] = P[perm[slot]];
        a_perm[slot] = st.alphas[perm[slot]];
    }
    out.kappa_bound = kappa_of(p_perm, a_perm, c_prime, k, case_used);

    const std::vector<double> frac = out.t_star.fractions();
    out.ell_gap = std::fabs(static_cast<double>(n) * ell(gamma.span(), P, st.alphas) -
                            static_cast<double>(n) * ell(frac, P, st.alphas));
    return out;
}

}  // namespace divtest
