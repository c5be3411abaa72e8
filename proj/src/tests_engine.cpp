#include "divtest/tests_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "divtest/errors.hpp"
#include "divtest/special_functions.hpp"

namespace divtest {

namespace {

constexpr double kValueMergeTol = 1e-12;  // absolute tolerance for "distinct" statistic values

// Streaming log-sum-exp; deterministic in visit order.
struct LogSumExp {
    double max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;  // sum of exp(x - max)

    void add(double x) {
        if (x == -std::numeric_limits<double>::infinity()) return;
        if (x <= max) {
            sum += std::exp(x - max);
        } else {
            sum = sum * std::exp(max - x) + 1.0;
            max = x;
        }
    }
    double value() const {
        if (sum == 0.0) return -std::numeric_limits<double>::infinity();
        return max + std::log(sum);
    }
};

ErrorValue error_value_from_ln(double ln) { return {std::exp(ln), ln}; }

}  // namespace

TestConfig::TestConfig(DivergenceSpec spec, double r, Distribution p0)
    : divergence(std::move(spec)), threshold_r(r), null_dist(std::move(p0)) {
    if (!(threshold_r > 0.0)) raise(errc::invalid_argument, "TestConfig requires threshold_r > 0");
}

Decision decide(const TestConfig& cfg, const TypeDistribution& t) {
    if (t.size() != cfg.null_dist.size())
        raise(errc::dimension_mismatch, "type/distribution size mismatch");
    const std::vector<double> frac = t.fractions();
    const double stat = cfg.divergence.evaluate(frac, cfg.null_dist);
    return stat < cfg.threshold_r ? Decision::accept_h0 : Decision::reject_h0;
}

double asymptotic_threshold(const DivergenceSpec& spec, int k, std::int64_t n, double eps,
                            double margin) {
    if (k < 2) raise(errc::invalid_argument, "asymptotic_threshold requires k >= 2");
    if (n < 1) raise(errc::invalid_argument, "asymptotic_threshold requires n >= 1");
    if (!(eps > 0.0 && eps < 1.0)) raise(errc::prob_out_of_range, "eps must lie in (0,1)");
    if (margin < 0.0 || eps - margin <= 0.0)
        raise(errc::margin_too_large, "margin must satisfy 0 <= margin < eps");
    return spec.eta() / static_cast<double>(n) * chi2_quantile(k - 1, eps - margin);
}

void check_enumeration_budget(int k, std::int64_t n) {
    if (k <= 4) return;
    if (type_count(k, n) > 1e7L)
        raise(errc::budget_exceeded, "type enumeration exceeds the 10^7 budget for k > 4");
}

StatFn divergence_stat_fn(const DivergenceSpec& spec, const Distribution& P0) {
    // The lambda owns a scratch fraction buffer, reused across calls.
    return [spec, P0, frac = std::vector<double>(P0.size())](
               std::span<const std::int64_t> counts, std::int64_t n) mutable {
        for (std::size_t i = 0; i < counts.size(); ++i)
            frac[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
        return spec.evaluate(frac, P0);
    };
}

std::vector<Atom> exact_statistic_atoms(int k, std::int64_t n, const Distribution& weight_dist,
                                        const StatFn& stat) {
    check_enumeration_budget(k, n);
    std::vector<Atom> raw;
    raw.reserve(static_cast<std::size_t>(std::min(type_count(k, n), 2e7L)));
    for (TypeEnumerator e(k, n); e.valid(); e.advance()) {
        const double s = stat(e.counts(), n);
        const double lw = log_type_class_prob(e.counts(), weight_dist);
        raw.push_back({s, std::exp(lw)});
    }
    std::sort(raw.begin(), raw.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });

    std::vector<Atom> merged;
    merged.reserve(raw.size());
    for (const Atom& a : raw) {
        if (!merged.empty() && a.value - merged.back().value <= kValueMergeTol)
            merged.back().weight += a.weight;
        else
            merged.push_back(a);
    }
    return merged;
}

CalibrationResult calibrate_from_atoms(const std::vector<Atom>& atoms, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) raise(errc::prob_out_of_range, "eps must lie in (0,1)");
    const std::size_t m = atoms.size();
    // Strict-upper tails, accumulated right-to-left so each tail is an exact
    // suffix sum in a fixed order.
    std::vector<double> tail(m);
    double acc = 0.0;
    for (std::size_t j = m; j-- > 0;) {
        tail[j] = acc;
        acc += atoms[j].weight;
    }
    std::size_t j = 0;
    while (tail[j] > eps) ++j;  // tail[m-1] == 0, so this terminates
    CalibrationResult res;
    res.r_star = (j + 1 < m) ? 0.5 * (atoms[j].value + atoms[j + 1].value) : atoms[j].value + 1.0;
    res.achieved_type1 = tail[j];
    res.mode = CalibrationResult::Mode::exact;
    res.margin_used = 0.0;
    return res;
}

CalibrationResult exact_calibrate(const DivergenceSpec& spec, const Distribution& P0,
                                  std::int64_t n, double eps) {
    if (n < 1) raise(errc::invalid_argument, "exact_calibrate requires n >= 1");
    const auto atoms = exact_statistic_atoms(P0.size(), n, P0, divergence_stat_fn(spec, P0));
    return calibrate_from_atoms(atoms, eps);
}

namespace {

// Sum of log type-class probabilities over the region selected by `in_region`
// (a predicate on the statistic value).
template <typename Pred>
ErrorValue region_mass(int k, std::int64_t n, const Distribution& law, const StatFn& stat,
                       Pred in_region) {
    check_enumeration_budget(k, n);
    LogSumExp lse;
    for (TypeEnumerator e(k, n); e.valid(); e.advance()) {
        if (in_region(stat(e.counts(), n))) lse.add(log_type_class_prob(e.counts(), law));
    }
    return error_value_from_ln(lse.value());
}

}  // namespace

ErrorValue type1_exact(const TestConfig& cfg, std::int64_t n) {
    const double r = cfg.threshold_r;
    return region_mass(cfg.null_dist.size(), n, cfg.null_dist,
                       divergence_stat_fn(cfg.divergence, cfg.null_dist),
                       [r](double s) { return s >= r; });
}

ErrorValue type2_exact(const TestConfig& cfg, const Distribution& Q, std::int64_t n) {
    if (Q.size() != cfg.null_dist.size())
        raise(errc::dimension_mismatch, "alternative distribution size mismatch");
    const double r = cfg.threshold_r;
    return region_mass(cfg.null_dist.size(), n, Q,
                       divergence_stat_fn(cfg.divergence, cfg.null_dist),
                       [r](double s) { return s < r; });
}

double np_statistic(const TypeDistribution& t, const Distribution& P0, const Distribution& Q) {
    if (t.size() != P0.size() || P0.size() != Q.size())
        raise(errc::dimension_mismatch, "type/distribution size mismatch");
    double s = 0.0;
    for (int i = 0; i < t.size(); ++i)
        s += static_cast<double>(t.counts[i]) * std::log(Q[i] / P0[i]);
    return s;
}

namespace {

StatFn np_stat_fn(const Distribution& P0, const Distribution& Q) {
    std::vector<double> llr(P0.size());
    for (int i = 0; i < P0.size(); ++i) llr[i] = std::log(Q[i] / P0[i]);
    return [llr = std::move(llr)](std::span<const std::int64_t> counts, std::int64_t) {
        double s = 0.0;
        for (std::size_t i = 0; i < counts.size(); ++i)
            s += static_cast<double>(counts[i]) * llr[i];
        return s;
    };
}

}  // namespace

CalibrationResult np_exact_calibrate(const Distribution& P0, const Distribution& Q,
                                     std::int64_t n, double eps) {
    pq_statistics(P0, Q);  // rejects P0 == Q
    const auto atoms = exact_statistic_atoms(P0.size(), n, P0, np_stat_fn(P0, Q));
    return calibrate_from_atoms(atoms, eps);
}

ErrorValue np_type2_exact(const Distribution& P0, const Distribution& Q, std::int64_t n,
                          double r_star) {
    pq_statistics(P0, Q);
    return region_mass(P0.size(), n, Q, np_stat_fn(P0, Q),
                       [r_star](double s) { return s < r_star; });
}

namespace {

McEstimate wilson_interval(std::int64_t hits, std::int64_t trials) {
    // 95% Wilson score interval; z from the in-repo normal quantile.
    static const double z = norm_quantile(0.025);
    const double m = static_cast<double>(trials);
    const double p = static_cast<double>(hits) / m;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / m;
    const double center = (p + z2 / (2.0 * m)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / m + z2 / (4.0 * m * m)) / denom;
    return {p, center - half, center + half, trials};
}

}  // namespace

McEstimate type1_mc(const TestConfig& cfg, std::int64_t n, std::int64_t trials, SeededSource& src) {
    if (trials < 1) raise(errc::invalid_argument, "type1_mc requires trials >= 1");
    std::int64_t hits = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
        const TypeDistribution sample = sample_type(cfg.null_dist, n, src);
        if (decide(cfg, sample) == Decision::reject_h0) ++hits;
    }
    return wilson_interval(hits, trials);
}

McEstimate type2_mc(const TestConfig& cfg, const Distribution& Q, std::int64_t n,
                    std::int64_t trials, SeededSource& src) {
    if (trials < 1) raise(errc::invalid_argument, "type2_mc requires trials >= 1");
    if (Q.size() != cfg.null_dist.size())
        raise(errc::dimension_mismatch, "alternative distribution size mismatch");
    std::int64_t hits = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
        const TypeDistribution sample = sample_type(Q, n, src);
        if (decide(cfg, sample) == Decision::accept_h0) ++hits;
    }
    return wilson_interval(hits, trials);
}

}  // namespace divtest
