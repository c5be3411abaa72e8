#include "divtest/divergences.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "divtest/errors.hpp"

namespace divtest {

namespace {

void check_dims(std::span<const double> T, const Distribution& P) {
    if (static_cast<int>(T.size()) != P.size())
        raise(errc::dimension_mismatch, "simplex point / distribution size mismatch");
}

}  // namespace

double kl(std::span<const double> T, const Distribution& P) {
    check_dims(T, P);
    double d = 0.0;
    for (std::size_t i = 0; i < T.size(); ++i)
        if (T[i] > 0.0) d += T[i] * std::log(T[i] / P[i]);
    return d;
}

double f_div(const std::function<double(double)>& f, std::span<const double> T,
             const Distribution& P) {
    check_dims(T, P);
    double d = 0.0;
    for (std::size_t i = 0; i < T.size(); ++i) d += P[i] * f(T[i] / P[i]);
    return d;
}

double alpha_div(double a, std::span<const double> T, const Distribution& P) {
    if (a == -1.0 || a == 1.0) raise(errc::invalid_alpha, "alpha-divergence requires a != +-1");
    check_dims(T, P);
    const double e1 = 0.5 * (1.0 - a);
    const double e2 = 0.5 * (1.0 + a);
    double s = 0.0;
    for (std::size_t i = 0; i < T.size(); ++i)
        if (T[i] > 0.0) s += std::pow(T[i], e1) * std::pow(P[i], e2);
    return 4.0 / (1.0 - a * a) * (1.0 - s);
}

double renyi_div(double a, std::span<const double> T, const Distribution& P) {
    if (!(a > 0.0) || a == 1.0) raise(errc::invalid_alpha, "Renyi divergence requires a > 0, a != 1");
    check_dims(T, P);
    double s = 0.0;
    for (std::size_t i = 0; i < T.size(); ++i)
        if (T[i] > 0.0) s += std::pow(T[i], a) * std::pow(P[i], 1.0 - a);
    return std::log(s) / (a - 1.0);
}

double chi_sq(std::span<const double> T, const Distribution& P) {
    check_dims(T, P);
    double s = 0.0;
    for (std::size_t i = 0; i < T.size(); ++i) {
        const double d = T[i] - P[i];
        s += d * d / P[i];
    }
    return s;
}

DivergenceSpec DivergenceSpec::kl_divergence() {
    DivergenceSpec s;
    s.kind_ = Kind::kl;
    return s;
}

DivergenceSpec DivergenceSpec::alpha_divergence(double a) {
    if (a == -1.0 || a == 1.0) raise(errc::invalid_alpha, "alpha-divergence requires a != +-1");
    DivergenceSpec s;
    s.kind_ = Kind::alpha;
    s.alpha_ = a;
    return s;
}

DivergenceSpec DivergenceSpec::renyi_divergence(double a) {
    if (!(a > 0.0) || a == 1.0) raise(errc::invalid_alpha, "Renyi divergence requires a > 0, a != 1");
    DivergenceSpec s;
    s.kind_ = Kind::renyi;
    s.alpha_ = a;
    return s;
}

DivergenceSpec DivergenceSpec::chi_squared() {
    DivergenceSpec s;
    s.kind_ = Kind::chi_sq;
    return s;
}

DivergenceSpec DivergenceSpec::generic_f(std::function<double(double)> f, double f_second_at_1) {
    if (std::fabs(f(1.0)) > 1e-12) raise(errc::non_convex_f, "generic f-divergence requires f(1) = 0");
    // Midpoint convexity spot-check; not a proof, just a tripwire.
    const double pairs[3][2] = {{0.25, 1.0}, {0.5, 1.5}, {1.0, 2.5}};
    for (const auto& p : pairs) {
        const double mid = f(0.5 * (p[0] + p[1]));
        if (mid > 0.5 * (f(p[0]) + f(p[1])) + 1e-12)
            raise(errc::non_convex_f, "generic f-divergence failed the midpoint convexity check");
    }
    if (!(f_second_at_1 > 0.0))
        raise(errc::invalid_argument, "generic f-divergence requires f''(1) > 0");
    DivergenceSpec s;
    s.kind_ = Kind::generic_f;
    s.f_ = std::move(f);
    s.f_second_at_1_ = f_second_at_1;
    return s;
}

double DivergenceSpec::eta() const {
    switch (kind_) {
        case Kind::kl: return 0.5;
        case Kind::alpha: return 0.5;
        case Kind::renyi: return 0.5 * alpha_;
        case Kind::chi_sq: return 1.0;
        case Kind::generic_f: return 0.5 * f_second_at_1_;
    }
    return 0.5;
}

double DivergenceSpec::evaluate(std::span<const double> T, const Distribution& P) const {
    switch (kind_) {
        case Kind::kl: return kl(T, P);
        case Kind::alpha: return alpha_div(alpha_, T, P);
        case Kind::renyi: return renyi_div(alpha_, T, P);
        case Kind::chi_sq: return chi_sq(T, P);
        case Kind::generic_f: return f_div(f_, T, P);
    }
    return 0.0;
}

const char* DivergenceSpec::name() const {
    switch (kind_) {
        case Kind::kl: return "kl";
        case Kind::alpha: return "alpha";
        case Kind::renyi: return "renyi";
        case Kind::chi_sq: return "chisq";
        case Kind::generic_f: return "generic_f";
    }
    return "?";
}

double eta_of(const DivergenceSpec& spec) { return spec.eta(); }

PqStatistics pq_statistics(const Distribution& P, const Distribution& Q) {
    if (P.size() != Q.size()) raise(errc::dimension_mismatch, "P/Q size mismatch");
    double gap = 0.0;
    for (int i = 0; i < P.size(); ++i) gap = std::max(gap, std::fabs(P[i] - Q[i]));
    if (gap <= 1e-12)
        raise(errc::equal_distributions, "pq_statistics requires P != Q (sup-norm gap > 1e-12)");

    PqStatistics st;
    st.alphas.resize(P.size());
    double d = 0.0;
    for (int i = 0; i < P.size(); ++i) {
        st.alphas[i] = std::log(P[i] / Q[i]);
        d += P[i] * st.alphas[i];
    }
    double v = 0.0;
    for (int i = 0; i < P.size(); ++i) {
        const double c = st.alphas[i] - d;
        v += P[i] * c * c;
    }
    st.kl_divergence = d;
    st.variance = v;
    return st;
}

double power_div_statistic(double lambda, const TypeDistribution& t, const Distribution& P) {
    if (t.size() != P.size()) raise(errc::dimension_mismatch, "type/distribution size mismatch");
    const double n = static_cast<double>(t.n);
    if (lambda == 0.0) {
        double s = 0.0;
        for (int i = 0; i < t.size(); ++i) {
            const double y = static_cast<double>(t.counts[i]);
            if (y > 0.0) s += y * std::log(y / (n * P[i]));
        }
        return 2.0 * s;
    }
    if (lambda == -1.0) {
        double s = 0.0;
        for (int i = 0; i < t.size(); ++i) {
            const double y = static_cast<double>(t.counts[i]);
            if (y == 0.0) return std::numeric_limits<double>::infinity();
            s += n * P[i] * std::log(n * P[i] / y);
        }
        return 2.0 * s;
    }
    double s = 0.0;
    for (int i = 0; i < t.size(); ++i) {
        const double y = static_cast<double>(t.counts[i]);
        if (y > 0.0) s += y * (std::pow(y / (n * P[i]), lambda) - 1.0);
    }
    return 2.0 / (lambda * (lambda + 1.0)) * s;
}

}  // namespace divtest
