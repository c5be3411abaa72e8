#include "divtest/simplex.hpp"

#include <cmath>
#include <utility>

#include "divtest/errors.hpp"
#include "divtest/special_functions.hpp"

namespace divtest {

Distribution::Distribution(std::vector<double> weights) : probs_(std::move(weights)) {
    if (probs_.size() < 2) raise(errc::invalid_argument, "Distribution requires k >= 2");
    double sum = 0.0;
    for (double w : probs_) {
        if (!(w > 0.0)) raise(errc::non_positive_entry, "Distribution entries must be strictly positive");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-12) raise(errc::not_normalized, "Distribution entries must sum to 1");
}

Distribution make_distribution(std::vector<double> weights) { return Distribution(std::move(weights)); }

std::vector<double> TypeDistribution::fractions() const {
    std::vector<double> f(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        f[i] = n > 0 ? static_cast<double>(counts[i]) / static_cast<double>(n) : 0.0;
    return f;
}

TypeDistribution empirical_type(std::span<const int> symbols, int k) {
    if (k < 2) raise(errc::invalid_argument, "empirical_type requires k >= 2");
    TypeDistribution t;
    t.counts.assign(k, 0);
    for (int s : symbols) {
        if (s < 0 || s >= k) raise(errc::symbol_out_of_range, "symbol outside [0, k)");
        ++t.counts[s];
    }
    t.n = static_cast<std::int64_t>(symbols.size());
    return t;
}

long double type_count(int k, std::int64_t n) {
    long double c = 1.0L;
    for (int i = 1; i < k; ++i) c = c * static_cast<long double>(n + i) / i;
    return c;
}

TypeEnumerator::TypeEnumerator(int k, std::int64_t n) : counts_(k, 0), n_(n), valid_(true) {
    if (k < 2) raise(errc::invalid_argument, "TypeEnumerator requires k >= 2");
    if (n < 1) raise(errc::invalid_argument, "TypeEnumerator requires n >= 1");
    counts_.back() = n;  // lexicographically smallest composition
}

void TypeEnumerator::advance() {
    const int k = static_cast<int>(counts_.size());
    // Find the rightmost position j < k-1 with mass strictly to its right;
    // increment it and push the remainder to the tail.
    std::int64_t tail = counts_[k - 1];
    for (int j = k - 2; j >= 0; --j) {
        if (tail > 0) {
            ++counts_[j];
            for (int i = j + 1; i < k - 1; ++i) counts_[i] = 0;
            counts_[k - 1] = tail - 1;
            return;
        }
        tail += counts_[j];
    }
    valid_ = false;
}

void for_each_type(int k, std::int64_t n,
                   const std::function<void(const std::vector<std::int64_t>&)>& visit) {
    for (TypeEnumerator e(k, n); e.valid(); e.advance()) visit(e.counts());
}

double log_type_class_prob(std::span<const std::int64_t> counts, const Distribution& Q) {
    if (static_cast<int>(counts.size()) != Q.size())
        raise(errc::dimension_mismatch, "type/distribution size mismatch");
    std::int64_t n = 0;
    for (std::int64_t c : counts) n += c;
    double lp = ln_gamma(static_cast<double>(n) + 1.0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        lp -= ln_gamma(static_cast<double>(counts[i]) + 1.0);
        if (counts[i] > 0) lp += static_cast<double>(counts[i]) * std::log(Q[i]);
    }
    return lp;
}

double log_type_class_prob(const TypeDistribution& t, const Distribution& Q) {
    return log_type_class_prob(std::span<const std::int64_t>(t.counts), Q);
}

TypeDistribution sample_type(const Distribution& P, std::int64_t n, SeededSource& src) {
    if (n < 1) raise(errc::invalid_argument, "sample_type requires n >= 1");
    std::vector<double> cum(P.size());
    double acc = 0.0;
    for (int i = 0; i < P.size(); ++i) {
        acc += P[i];
        cum[i] = acc;
    }
    cum.back() = 1.0;  // guard against round-off at the top end

    TypeDistribution t;
    t.counts.assign(P.size(), 0);
    t.n = n;
    for (std::int64_t draw = 0; draw < n; ++draw) {
        const double u = src.next_uniform();
        int i = 0;
        while (u >= cum[i]) ++i;
        ++t.counts[i];
    }
    return t;
}

}  // namespace divtest
