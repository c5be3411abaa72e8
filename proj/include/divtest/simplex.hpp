#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "divtest/rng.hpp"

namespace divtest {

/// A strictly positive probability vector on a finite alphabet of size k >= 2.
/// Construction validates positivity and normalization (|sum - 1| <= 1e-12)
/// and does not renormalize.  Immutable afterwards.
class Distribution {
public:
    explicit Distribution(std::vector<double> weights);

    int size() const noexcept { return static_cast<int>(probs_.size()); }
    double operator[](std::size_t i) const noexcept { return probs_[i]; }
    const std::vector<double>& probs() const noexcept { return probs_; }
    std::span<const double> span() const noexcept { return probs_; }

private:
    std::vector<double> probs_;
};

/// Validated constructor, mirroring the library's factory-style API.
Distribution make_distribution(std::vector<double> weights);

/// An integer count vector summing to n (the empirical type of a length-n
/// sequence).  Zeros allowed; counts/n lies on the closed simplex.
struct TypeDistribution {
    std::vector<std::int64_t> counts;
    std::int64_t n = 0;

    int size() const noexcept { return static_cast<int>(counts.size()); }
    std::vector<double> fractions() const;
};

/// Count the occurrences of each symbol in [0, k).
TypeDistribution empirical_type(std::span<const int> symbols, int k);

/// Number of count vectors of length k summing to n, C(n+k-1, k-1), as a
/// long double (exact below 2^64, an upper-bound estimate beyond).
long double type_count(int k, std::int64_t n);

/// Streaming enumeration of all compositions of n into k non-negative parts,
/// in ascending lexicographic order.  Constant memory per step, so exhaustive
/// passes at k=3, n=3000 (~4.5M types) stay cheap.
class TypeEnumerator {
public:
    TypeEnumerator(int k, std::int64_t n);

    bool valid() const noexcept { return valid_; }
    void advance();
    const std::vector<std::int64_t>& counts() const noexcept { return counts_; }
    std::int64_t n() const noexcept { return n_; }

private:
    std::vector<std::int64_t> counts_;
    std::int64_t n_;
    bool valid_;
};

/// Visit every type of (k, n) once, in enumeration order.
void for_each_type(int k, std::int64_t n,
                   const std::function<void(const std::vector<std::int64_t>&)>& visit);

/// ln Q^n(T(t)): natural log of the probability, under Q, of the type class
/// of t.  Multinomial coefficient via ln-gamma, so n up to 10^4 is fine.
double log_type_class_prob(const TypeDistribution& t, const Distribution& Q);
double log_type_class_prob(std::span<const std::int64_t> counts, const Distribution& Q);

/// Multinomial(n, P) sample as n inverse-CDF categorical draws from src.
TypeDistribution sample_type(const Distribution& P, std::int64_t n, SeededSource& src);

}  // namespace divtest
