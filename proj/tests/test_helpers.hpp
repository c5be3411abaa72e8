#pragma once

#include <cmath>
#include <vector>

#include "divtest/rng.hpp"
#include "divtest/simplex.hpp"

namespace divtest::testing {

/// Random strictly positive distribution with min entry >= min_entry
/// (flat Dirichlet with rejection).
inline Distribution random_distribution(int k, SeededSource& src, double min_entry = 0.05) {
    for (;;) {
        std::vector<double> w(k);
        double sum = 0.0;
        for (double& x : w) {
            x = -std::log(1.0 - src.next_uniform());
            sum += x;
        }
        double mn = 1.0;
        double acc = 0.0;
        for (int i = 0; i < k; ++i) {
            w[i] /= sum;
            mn = std::min(mn, w[i]);
            acc += w[i];
        }
        w[k - 1] += 1.0 - acc;  // absorb rounding so the vector sums to 1 exactly
        if (mn >= min_entry) return Distribution(w);
    }
}

/// Random interior simplex point (same sampler, lower floor).
inline std::vector<double> random_simplex_point(int k, SeededSource& src, double min_entry = 1e-3) {
    return random_distribution(k, src, min_entry).probs();
}

/// Random tangent direction (sums to zero, unit Euclidean norm).
inline std::vector<double> random_tangent(int k, SeededSource& src) {
    std::vector<double> v(k);
    double mean = 0.0;
    for (double& x : v) {
        x = src.next_uniform() - 0.5;
        mean += x;
    }
    mean /= k;
    double norm = 0.0;
    for (double& x : v) {
        x -= mean;
        norm += x * x;
    }
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
}

}  // namespace divtest::testing
