#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "divtest/errors.hpp"
#include "divtest/tests_engine.hpp"
#include "test_helpers.hpp"

using namespace divtest;

namespace {

const Distribution kHalf = make_distribution({0.5, 0.5});
const Distribution kP73 = make_distribution({0.7, 0.3});
const DivergenceSpec kKl = DivergenceSpec::kl_divergence();

}  // namespace

TEST_CASE("decide uses strict acceptance") {
    TestConfig cfg(kKl, 0.5, kHalf);
    TypeDistribution balanced{{2, 2}, 4};
    CHECK(decide(cfg, balanced) == Decision::accept_h0);  // statistic 0 < r

    TypeDistribution corner{{4, 0}, 4};  // statistic ln 2 = 0.693 >= 0.5
    CHECK(decide(cfg, corner) == Decision::reject_h0);

    // boundary: statistic exactly equal to the threshold rejects
    const double stat = kKl.evaluate(corner.fractions(), kHalf);
    TestConfig boundary(kKl, stat, kHalf);
    CHECK(decide(boundary, corner) == Decision::reject_h0);

    CHECK_THROWS_AS(TestConfig(kKl, 0.0, kHalf), error);
    TypeDistribution wrong{{1, 1, 2}, 4};
    CHECK_THROWS_AS(decide(cfg, wrong), error);
}

TEST_CASE("asymptotic threshold") {
    const double r = asymptotic_threshold(kKl, 2, 1000, 0.05, 0.0);
    CHECK(r == doctest::Approx(0.0019207294103470642).epsilon(1e-9));
    CHECK(r == doctest::Approx(0.00192073).epsilon(1e-5));
    CHECK_THROWS_AS(asymptotic_threshold(kKl, 2, 1000, 0.05, 0.05), error);
    CHECK_THROWS_AS(asymptotic_threshold(kKl, 2, 1000, 0.05, 0.06), error);
    // exact 1/n scaling
    CHECK(asymptotic_threshold(kKl, 2, 2000, 0.05, 0.0) == r / 2.0);
}

TEST_CASE("exact calibration on the 5-type instance") {
    // n=4, P0 uniform: statistic values 0 (w 6/16), 0.1308 (w 8/16),
    // ln 2 (w 2/16)
    const CalibrationResult res = exact_calibrate(kKl, kHalf, 4, 0.3);
    CHECK(res.r_star == doctest::Approx(0.41197960825054114).epsilon(1e-12));
    CHECK(res.achieved_type1 == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(res.mode == CalibrationResult::Mode::exact);

    const CalibrationResult loose = exact_calibrate(kKl, kHalf, 4, 0.99);
    CHECK(loose.r_star ==
          doctest::Approx(0.5 * (0.25 * std::log(0.5) + 0.75 * std::log(1.5))).epsilon(1e-12));
    CHECK(loose.achieved_type1 == doctest::Approx(0.625).epsilon(1e-12));
}

TEST_CASE("calibration achieves the level and is optimal") {
    SeededSource src(21, 0);
    for (int rep = 0; rep < 30; ++rep) {
        const int k = 2 + rep % 2;
        const Distribution p0 = divtest::testing::random_distribution(k, src);
        const std::int64_t n = 10 + (rep % 5) * 17;
        const double eps = 0.02 + 0.13 * src.next_uniform();
        const CalibrationResult res = exact_calibrate(kKl, p0, n, eps);
        CHECK(res.achieved_type1 <= eps);

        // lowering the threshold below the chosen atom must violate eps
        const auto atoms = exact_statistic_atoms(k, n, p0, divergence_stat_fn(kKl, p0));
        double below = 0.0;
        for (std::size_t j = 0; j < atoms.size(); ++j) {
            if (atoms[j].value < res.r_star) below = atoms[j].value;  // d_j = largest atom < r*
        }
        double tail_incl = 0.0;
        for (const Atom& a : atoms)
            if (a.value >= below - 1e-15) tail_incl += a.weight;
        if (below > atoms.front().value + 1e-15) CHECK(tail_incl > eps);
    }
}

TEST_CASE("exact errors on the 5-type instance") {
    TestConfig cfg(kKl, 0.41197960825054114, kHalf);
    const ErrorValue beta = type2_exact(cfg, kP73, 4);
    CHECK(beta.value == doctest::Approx(0.7518).epsilon(1e-12));
    CHECK(beta.ln_value == doctest::Approx(std::log(0.7518)).epsilon(1e-12));

    const ErrorValue alpha1 = type1_exact(cfg, 4);
    CHECK(alpha1.value == doctest::Approx(0.125).epsilon(1e-12));

    // huge threshold: never reject
    TestConfig wide(kKl, 10.0, kHalf);
    CHECK(type1_exact(wide, 4).value == 0.0);
    CHECK(type1_exact(wide, 4).ln_value == -std::numeric_limits<double>::infinity());
    CHECK(type2_exact(wide, kP73, 4).value == doctest::Approx(1.0).epsilon(1e-12));

    // tiny threshold: accept only the zero-statistic type (2,2)
    TestConfig narrow(kKl, 1e-12, kHalf);
    CHECK(type2_exact(narrow, kP73, 4).value ==
          doctest::Approx(6.0 * 0.49 * 0.09).epsilon(1e-12));
}

TEST_CASE("error monotonicity in the threshold") {
    double prev1 = 1.0, prev2 = -1.0;
    for (double r : {0.01, 0.05, 0.1, 0.2, 0.4, 0.8}) {
        TestConfig cfg(kKl, r, kHalf);
        const double t1 = type1_exact(cfg, 30).value;
        const double t2 = type2_exact(cfg, kP73, 30).value;
        CHECK(t1 <= prev1 + 1e-15);
        CHECK(t2 >= prev2 - 1e-15);
        prev1 = t1;
        prev2 = t2;
    }
}

TEST_CASE("log-space type-II error stays meaningful when beta underflows") {
    // flagship instance at n = 2000: beta ~ e^-107, fine; push the threshold
    // down so acceptance keeps only types near P0 and beta gets tiny under Q
    const Distribution q_far = make_distribution({0.02, 0.98});
    TestConfig cfg(kKl, 1e-4, kP73);
    const ErrorValue beta = type2_exact(cfg, q_far, 2000);
    CHECK(beta.ln_value < -700.0);  // below double underflow for value
    CHECK(beta.value == 0.0);
    CHECK(std::isfinite(beta.ln_value));
}

TEST_CASE("neyman-pearson statistic and calibration") {
    TypeDistribution t{{3, 1}, 4};
    CHECK(np_statistic(t, kHalf, kP73) ==
          doctest::Approx(3.0 * std::log(1.4) + std::log(0.6)).epsilon(1e-14));

    // n = 1, P0 uniform, Q = (0.7, 0.3): the accept region for eps >= 1/2 is
    // the single less-Q-likely symbol (symbol 1)
    const CalibrationResult cal = np_exact_calibrate(kHalf, kP73, 1, 0.5);
    CHECK(cal.achieved_type1 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(cal.r_star > std::log(0.3 / 0.5));
    CHECK(cal.r_star < std::log(0.7 / 0.5));
    const ErrorValue beta = np_type2_exact(kHalf, kP73, 1, cal.r_star);
    CHECK(beta.value == doctest::Approx(0.3).epsilon(1e-12));  // Q(symbol 1)

    CHECK_THROWS_AS(np_exact_calibrate(kHalf, kHalf, 4, 0.1), error);

    SeededSource src(22, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const Distribution p0 = divtest::testing::random_distribution(2, src);
        const Distribution q = divtest::testing::random_distribution(2, src);
        double gap = 0.0;
        for (int i = 0; i < 2; ++i) gap = std::max(gap, std::fabs(p0[i] - q[i]));
        if (gap <= 1e-12) continue;
        const double eps = 0.02 + 0.2 * src.next_uniform();
        CHECK(np_exact_calibrate(p0, q, 25, eps).achieved_type1 <= eps);
    }
}

TEST_CASE("monte carlo estimators") {
    TestConfig cfg(kKl, 0.05, kHalf);
    SeededSource a(99, 0), b(99, 0);
    const McEstimate m1 = type1_mc(cfg, 50, 2000, a);
    const McEstimate m2 = type1_mc(cfg, 50, 2000, b);
    CHECK(m1.estimate == m2.estimate);  // determinism
    CHECK(m1.ci_low <= m1.estimate);
    CHECK(m1.estimate <= m1.ci_high);

    SeededSource c(99, 0);
    CHECK_THROWS_AS(type1_mc(cfg, 50, 0, c), error);
}

TEST_CASE("wilson interval covers the exact value") {
    // k=2, n=50, threshold from exact calibration; 100 seeded replications
    const CalibrationResult cal = exact_calibrate(kKl, kP73, 50, 0.1);
    TestConfig cfg(kKl, cal.r_star, kP73);
    const double exact = type1_exact(cfg, 50).value;
    int covered = 0;
    for (int rep = 0; rep < 100; ++rep) {
        SeededSource src(2024, static_cast<std::uint64_t>(rep));
        const McEstimate est = type1_mc(cfg, 50, 2000, src);
        if (est.ci_low <= exact && exact <= est.ci_high) ++covered;
    }
    CHECK(covered >= 93);
}

TEST_CASE("calibration at k = 4") {
    const Distribution p0 = make_distribution({0.4, 0.3, 0.2, 0.1});
    const CalibrationResult cal = exact_calibrate(kKl, p0, 50, 0.05);
    CHECK(cal.achieved_type1 <= 0.05);
    TestConfig cfg(kKl, cal.r_star, p0);
    CHECK(type1_exact(cfg, 50).value == doctest::Approx(cal.achieved_type1).epsilon(1e-12));
}

TEST_CASE("enumeration budget guard") {
    CHECK_NOTHROW(check_enumeration_budget(4, 100000));  // k <= 4 is always allowed
    CHECK_NOTHROW(check_enumeration_budget(5, 40));      // C(44,4) ~ 1.4e5
    CHECK_THROWS_AS(check_enumeration_budget(5, 300), error);  // C(304,4) ~ 3.5e8
}
