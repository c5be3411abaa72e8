"""Smoke tests for the divtest python module (built by CMake; point
PYTHONPATH at the build directory)."""

import math

import pytest

import divtest


def test_distribution_and_types():
    p = divtest.Distribution([0.7, 0.3])
    assert len(p) == 2
    assert p[0] == 0.7
    with pytest.raises(ValueError):
        divtest.Distribution([0.5, 0.5, 0.1])

    t = divtest.empirical_type([0, 1, 1, 0, 1], 2)
    assert t.counts == [2, 3]
    assert divtest.type_count(3, 2) == 6
    assert len(divtest.list_types(2, 4)) == 5


def test_divergences():
    p = divtest.Distribution([0.5, 0.5])
    assert divtest.kl([0.7, 0.3], p) == pytest.approx(0.0822829, abs=1e-6)
    assert divtest.alpha_div(0.0, [0.7, 0.3], p) == pytest.approx(0.0843748, abs=1e-6)
    assert divtest.renyi_div(2.0, [0.7, 0.3], p) == pytest.approx(math.log(1.16), rel=1e-12)
    assert divtest.eta_of(divtest.DivergenceSpec.renyi(3.0)) == 1.5

    st = divtest.pq_statistics(divtest.Distribution([0.7, 0.3]), p)
    assert st.kl_divergence == pytest.approx(0.0822829, abs=1e-6)
    assert st.variance == pytest.approx(0.1507619, abs=1e-6)


def test_special_functions():
    assert divtest.chi2_quantile(2, 0.05) == pytest.approx(-2 * math.log(0.05), rel=1e-10)
    assert divtest.norm_quantile(0.05) == pytest.approx(1.6448536269514722, abs=1e-9)
    assert divtest.ln_gamma(11.0) == pytest.approx(math.log(math.factorial(10)), rel=1e-12)


def test_calibration_and_errors():
    p0 = divtest.Distribution([0.5, 0.5])
    q = divtest.Distribution([0.7, 0.3])
    spec = divtest.DivergenceSpec.kl()
    cal = divtest.exact_calibrate(spec, p0, 4, 0.3)
    assert cal.r_star == pytest.approx(0.41197960825054114, abs=1e-12)
    assert cal.achieved_type1 == pytest.approx(0.125, abs=1e-12)

    cfg = divtest.TestConfig(spec, cal.r_star, p0)
    beta = divtest.type2_exact(cfg, q, 4)
    assert beta.value == pytest.approx(0.7518, abs=1e-12)

    t = divtest.TypeDistribution([2, 2])
    assert divtest.decide(cfg, t) == divtest.Decision.accept_h0


def test_sampling_reproducible():
    p = divtest.Distribution([0.7, 0.3])
    a = divtest.sample_type(p, 100, divtest.SeededSource(7, 0))
    b = divtest.sample_type(p, 100, divtest.SeededSource(7, 0))
    assert a.counts == b.counts
    assert sum(a.counts) == 100


def test_optimizer():
    p = divtest.Distribution([0.7, 0.3])
    q = divtest.Distribution([0.5, 0.5])
    sol = divtest.kkt_minimize(p, q, 0.01)
    assert sol.min_value == pytest.approx(-0.0388281, abs=1e-6)
    assert sol.gamma_star.probs[0] == pytest.approx(0.6541742, abs=1e-6)

    rt = divtest.round_to_type(p, q, 100, 0.01)
    assert rt.t_star.counts == [66, 34]
    assert rt.ell_gap <= rt.kappa_bound

    with pytest.raises(ValueError):
        divtest.kkt_minimize(p, q, 9.0)


def test_prediction():
    p = divtest.Distribution([0.7, 0.3])
    q = divtest.Distribution([0.5, 0.5])
    e = divtest.predict_divergence_test(p, q, 1000, 0.05, 2)
    assert e.predicted_minus_ln_beta == pytest.approx(58.2174, abs=1e-3)
    n = divtest.predict_np(p, q, 1000, 0.05)
    assert n.predicted_minus_ln_beta == pytest.approx(62.0866, abs=1e-3)
    assert e.predicted_minus_ln_beta < n.predicted_minus_ln_beta
