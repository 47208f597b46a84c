import math

import numpy as np
import pytest

import harmonic as hm


@pytest.fixture(scope="module")
def domain():
    return hm.Domain(hm.GridSpec.interval(math.pi, 200))


def test_spectrum(domain):
    assert domain.lambda1 == pytest.approx(1.0, abs=1e-4)
    assert domain.lambda2 == pytest.approx(4.0, abs=1e-3)
    assert domain.phi1.shape == (200,)
    assert np.all(domain.phi1 > 0)
    assert domain.lambda1 < domain.nu() < domain.lambda2
    assert domain.nu(domain.phi1) == pytest.approx(domain.lambda2, rel=1e-10)


def test_nonlinearity():
    g = hm.Nonlinearity.softplus(-1.0, 1.0)
    assert g.value(0.0) == pytest.approx(2 * math.log(2))
    assert g.slope_sup == 1.0


def test_trace_and_classify(domain):
    gamma = 0.5 * (domain.lambda1 + domain.nu())
    problem = hm.Problem(domain, hm.Nonlinearity.softplus(-1.0, gamma))
    curve = hm.trace(problem, -10.0, 10.0)
    assert len(curve) > 10
    assert np.all(np.diff(curve.xi) > 0)
    info = hm.classify(problem, curve)
    assert info["label"] == "parabola-min"
    assert info["consistent"]
    tp = hm.turning_point(problem, curve)
    assert tp["mu0"] == pytest.approx(info["mu0"])
    assert tp["mu2_identity"] > 0
    assert hm.count_solutions(problem, tp["mu0"] + 0.5)["count"] == 2
    assert hm.count_solutions(problem, tp["mu0"] - 0.5)["count"] == 0
    point = hm.solve_at(problem, curve, 1.25)
    assert point["xi"] == 1.25
    assert point["residual"] < 1e-8


def test_hypothesis_violation_raises(domain):
    with pytest.raises(hm.ValidationError, match="nu1 < nu"):
        hm.Problem(domain, hm.Nonlinearity.softplus(-1.0, domain.nu() + 0.1))


def test_custom_weight(domain):
    problem = hm.Problem(domain, hm.Nonlinearity.linear(0.5), weight=domain.phi1)
    assert problem.nu == pytest.approx(domain.lambda2, rel=1e-10)


def test_antimax(domain):
    report = hm.antimax(domain, scan_steps=20)
    assert report["delta"] > 0
    assert report["verdict"][0] == "strictly-negative"


def test_fishing():
    result = hm.fishing(200)
    assert result["mu_bar"] > 0
    assert 0 < result["xi_turn"] < result["xi0"]
    assert result["single_maximum"]
    assert np.all(result["u0"] > 0)
