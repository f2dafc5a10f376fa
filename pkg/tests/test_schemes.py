import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cvtradeoff.gaussian import DomainError, fidelity_vs_coherent
from cvtradeoff.schemes import (
    FeedForwardScheme,
    NoiseBudget,
    budget_from_outputs,
    degraded_feedforward_noises,
    degraded_feedforward_point,
    feedforward_noises,
    feedforward_output,
    feedforward_point,
    fidelities_from_budget,
    general_noise_bound,
    teleportation_output,
    teleportation_point,
    tradeoff_bound,
    unity_gain_noise_bound,
)

T_GRID = [k / 100 for k in range(1, 100)]
open_T = st.floats(1e-6, 1 - 1e-6)


def test_feedforward_noises_quarter():
    b = feedforward_noises(0.25)
    assert b.g == 1.0
    assert b.var_n == pytest.approx(2 / 3, abs=1e-15)
    assert b.var_m == pytest.approx(5 / 3, abs=1e-15)
    assert unity_gain_noise_bound(b.var_m) == pytest.approx(2 / 3, abs=1e-15)


def test_feedforward_noises_heterodyne_limit():
    assert feedforward_noises(1e-12).var_m == pytest.approx(1.0, abs=1e-11)


@pytest.mark.parametrize("T", [0.0, 1.0, -0.5, 1.5])
def test_feedforward_domain(T):
    with pytest.raises(DomainError):
        feedforward_noises(T)


def test_fidelities_from_budget_examples():
    assert fidelities_from_budget(NoiseBudget(1.0, 2.0, 1.0)) == (0.5, 0.5)
    G, F = fidelities_from_budget(NoiseBudget(1.0, 2 / 3, 5 / 3))
    assert G == pytest.approx(3 / 7, abs=1e-15)
    assert F == pytest.approx(3 / 4, abs=1e-15)
    G, _ = fidelities_from_budget(NoiseBudget(1.0, 1e-9, 1e12))
    assert G < 1e-11


def test_fidelities_require_unity_gain():
    with pytest.raises(DomainError):
        fidelities_from_budget(NoiseBudget(1.2, 1.0, 1.0))


def test_noise_budget_constraints():
    with pytest.raises(DomainError):
        NoiseBudget(1.0, 2.0, 0.9)
    with pytest.raises(DomainError):
        NoiseBudget(1.0, 0.5, 1.5)  # product 0.75 < 1
    with pytest.raises(DomainError):
        NoiseBudget(2.0, 0.5, 3.0)  # below |1 - g^2| / g^2 = 0.75
    NoiseBudget(2.0, 0.75, 4 / 3)


def test_tradeoff_bound_examples():
    assert tradeoff_bound(0.5) == pytest.approx(0.5, abs=1e-15)
    assert tradeoff_bound(3 / 7) == pytest.approx(0.75, abs=1e-12)
    assert tradeoff_bound(0.19 / 1.19) == pytest.approx(0.95, abs=1e-12)


@pytest.mark.parametrize("G", [0.0, -0.1, 0.5000001, 1.0])
def test_tradeoff_bound_domain(G):
    with pytest.raises(DomainError):
        tradeoff_bound(G)


def test_unity_gain_noise_bound_examples():
    assert unity_gain_noise_bound(1.0) == 2.0
    assert unity_gain_noise_bound(5 / 3) == pytest.approx(2 / 3, abs=1e-15)
    assert unity_gain_noise_bound(math.cosh(2.0)) == pytest.approx(2 * math.exp(-2), abs=1e-14)
    assert 2 * math.exp(-2) == pytest.approx(0.2707, abs=1e-4)
    with pytest.raises(DomainError):
        unity_gain_noise_bound(0.999)


@given(st.floats(1.0, 1e6))
def test_unity_gain_bound_implies_product_bound(var_m):
    assert unity_gain_noise_bound(var_m) * var_m >= 1.0 - 1e-12
    assert unity_gain_noise_bound(var_m) >= general_noise_bound(var_m)


def test_feedforward_point_examples():
    pt = feedforward_point(0.25)
    assert (pt.G, pt.F) == pytest.approx((3 / 7, 0.75), abs=1e-15)
    pt = feedforward_point(0.81)
    assert pt.G == pytest.approx(0.19 / 1.19, abs=1e-15)
    assert pt.G == pytest.approx(0.15966, abs=1e-5)
    assert pt.F == pytest.approx(0.95, abs=1e-12)
    pt = feedforward_point(1 - 1e-12)
    assert pt.F == pytest.approx(1.0, abs=1e-6)
    assert pt.G == pytest.approx(0.0, abs=1e-11)


@pytest.mark.parametrize("T", T_GRID)
def test_feedforward_closed_forms_and_saturation(T):
    pt = feedforward_point(T)
    assert pt.G == pytest.approx((1 - T) / (2 - T), abs=1e-12)
    assert pt.F == pytest.approx((1 - T) / (2 - 2 * math.sqrt(T)), abs=1e-12)
    assert abs(pt.F - tradeoff_bound(pt.G)) < 1e-9
    assert abs(pt.budget.var_n - unity_gain_noise_bound(pt.budget.var_m)) < 1e-9


def test_monotonicity():
    pts = [feedforward_point(T) for T in T_GRID]
    G = np.array([p.G for p in pts])
    F = np.array([p.F for p in pts])
    assert np.all(np.diff(G) < 0)
    assert np.all(np.diff(F) > 0)


def test_teleportation_examples():
    pt = teleportation_point(0.0)
    assert (pt.G, pt.F) == (0.5, 0.5)
    pt = teleportation_point(1.0)
    assert pt.budget.var_n == pytest.approx(0.2707, abs=1e-4)
    assert pt.F == pytest.approx(2 / (2 + 2 * math.exp(-2)), abs=1e-15)
    assert pt.F == pytest.approx(0.8808, abs=1e-4)
    with pytest.raises(DomainError):
        teleportation_point(-0.01)


def estimation_bound(F):
    """Largest G allowed at transfer fidelity ``F``, from inverting the unity-gain noise bound."""
    var_n = 2 / F - 2
    return 2 / (3 + var_n / 4 + 1 / var_n)


@given(st.floats(0.0, 5.0))
def test_teleportation_saturates(r):
    # G(F) is flat near G = 1/2 while F(G) is vertical, so check the well-conditioned direction
    pt = teleportation_point(r)
    assert abs(pt.G - estimation_bound(pt.F)) < 1e-12


@pytest.mark.parametrize("r", [1e-3, 0.1, 1.0, 3.0])
def test_teleportation_saturates_forward(r):
    pt = teleportation_point(r)
    assert abs(pt.F - tradeoff_bound(pt.G)) < 1e-9


@given(open_T)
def test_teleportation_matches_feedforward_frontier(T):
    ff = feedforward_point(T)
    # var_m = cosh 2r = (1+T)/(1-T)  =>  r = acosh(var_m) / 2
    r = math.acosh(ff.budget.var_m) / 2
    tp = teleportation_point(r)
    assert tp.G == pytest.approx(ff.G, abs=1e-12)
    assert abs(tp.F - ff.F) < 1e-9


# -- circuit-level cross-checks -------------------------------------------------


@pytest.mark.parametrize("T", [0.1, 0.25, 0.5, 0.75, 0.9])
def test_feedforward_circuit_reproduces_noise_formulas(T):
    amplitude = (3.0, -2.0)
    output, estimate = feedforward_output(T, amplitude)
    np.testing.assert_allclose(output.mean, amplitude, atol=1e-12)
    np.testing.assert_allclose(estimate.mean, amplitude, atol=1e-12)
    budget = budget_from_outputs(output, estimate)
    expected = feedforward_noises(T)
    assert budget.var_n == pytest.approx(expected.var_n, abs=1e-12)
    assert budget.var_m == pytest.approx(expected.var_m, abs=1e-12)
    # phase insensitive: no x-p asymmetry or correlation
    assert output.cov[0, 0] == pytest.approx(output.cov[1, 1], abs=1e-12)
    assert output.cov[0, 1] == pytest.approx(0.0, abs=1e-12)
    assert fidelity_vs_coherent(amplitude, output) == pytest.approx(feedforward_point(T).F, abs=1e-12)


def test_feed_forward_gains():
    s = FeedForwardScheme(0.25)
    assert s.lam == pytest.approx(math.sqrt(2) * 0.5 / math.sqrt(0.75))
    assert s.kappa == pytest.approx(math.sqrt(2) / math.sqrt(0.75))
    # unity-gain condition
    assert math.sqrt(0.25) + s.lam * math.sqrt(0.75) / math.sqrt(2) == pytest.approx(1.0)


@pytest.mark.parametrize("r", [0.0, 0.3, 1.0, 2.0])
def test_teleportation_circuit(r):
    amplitude = (1.5, 0.5)
    output, estimate = teleportation_output(r, amplitude)
    np.testing.assert_allclose(output.mean, amplitude, atol=1e-12)
    np.testing.assert_allclose(estimate.mean, amplitude, atol=1e-12)
    budget = budget_from_outputs(output, estimate)
    pt = teleportation_point(r)
    assert budget.var_n == pytest.approx(pt.budget.var_n, abs=1e-9)
    assert budget.var_m == pytest.approx(pt.budget.var_m, abs=1e-9)
    assert fidelity_vs_coherent(amplitude, output) == pytest.approx(pt.F, abs=1e-12)


# -- detector inefficiency --------------------------------------------------------


@pytest.mark.parametrize("T", T_GRID[::7])
def test_degraded_lossless_limit(T):
    assert degraded_feedforward_point(T, 1.0, 1.0) == feedforward_point(T)
    b = degraded_feedforward_noises(T, 1.0, 1.0)
    ideal = feedforward_noises(T)
    assert b.var_n == pytest.approx(ideal.var_n, abs=1e-15)
    assert b.var_m == pytest.approx(ideal.var_m, abs=1e-15)


def test_degraded_quarter_is_below_ideal():
    pt = degraded_feedforward_point(0.25, 0.95, 0.99)
    assert pt.F < 0.75
    assert pt.G < 3 / 7


def test_degraded_sweep_monotone():
    for T in T_GRID:
        d, i = degraded_feedforward_point(T, 0.95, 0.99), feedforward_point(T)
        assert d.F <= i.F
        assert d.G <= i.G


@pytest.mark.parametrize("T", [0.1, 0.4, 0.8])
@pytest.mark.parametrize("eff,vis", [(0.95, 0.99), (0.7, 0.9)])
def test_degraded_closed_form_matches_circuit(T, eff, vis):
    output, estimate = feedforward_output(T, (0.4, -1.2), eff, vis)
    np.testing.assert_allclose(output.mean, (0.4, -1.2), atol=1e-12)
    budget = budget_from_outputs(output, estimate)
    closed = degraded_feedforward_noises(T, eff, vis)
    assert budget.var_n == pytest.approx(closed.var_n, abs=1e-12)
    assert budget.var_m == pytest.approx(closed.var_m, abs=1e-12)


@pytest.mark.parametrize("eff,vis", [(0.0, 0.9), (1.1, 0.9), (0.9, 0.0), (0.9, 1.01)])
def test_degraded_domain(eff, vis):
    with pytest.raises(DomainError):
        degraded_feedforward_point(0.5, eff, vis)
