import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from xgate.analytic import GateFamily
from xgate.model import PulseParams
from xgate import noise
from xgate.noise import (NoiseModel, QuadratureError, Recipe, analytic_noise_decay, crossover, noise_sweep,
                         noisy_fidelity)
from xgate.propagate import PropagatorConfig, propagate_rotating
from xgate.analytic import target_gate
from xgate.equiv import fidelity

RES = PulseParams(1000.0, -100.0, 20.0, 16.0, 200.0)
CONST = PulseParams(1000.0, -100.0, 20.0, 0.0, 200.0)


def test_nodes_are_a_normalized_gaussian_rule():
    offsets, weights = NoiseModel(2.0, 41).nodes()
    assert weights.sum() == pytest.approx(1.0, abs=1e-14)
    assert (weights * offsets).sum() == pytest.approx(0.0, abs=1e-12)
    assert (weights * offsets**2).sum() == pytest.approx(4.0, rel=1e-12)
    assert (weights * offsets**4).sum() == pytest.approx(3 * 16.0, rel=1e-12)


@pytest.mark.parametrize("kwargs", [dict(sigma=-1.0), dict(sigma=1.0, quad_order=40), dict(sigma=math.inf)])
def test_noise_model_validation(kwargs):
    with pytest.raises(ValueError):
        NoiseModel(**kwargs)


def test_analytic_decay_formula():
    assert analytic_noise_decay(0.3, 0.0) == 1.0
    assert analytic_noise_decay(1.0, 100.0) == pytest.approx(0.6)
    with pytest.raises(ValueError):
        analytic_noise_decay(-1.0, 1.0)


@pytest.mark.parametrize("family, j1, tau", [
    (GateFamily.CZ_RES_MINUS, 16.0, math.pi / 4),
    (GateFamily.ISWAP_PLUS, 20.0, math.pi / 10),
])
def test_analytic_resonant_matches_closed_form(family, j1, tau):
    p = RES.replace(J1=j1)
    for ratio in (0.0, 0.05, 0.2):
        sigma = ratio * p.J0
        got = noisy_fidelity(p, family, tau, NoiseModel(sigma), evolution="analytic")
        assert got == pytest.approx(analytic_noise_decay(tau, sigma), abs=1e-6)


def test_numeric_quadrature_matches_trapezoid_integral():
    sigma, tau = 2.0, math.pi / 20
    xs = np.linspace(-8 * sigma, 8 * sigma, 801)
    target = target_gate(GateFamily.CZ_CONST, tau, CONST)
    fs = [fidelity(target, propagate_rotating(CONST.with_exchange_offset(x), PropagatorConfig(tau))) for x in xs]
    pdf = np.exp(-0.5 * (xs / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
    oracle = trapezoid(pdf * np.array(fs), xs)
    got = noisy_fidelity(CONST, GateFamily.CZ_CONST, tau, NoiseModel(sigma, 41))
    assert got == pytest.approx(oracle, abs=1e-8)


def test_zero_noise_equals_noiseless_fidelity():
    tau = math.pi / 4
    got = noisy_fidelity(RES, GateFamily.CZ_RES_MINUS, tau, NoiseModel(0.0))
    from xgate.propagate import propagate
    expected = fidelity(target_gate(GateFamily.CZ_RES_MINUS, tau, RES), propagate(RES, PropagatorConfig(tau)))
    assert got == pytest.approx(expected, abs=1e-14)


def test_convergence_loop_and_failure(monkeypatch):
    tau = math.pi / 4
    sigma = 40 / tau
    v = noisy_fidelity(RES, GateFamily.CZ_RES_MINUS, tau, NoiseModel(sigma, 41), evolution="analytic",
                       check_convergence=True)
    assert v == pytest.approx(0.6, abs=1e-3)
    # sigma * tau = 100 needs a few thousand nodes; cap the order well below that.
    monkeypatch.setattr(noise, "MAX_QUAD_ORDER", 400)
    with pytest.raises(QuadratureError) as err:
        noisy_fidelity(RES, GateFamily.CZ_RES_MINUS, tau, NoiseModel(100 / tau, 41), evolution="analytic",
                       check_convergence=True)
    assert err.value.delta > 1e-6


def test_frame_and_family_checks():
    with pytest.raises(ValueError):
        noisy_fidelity(RES, GateFamily.CZ_RES_MINUS, 0.1, NoiseModel(1.0), frame="rotating")
    with pytest.raises(ValueError):
        noisy_fidelity(RES, GateFamily.CZ_CONST, 0.1, NoiseModel(1.0))
    with pytest.raises(ValueError):
        noisy_fidelity(RES, GateFamily.CZ_RES_MINUS, 0.1, NoiseModel(1.0), evolution="exact")


def test_sweep_is_deterministic_across_worker_counts():
    recipes = [Recipe("a", GateFamily.CZ_RES_MINUS, math.pi / 4, RES),
               Recipe("c", GateFamily.CZ_CONST, math.pi / 20, CONST)]
    one = noise_sweep(recipes, [0.0, 0.1], quad_order=5, workers=1)
    many = noise_sweep(recipes, [0.0, 0.1], quad_order=5, workers=4)
    np.testing.assert_array_equal(one.values, many.values)
    assert one.names == ("a", "c") and one.values.shape == (2, 2)
    np.testing.assert_array_equal(one.column("c"), one.values[:, 1])
    with pytest.raises(ValueError):
        noise_sweep(recipes, [-0.1])


def test_crossover_interpolation():
    r = [0.0, 0.1, 0.2]
    assert crossover(r, [1.0, 0.5, 0.0], [0.0, 0.5, 1.0]) == pytest.approx(0.1)
    assert crossover(r, [1.0, 0.9, 0.8], [0.0, 0.6, 1.0]) == pytest.approx(0.1 + 0.1 * 0.3 / 0.5)
    assert crossover(r, [1, 1, 1], [0, 0, 0]) is None
