"""Cross-cutting invariants, mostly property-based."""
import math
import warnings

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from conftest import random_hermitian, random_unitary
from xgate import qmat
from xgate.analytic import GateFamily, RwaWarning, nonres_invariants, target_gate, u_nonres, u_res
from xgate.equiv import CLASS_INVARIANTS, GateKind, fidelity, makhlin_invariants
from xgate.gatesolve import enumerate_resonant, resonant_condition, solve_nonresonant
from xgate.model import PulseParams, hamiltonian_at
from xgate.noise import NoiseModel, analytic_noise_decay, noisy_fidelity
from xgate.propagate import PropagatorConfig, propagate_trace

seeds = st.integers(0, 2**32 - 1)
params = st.builds(
    lambda b, db, j0, frac, w: PulseParams(b, db, j0, frac * j0, w),
    st.floats(100, 2000), st.floats(-300, 300), st.floats(0, 60), st.floats(-1, 1), st.floats(1, 1000))


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([2, 4]), st.floats(-3, 3), st.floats(-3, 3))
def test_exponential_group_law_and_inverse(seed, d, a, b):
    h = random_hermitian(np.random.default_rng(seed), d, scale=5.0)
    np.testing.assert_allclose(qmat.hermitian_exp(h, a + b), qmat.hermitian_exp(h, a) @ qmat.hermitian_exp(h, b),
                               atol=1e-10)
    np.testing.assert_allclose(qmat.dagger(qmat.hermitian_exp(h, a)), qmat.hermitian_exp(h, -a), atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_det_similarity_invariance(seed):
    rng = np.random.default_rng(seed)
    u, v = random_unitary(rng, 4), random_unitary(rng, 4)
    assert abs(qmat.det4(v @ u @ v.conj().T) - qmat.det4(u)) < 1e-9


@settings(max_examples=60, deadline=None)
@given(params, st.floats(0, 10))
def test_hamiltonian_structure(p, t):
    h = hamiltonian_at(p, t)
    assert np.array_equal(h, h.conj().T)
    for k in (0, 3):
        off = np.delete(h[k], k)
        assert np.all(off == 0) and np.all(np.delete(h[:, k], k) == 0)
    # Periodic in the drive period; equal up to the rounding of omega * (t + 2 pi / omega).
    np.testing.assert_allclose(hamiltonian_at(p, t + 2 * math.pi / p.omega), h, atol=1e-9 * max(1.0, p.J1))


def test_trace_is_unitary_at_every_recorded_point():
    p = PulseParams(1000.0, -100.0, 20.0, 16.0, 200.0)
    trace = propagate_trace(p, PropagatorConfig(1.0, steps=50_000), record_every=50)
    assert qmat.unitarity_error(trace.unitaries) < 1e-10


@settings(max_examples=60, deadline=None)
@given(params, st.floats(0, 5))
def test_closed_forms_are_unitary_and_nonres_invariants_bounded(p, t):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RwaWarning)
        assert qmat.unitarity_error(u_res(p, t)) < 1e-14
        assert qmat.unitarity_error(u_nonres(p, t)) < 1e-14
    inv = nonres_invariants(p, t)
    assert 0 <= inv.g1.real <= 1 and inv.g1.imag == 0
    assert 1 <= inv.g2 <= 3


@pytest.mark.parametrize("j0, omega", [(20.0, 200.0), (10.0, 300.0), (35.0, 500.0)])
def test_every_resonant_solution_lands_in_its_class(j0, omega):
    dB = -omega / 2
    sols = enumerate_resonant(j0, omega, max_n=14, max_m=5)
    assert sols
    for sol in sols:
        p = PulseParams(1000.0, dB, j0, sol.j1, omega)
        u = u_res(p, sol.tau)
        kind = GateKind.CZ if sol.family.is_cz else GateKind.ISWAP
        assert makhlin_invariants(u).distance(CLASS_INVARIANTS[kind]) < 1e-8
        assert abs(resonant_condition(j0, omega, sol.n, sol.m, sol.tau)) < 1e-10 * sol.n * math.pi
        if sol.family.is_cz:
            np.testing.assert_allclose(u, target_gate(sol.family, sol.tau, p), atol=1e-9)
        else:
            assert fidelity(target_gate(sol.family, sol.tau, p), u) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(1, 60), st.floats(-1, 1), st.floats(5, 1000))
def test_nonresonant_times_increase_with_n(j0, frac, omega):
    taus = [solve_nonresonant(j0, frac * j0, omega, n).tau for n in range(6)]
    assert all(b > a for a, b in zip(taus, taus[1:]))


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_fidelity_symmetry_and_lower_bound(seed):
    rng = np.random.default_rng(seed)
    u, v = random_unitary(rng, 4), random_unitary(rng, 4)
    assert fidelity(u, v) == fidelity(v, u)
    # Tr(Z x Z) = 0 gives the minimum 1/5.
    zz = np.kron(np.diag([1, -1]), np.diag([1, -1]))
    assert fidelity(np.eye(4), zz) == pytest.approx(0.2, abs=1e-15)


@pytest.mark.parametrize("family, j1, tau", [
    (GateFamily.CZ_RES_PLUS, 80 / 7, 7 * math.pi / 20),
    (GateFamily.CZ_RES_MINUS, 16.0, math.pi / 4),
    (GateFamily.ISWAP_PLUS, 20.0, math.pi / 10),
    (GateFamily.ISWAP_MINUS, 10.0, math.pi / 5),
])
def test_noisy_fidelity_non_increasing_in_sigma(family, j1, tau):
    p = PulseParams(1000.0, -100.0, 20.0, j1, 200.0)
    values = [noisy_fidelity(p, family, tau, NoiseModel(r * 20.0), evolution="analytic")
              for r in np.linspace(0, 0.2, 11)]
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


def test_shorter_gates_are_more_noise_robust():
    sigma = 2.0
    taus = [math.pi / 20, math.pi / 10, math.pi / 5, math.pi / 4, 7 * math.pi / 20]
    values = [analytic_noise_decay(t, sigma) for t in taus]
    assert values == sorted(values, reverse=True)


@pytest.mark.parametrize("family, j1, omega, tau, ratio", [
    (GateFamily.CZ_RES_MINUS, 16.0, 200.0, math.pi / 4, 0.1),
    (GateFamily.ISWAP_PLUS, 20.0, 200.0, math.pi / 10, 0.2),
    (GateFamily.CZ_NRES_PLUS, 20.0, 270.0, 0.15981698502462843, 0.1),
    (GateFamily.CZ_CONST, 0.0, 200.0, math.pi / 20, 0.2),
])
def test_quadrature_against_trapezoid_oracle(family, j1, omega, tau, ratio):
    from scipy.integrate import trapezoid
    from xgate.noise import _evolution, default_frame

    p = PulseParams(1000.0, -100.0, 20.0, j1, omega)
    sigma = ratio * p.J0
    xs = np.linspace(-6 * sigma, 6 * sigma, 481)
    target = target_gate(family, tau, p)
    fs = [fidelity(target, _evolution(p.with_exchange_offset(x), family, tau, default_frame(family),
                                      "numeric", None, "cf4")) for x in xs]
    pdf = np.exp(-0.5 * (xs / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
    oracle = trapezoid(pdf * np.array(fs), xs)
    assert noisy_fidelity(p, family, tau, NoiseModel(sigma, 41)) == pytest.approx(oracle, abs=1e-7)
