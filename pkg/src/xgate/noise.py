"""Quasistatic Gaussian charge noise on the static exchange J0.

Each gate run sees a fixed offset ``J0 -> J0 + J`` with ``J ~ N(0, sigma^2)``;
``J1`` and ``omega`` are left untouched. The averaged fidelity is a Gauss-
Hermite quadrature over J.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy.special import roots_hermite

from .analytic import GateFamily, RwaWarning, target_gate, u_nonres, u_res
from .equiv import fidelity
from .propagate import ConvergenceError, PropagatorConfig, propagate, propagate_rotating

FRAMES = ("lab", "rotating")
EVOLUTIONS = ("numeric", "analytic")
MAX_QUAD_ORDER = 4096


class QuadratureError(ConvergenceError):
    pass


@dataclass(frozen=True)
class NoiseModel:
    sigma: float
    quad_order: int = 41

    def __post_init__(self):
        if not (self.sigma >= 0 and math.isfinite(self.sigma)):
            raise ValueError(f"sigma must be finite and >= 0, got {self.sigma}")
        if self.quad_order < 1 or self.quad_order % 2 == 0:
            raise ValueError(f"quad_order must be a positive odd integer, got {self.quad_order}")

    def nodes(self):
        """Exchange offsets and probability weights (weights sum to 1)."""
        x, w = roots_hermite(self.quad_order)
        return math.sqrt(2.0) * self.sigma * x, w / math.sqrt(math.pi)


def analytic_noise_decay(tau, sigma):
    """``(3 + 2 exp(-sigma^2 tau^2 / 8)) / 5``."""
    if tau < 0 or sigma < 0:
        raise ValueError("tau and sigma must be >= 0")
    return (3.0 + 2.0 * math.exp(-0.125 * (sigma * tau) ** 2)) / 5.0


def default_frame(family):
    return "lab" if GateFamily(family).resonant else "rotating"


def _evolution(params, family, tau, frame, evolution, steps, scheme):
    if evolution == "analytic":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RwaWarning)
            return u_res(params, tau) if family.resonant else u_nonres(params, tau)
    config = PropagatorConfig(tau, steps, scheme)
    if frame == "rotating":
        return propagate_rotating(params, config)
    return propagate(params, config)


def _quadrature(params, family, tau, target, order, sigma, frame, evolution, steps, scheme):
    offsets, weights = NoiseModel(sigma, order).nodes()
    total = 0.0
    for dj, w in zip(offsets, weights):
        u = _evolution(params.with_exchange_offset(dj), family, tau, frame, evolution, steps, scheme)
        total += w * fidelity(target, u)
    return float(total)


def noisy_fidelity(params, family, tau, noise, frame=None, evolution="numeric",
                   steps=None, scheme="cf4", check_convergence=False, tol=1e-6):
    """Fidelity at gate time `tau` averaged over Gaussian J0 noise.

    Parameters
    ----------
    params : PulseParams
        Nominal parameters; only ``J0`` is perturbed.
    family : GateFamily
        Target family, evaluated at `tau`.
    noise : NoiseModel
    frame : {"lab", "rotating"}, optional
        Must be "lab" for resonant families and "rotating" otherwise;
        defaults accordingly.
    evolution : {"numeric", "analytic"}
        Propagate the full Hamiltonian, or use the RWA closed forms.
    steps, scheme
        Passed to :class:`PropagatorConfig` for numeric evolution
        (``steps=None`` picks the default per noise node).
    check_convergence : bool
        Repeat with order ``2n + 1`` until two successive orders agree to
        `tol`; raise :class:`QuadratureError` past ``MAX_QUAD_ORDER``.
    """
    family = GateFamily(family)
    frame = frame or default_frame(family)
    if frame not in FRAMES:
        raise ValueError(f"frame must be one of {FRAMES}")
    if frame != default_frame(family):
        raise ValueError(f"{family.value} is defined in the {default_frame(family)} frame, not {frame}")
    if evolution not in EVOLUTIONS:
        raise ValueError(f"evolution must be one of {EVOLUTIONS}")
    if family is GateFamily.CZ_CONST and params.J1 != 0:
        raise ValueError("cz_const is the constant-exchange gate and needs J1 = 0")
    if tau < 0:
        raise ValueError("tau must be >= 0")
    target = target_gate(family, tau, params)
    args = (params, family, tau, target)
    rest = (noise.sigma, frame, evolution, steps, scheme)
    if noise.sigma == 0:
        return _quadrature(*args, 1, *rest)
    order = noise.quad_order
    value = _quadrature(*args, order, *rest)
    if not check_convergence:
        return value
    delta = math.inf
    while True:
        finer_order = 2 * order + 1
        if finer_order > MAX_QUAD_ORDER:
            raise QuadratureError(
                f"Gauss-Hermite quadrature not converged by order {order} "
                f"(sigma={noise.sigma}, tau={tau})", delta)
        finer = _quadrature(*args, finer_order, *rest)
        delta = abs(finer - value)
        if delta <= tol:
            return finer
        order, value = finer_order, finer


@dataclass(frozen=True)
class Recipe:
    """One curve of a noise sweep: a family at its gate time with its parameters."""

    name: str
    family: GateFamily
    tau: float
    params: object


@dataclass(frozen=True)
class SweepTable:
    ratios: tuple
    names: tuple
    # shape (len(ratios), len(names))
    values: np.ndarray

    def column(self, name):
        return self.values[:, self.names.index(name)]


def noise_sweep(recipes, ratios, quad_order=41, evolution="numeric", steps=None, scheme="cf4",
                check_convergence=False, workers=1):
    """Noisy fidelity of every recipe at ``sigma = ratio * J0`` for each ratio.

    Cells are independent and may run on `workers` threads; the table is
    assembled in the given recipe and ratio order.
    """
    ratios = tuple(float(r) for r in ratios)
    if any(r < 0 or not math.isfinite(r) for r in ratios):
        raise ValueError("sigma/J0 ratios must be finite and >= 0")
    recipes = list(recipes)
    cells = [(i, j) for i in range(len(ratios)) for j in range(len(recipes))]

    def run(cell):
        i, j = cell
        rec = recipes[j]
        noise = NoiseModel(ratios[i] * rec.params.J0, quad_order)
        return noisy_fidelity(rec.params, rec.family, rec.tau, noise, evolution=evolution,
                              steps=steps, scheme=scheme, check_convergence=check_convergence)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, cells))
    else:
        results = [run(c) for c in cells]
    values = np.array(results, dtype=float).reshape(len(ratios), len(recipes))
    return SweepTable(ratios=ratios, names=tuple(r.name for r in recipes), values=values)


def crossover(ratios, first, second):
    """Ratio where ``first - second`` changes sign, by linear interpolation.

    Returns None if the curves never cross on the grid.
    """
    diff = np.asarray(first, dtype=float) - np.asarray(second, dtype=float)
    for k in range(1, len(diff)):
        a, b = diff[k - 1], diff[k]
        if a == 0.0:
            return float(ratios[k - 1])
        if (a > 0) != (b > 0):
            return float(ratios[k - 1] + (ratios[k] - ratios[k - 1]) * a / (a - b))
    return None
