"""Closed-form RWA evolutions and the target gate families.

Resonant formulas use ``params.signed_omega`` (omega carrying the sign of dB,
i.e. ``2*dB`` on resonance) wherever omega sets a rotating-frame phase. The
exchange drive itself is even in omega, so terms such as
``(J1/omega) sin(omega t)`` are unaffected.
"""
import enum
import math
import warnings

import numpy as np

from .equiv import InvariantPair
from .model import rwa_validity


class RwaWarning(UserWarning):
    pass


class GateFamily(enum.Enum):
    CZ_RES_PLUS = "cz_res_plus"
    CZ_RES_MINUS = "cz_res_minus"
    ISWAP_PLUS = "iswap_plus"
    ISWAP_MINUS = "iswap_minus"
    CZ_NRES_PLUS = "cz_nres_plus"
    CZ_NRES_MINUS = "cz_nres_minus"
    CZ_CONST = "cz_const"

    @property
    def resonant(self):
        """Resonant families are defined in the lab frame, the rest in the rotating frame."""
        return self in _RESONANT

    @property
    def is_cz(self):
        return self not in (GateFamily.ISWAP_PLUS, GateFamily.ISWAP_MINUS)

    @property
    def sign(self):
        return -1 if self.value.endswith("minus") else 1

    @classmethod
    def parse(cls, text):
        key = text.strip().lower().replace("-", "_")
        for fam in cls:
            if fam.value == key or fam.name.lower() == key:
                return fam
        raise ValueError(f"unknown gate family {text!r}; choose from {[f.value for f in cls]}")


_RESONANT = frozenset({GateFamily.CZ_RES_PLUS, GateFamily.CZ_RES_MINUS,
                       GateFamily.ISWAP_PLUS, GateFamily.ISWAP_MINUS})

RESONANCE_RTOL = 1e-6


def exchange_phase(params, t):
    """``A(t) = J0 t + (J1/omega) sin(omega t)``, the integrated exchange."""
    t = np.asarray(t, dtype=float)
    return params.J0 * t + params.J1 / params.omega * np.sin(params.omega * t)


def phase_a(params, t, sign):
    """``a_+/-(t) = ((J0 +/- omega) t + (J1/omega) sin(omega t)) / 2`` with signed omega."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    t = np.asarray(t, dtype=float)
    return 0.5 * (exchange_phase(params, t) + sign * params.signed_omega * t)


def _warn_if_off_resonance(params):
    if not math.isclose(params.omega, 2.0 * abs(params.dB), rel_tol=RESONANCE_RTOL):
        warnings.warn(
            f"u_res assumes omega = 2|dB| (omega={params.omega}, dB={params.dB})",
            RwaWarning, stacklevel=3)


def u_res(params, t):
    """Resonant RWA evolution in the lab frame, ``(4, 4)`` or stacked over `t`."""
    _warn_if_off_resonance(params)
    t = np.asarray(t, dtype=float)
    ep = np.exp(1j * phase_a(params, t, 1))
    em = np.exp(1j * phase_a(params, t, -1))
    c = np.cos(0.25 * params.J1 * t)
    s = np.sin(0.25 * params.J1 * t)
    u = np.zeros(t.shape + (4, 4), dtype=complex)
    u[..., 0, 0] = np.exp(-1j * params.B * t)
    u[..., 1, 1] = ep * c
    u[..., 1, 2] = -1j * ep * s
    u[..., 2, 1] = -1j * em * s
    u[..., 2, 2] = em * c
    u[..., 3, 3] = np.exp(1j * params.B * t)
    return u


def u_nonres(params, t):
    """Far-detuned RWA evolution in the rotating frame: ``diag(1, e^{iA/2}, e^{iA/2}, 1)``."""
    validity = rwa_validity(params)
    if not validity.is_valid():
        warnings.warn(f"far-detuned RWA ratios not small: {validity.ratios}", RwaWarning, stacklevel=2)
    half = np.exp(0.5j * exchange_phase(params, t))
    return _diag_phase(half, half)


def _diag_phase(p1, p2):
    p1 = np.asarray(p1)
    u = np.zeros(p1.shape + (4, 4), dtype=complex)
    u[..., 0, 0] = 1.0
    u[..., 1, 1] = p1
    u[..., 2, 2] = p2
    u[..., 3, 3] = 1.0
    return u


def target_gate(family, t, params):
    """Target matrix of `family` at gate time ``tau = t``.

    CZ_res: ``diag(e^{-iBt}, +/-i e^{iwt/2}, +/-i e^{-iwt/2}, e^{iBt})``;
    iSWAP: the same phases on the anti-diagonal of the central block;
    CZ_nres: ``diag(1, +/-i, +/-i, 1)``; CZ_const: ``diag(1, i, i, 1)``.
    """
    family = GateFamily(family)
    t = np.asarray(t, dtype=float)
    if not family.resonant:
        p = 1j * family.sign
        return _diag_phase(np.full(t.shape, p), np.full(t.shape, p))
    w = params.signed_omega
    up = family.sign * 1j * np.exp(0.5j * w * t)
    dn = family.sign * 1j * np.exp(-0.5j * w * t)
    u = np.zeros(t.shape + (4, 4), dtype=complex)
    u[..., 0, 0] = np.exp(-1j * params.B * t)
    u[..., 3, 3] = np.exp(1j * params.B * t)
    if family.is_cz:
        u[..., 1, 1] = up
        u[..., 2, 2] = dn
    else:
        u[..., 1, 2] = up
        u[..., 2, 1] = dn
    return u


def res_invariants(params, t):
    """Closed-form Makhlin invariants of :func:`u_res`.

    With ``alpha = exp(-i A(t))`` and ``beta = cos(J1 t / 2)``:
    ``G1 = alpha (1 + beta/alpha)^2 / 4`` and ``G2 = (alpha + 1/alpha)/2 + 2 beta``.
    """
    alpha = np.exp(-1j * exchange_phase(params, t))
    beta = np.cos(0.5 * params.J1 * np.asarray(t, dtype=float))
    g1 = 0.25 * alpha * (1.0 + beta / alpha) ** 2
    g2 = (0.5 / alpha + 0.5 * alpha + 2.0 * beta).real
    return InvariantPair(complex(g1), float(g2))


def nonres_invariants(params, t):
    """``G1 = cos(A/2)^2`` and ``G2 = 2 + cos(A)`` for :func:`u_nonres`."""
    a = float(exchange_phase(params, t))
    return InvariantPair(complex(math.cos(0.5 * a) ** 2), 2.0 + math.cos(a))
