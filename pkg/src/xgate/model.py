"""Two-spin Hamiltonian with an oscillating exchange interaction.

Units: every frequency is an angular frequency in rad/us (numerically equal
to rad*MHz) and times are in us, with hbar = 1 and spin operators S = sigma/2.
Basis ordering is fixed to |uu>, |ud>, |du>, |dd> (u = spin up, d = spin down;
first letter is spin 1).
"""
from dataclasses import dataclass, field, replace
import math

import numpy as np

BASIS = ("uu", "ud", "du", "dd")


@dataclass(frozen=True)
class PulseParams:
    """Device and drive parameters.

    Attributes
    ----------
    B : float
        Homogeneous Zeeman term.
    dB : float
        Zeeman gradient; spin 1 sees ``B - dB`` and spin 2 sees ``B + dB``.
    J0 : float
        Static part of the exchange.
    J1 : float
        Drive amplitude of the exchange, ``|J1| <= J0``.
    omega : float
        Drive angular frequency, > 0.
    strict : bool
        Validate the physical restrictions above. Noise realizations that
        push ``J0`` below ``|J1|`` are built with ``strict=False``.
    """

    B: float
    dB: float
    J0: float
    J1: float = 0.0
    omega: float = 1.0
    strict: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        for name in ("B", "dB", "J0", "J1", "omega"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.omega <= 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if self.strict:
            if self.J0 < 0:
                raise ValueError(f"J0 must be >= 0, got {self.J0}")
            if abs(self.J1) > self.J0 * (1 + 1e-12):
                raise ValueError(f"|J1| must not exceed J0 (J0={self.J0}, J1={self.J1})")

    def replace(self, **changes):
        return replace(self, **changes)

    def with_exchange_offset(self, dj):
        """Copy with ``J0 -> J0 + dj`` and validation switched off."""
        return replace(self, J0=self.J0 + dj, strict=False)

    @property
    def signed_omega(self):
        """Drive frequency carrying the sign of ``dB``.

        The exchange drive is even in omega, but the resonant rotating frame
        has to turn with the |ud>, |du> splitting, whose sign is set by
        ``dB``. At resonance this equals ``2*dB``.
        """
        return math.copysign(self.omega, self.dB) if self.dB != 0 else self.omega


def exchange_at(params, t):
    """``J(t) = J0 + J1 cos(omega t)``; vectorized over `t`."""
    return params.J0 + params.J1 * np.cos(params.omega * np.asarray(t, dtype=float))


def hamiltonian_at(params, t):
    """Hamiltonian at time(s) `t`, shape ``(4, 4)`` or ``(len(t), 4, 4)``."""
    t = np.asarray(t, dtype=float)
    J = exchange_at(params, t)
    h = np.zeros(t.shape + (4, 4), dtype=complex)
    h[..., 0, 0] = params.B
    h[..., 1, 1] = -params.dB - 0.5 * J
    h[..., 2, 2] = params.dB - 0.5 * J
    h[..., 3, 3] = -params.B
    h[..., 1, 2] = 0.5 * J
    h[..., 2, 1] = 0.5 * J
    return h


def central_block_at(params, t):
    """The |ud>, |du> block of :func:`hamiltonian_at`; the corners decouple."""
    t = np.asarray(t, dtype=float)
    J = exchange_at(params, t)
    h = np.empty(t.shape + (2, 2), dtype=complex)
    h[..., 0, 0] = -params.dB - 0.5 * J
    h[..., 1, 1] = params.dB - 0.5 * J
    h[..., 0, 1] = 0.5 * J
    h[..., 1, 0] = 0.5 * J
    return h


def rotating_frame_generator(params):
    """Diagonal ``K`` such that ``R(t) = exp(i K t)`` removes all Zeeman phases.

    Spin 1 rotates at its local frequency ``B - dB`` and spin 2 at ``B + dB``,
    which gives ``K = diag(B, -dB, dB, -B)``.
    """
    return np.diag(np.array([params.B, -params.dB, params.dB, -params.B], dtype=complex))


def rotating_frame(params, t):
    """``R(t) = exp(i K t)``; returns ``(4, 4)`` or ``(len(t), 4, 4)``."""
    t = np.asarray(t, dtype=float)
    k = np.diag(rotating_frame_generator(params)).real
    phases = np.exp(1j * k * t[..., None])
    out = np.zeros(t.shape + (4, 4), dtype=complex)
    idx = np.arange(4)
    out[..., idx, idx] = phases
    return out


def max_generator_norm(params):
    """Bound ``B + |dB| + 2 J0`` on ``|H(t)|`` used for default step sizes."""
    return abs(params.B) + abs(params.dB) + 2.0 * abs(params.J0)


@dataclass(frozen=True)
class RwaValidity:
    """Ratios that must be small for the far-detuned approximation.

    A ratio is ``None`` when its denominator vanishes; for the two drive
    ratios that is the resonant case ``omega = 2|dB|``.
    """

    static: float | None
    plus: float | None
    minus: float | None

    @property
    def ratios(self):
        return (self.static, self.plus, self.minus)

    @property
    def resonant(self):
        return self.plus is None or self.minus is None

    def is_valid(self, threshold=0.1):
        return all(r is not None and r < threshold for r in self.ratios)


def rwa_validity(params):
    """``(|J0/(4 dB)|, |J1/(8 dB + 4 omega)|, |J1/(8 dB - 4 omega)|)``."""

    def ratio(num, den):
        return None if den == 0 else abs(num / den)

    return RwaValidity(
        static=ratio(params.J0, 4.0 * params.dB),
        plus=ratio(params.J1, 8.0 * params.dB + 4.0 * params.omega),
        minus=ratio(params.J1, 8.0 * params.dB - 4.0 * params.omega),
    )
