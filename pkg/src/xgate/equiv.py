"""Gate fidelity, Makhlin local invariants, and local-equivalence classes."""
from dataclasses import dataclass
import enum
import math

import numpy as np

from . import qmat

# Bell ("magic") basis, one basis vector per column.
MAGIC = np.array(
    [[1, 0, 0, 1j],
     [0, 1j, 1, 0],
     [0, 1j, -1, 0],
     [1, 0, 0, -1j]], dtype=complex) / math.sqrt(2.0)

IDENTITY = np.eye(4, dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
ISWAP = np.array(
    [[1, 0, 0, 0],
     [0, 0, 1j, 0],
     [0, 1j, 0, 0],
     [0, 0, 0, 1]], dtype=complex)

G2_IMAG_TOL = 1e-9


@dataclass(frozen=True)
class InvariantPair:
    g1: complex
    g2: float

    def as_tuple(self):
        return (self.g1, self.g2)

    def distance(self, other):
        return max(abs(self.g1 - other.g1), abs(self.g2 - other.g2))


class GateKind(enum.Enum):
    IDENTITY = "identity"
    CZ = "cz"
    ISWAP = "iswap"
    OTHER = "other"


#: Reference invariants, in tie-break order.
CLASS_INVARIANTS = {
    GateKind.IDENTITY: InvariantPair(1.0 + 0j, 3.0),
    GateKind.CZ: InvariantPair(0j, 1.0),
    GateKind.ISWAP: InvariantPair(0j, -1.0),
}


@dataclass(frozen=True)
class GateClass:
    kind: GateKind
    # to the nearest reference class, also reported for OTHER
    distance: float


def fidelity(ideal, actual):
    """Average gate fidelity ``(d + |Tr(U_ideal^dagger U_actual)|^2) / (d (d + 1))``.

    Works on stacks: leading axes of `ideal` and `actual` broadcast.
    """
    ideal = np.asarray(ideal)
    actual = np.asarray(actual)
    d = ideal.shape[-1]
    overlap = np.einsum("...ij,...ij->...", np.conj(ideal), actual)
    f = (d + np.abs(overlap) ** 2) / (d * (d + 1))
    return float(f) if np.ndim(f) == 0 else f


def makhlin_invariants(u):
    """Makhlin invariants ``(G1, G2)`` of a two-qubit unitary.

    ``m = (Q^dagger U Q)^T (Q^dagger U Q)`` in the magic basis, then
    ``G1 = tr(m)^2 / (16 det U)`` and ``G2 = (tr(m)^2 - tr(m^2)) / (4 det U)``.
    Dividing by ``det U`` makes the result independent of a global phase, so
    any U(4) element is accepted.

    Raises
    ------
    NotUnitaryError
        If `u` is not unitary within ``qmat.UNITARITY_TOL``.
    ValueError
        If G2 comes out with an imaginary part above ``G2_IMAG_TOL``.
    """
    u = qmat.as_unitary4(u)
    um = qmat.dagger(MAGIC) @ u @ MAGIC
    m = um.T @ um
    det = np.linalg.det(um)
    tr = np.trace(m)
    g1 = tr * tr / (16.0 * det)
    g2 = (tr * tr - np.trace(m @ m)) / (4.0 * det)
    if abs(g2.imag) > G2_IMAG_TOL:
        raise ValueError(f"G2 has imaginary part {g2.imag:.3e}; input is not a valid two-qubit gate")
    return InvariantPair(complex(g1) + 0.0, float(g2.real) + 0.0)


def classify_gate(u, tol=1e-6):
    """Nearest of identity / CZ / iSWAP classes, or OTHER if none is within `tol`."""
    inv = makhlin_invariants(u)
    best_kind, best_dist = None, math.inf
    for kind, ref in CLASS_INVARIANTS.items():
        dist = inv.distance(ref)
        if dist < best_dist:
            best_kind, best_dist = kind, dist
    if best_dist <= tol:
        return GateClass(best_kind, best_dist)
    return GateClass(GateKind.OTHER, best_dist)
