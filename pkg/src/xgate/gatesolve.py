"""Gate-time conditions for resonant (CZ/iSWAP) and far-detuned (CZ) gates.

Resonant recipes solve, for integers n, m >= 1,

    J0 tau + (2 m pi / (omega tau)) sin(omega tau) = n pi,    J1 = 2 m pi / tau

with the extra requirement ``J1 <= J0``. The parity of (n, m) fixes the
class: n odd, m even gives CZ; n even, m odd gives iSWAP. Far-detuned
recipes solve ``J0 tau + (J1/omega) sin(omega tau) = (2n + 1) pi``.
"""
from dataclasses import dataclass
import math

from .analytic import GateFamily

DEFAULT_MAX_N = 20
DEFAULT_MAX_M = 8
_MAX_BISECTIONS = 200


@dataclass(frozen=True)
class GateSolutionRes:
    n: int
    m: int
    tau: float
    j1: float
    family: GateFamily
    residual: float


@dataclass(frozen=True)
class GateSolutionNres:
    n: int
    tau: float
    family: GateFamily
    residual: float


def resonant_family(n, m):
    """Gate family selected by the parity of ``(n, m)``, or None.

    CZ needs ``n = 1 + 2 n1``, ``m = 2 m1`` and is CZ+ when ``n1 + m1`` is
    even. iSWAP needs ``n = 2 n2``, ``m = 1 + 2 m2`` and is iSWAP+ when
    ``n2 + m2`` is odd.
    """
    if n % 2 == 1 and m % 2 == 0:
        n1, m1 = (n - 1) // 2, m // 2
        return GateFamily.CZ_RES_PLUS if (n1 + m1) % 2 == 0 else GateFamily.CZ_RES_MINUS
    if n % 2 == 0 and m % 2 == 1:
        n2, m2 = n // 2, (m - 1) // 2
        return GateFamily.ISWAP_PLUS if (n2 + m2) % 2 == 1 else GateFamily.ISWAP_MINUS
    return None


def resonant_condition(J0, omega, n, m, tau):
    """Left minus right side of the resonant gate-time condition."""
    return J0 * tau + 2.0 * m * math.pi / (omega * tau) * math.sin(omega * tau) - n * math.pi


def nonresonant_condition(J0, J1, omega, n, tau):
    return J0 * tau + J1 / omega * math.sin(omega * tau) - (2 * n + 1) * math.pi


def _bisect(f, a, b, fa, fb, xtol):
    """Root of `f` in ``[a, b]`` given a sign change; bisection then one secant step."""
    for _ in range(_MAX_BISECTIONS):
        if b - a <= xtol * max(1.0, abs(b)):
            break
        mid = 0.5 * (a + b)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (fa < 0.0):
            a, fa = mid, fm
        else:
            b, fb = mid, fm
    if fb != fa:
        s = b - fb * (b - a) / (fb - fa)
        if a <= s <= b and abs(f(s)) <= min(abs(fa), abs(fb)):
            return s
    return a if abs(fa) < abs(fb) else b


def solve_resonant(J0, omega, n, m, tol=1e-12):
    """Shortest resonant recipe for the given ``(n, m)``.

    Scans for sign changes of the gate-time condition on a grid of spacing
    ``pi / (4 omega)`` starting at ``tau_min = 2 m pi / J0`` (where
    ``J1 = J0``) and refines the first bracket by bisection.

    Returns
    -------
    GateSolutionRes or None
        None when no root with ``J1 <= J0`` exists.

    Raises
    ------
    ValueError
        For non-positive inputs or an ``(n, m)`` parity that selects neither
        CZ nor iSWAP.
    """
    if not (J0 > 0 and omega > 0):
        raise ValueError("J0 and omega must be positive")
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    family = resonant_family(n, m)
    if family is None:
        raise ValueError(f"(n, m) = ({n}, {m}) selects neither CZ (n odd, m even) nor iSWAP (n even, m odd)")

    def f(tau):
        return resonant_condition(J0, omega, n, m, tau)

    tau_min = 2.0 * m * math.pi / J0
    # For tau >= tau_min the sine term is bounded by J0/omega, so f > 0 past tau_max.
    tau_max = (n * math.pi + J0 / omega) / J0
    if tau_max < tau_min:
        return None
    scale = n * math.pi
    root = None
    a, fa = tau_min, f(tau_min)
    if abs(fa) <= tol * scale:
        root = tau_min
    else:
        step = math.pi / (4.0 * omega)
        while a < tau_max:
            b = min(a + step, tau_max + step)
            fb = f(b)
            if fb == 0.0 or (fb < 0.0) != (fa < 0.0):
                root = b if fb == 0.0 else _bisect(f, a, b, fa, fb, tol)
                break
            a, fa = b, fb
    if root is None:
        return None
    return GateSolutionRes(n=n, m=m, tau=root, j1=2.0 * m * math.pi / root,
                           family=family, residual=abs(f(root)))


def _family_matches(family, family_filter):
    if family_filter is None:
        return True
    if isinstance(family_filter, GateFamily):
        return family is family_filter
    key = str(family_filter).lower()
    if key == "cz":
        return family.is_cz
    if key == "iswap":
        return not family.is_cz
    raise ValueError(f"unknown family filter {family_filter!r}; use 'cz', 'iswap', a GateFamily, or None")


def enumerate_resonant(J0, omega, family_filter=None, max_n=DEFAULT_MAX_N, max_m=DEFAULT_MAX_M, tol=1e-12):
    """All valid resonant recipes with ``n <= max_n`` and ``m <= max_m``, shortest first.

    `family_filter` is None (both classes), ``"cz"``, ``"iswap"``, or a
    single :class:`GateFamily`. Ties in tau are broken by ``(n, m)``.
    """
    if max_n < 1 or max_m < 1:
        raise ValueError("max_n and max_m must be >= 1")
    found = []
    for n in range(1, max_n + 1):
        for m in range(1, max_m + 1):
            family = resonant_family(n, m)
            if family is None or not _family_matches(family, family_filter):
                continue
            sol = solve_resonant(J0, omega, n, m, tol)
            if sol is not None:
                found.append(sol)
    found.sort(key=lambda s: (s.tau, s.n, s.m))
    return found


def solve_nonresonant(J0, J1, omega, n, tol=1e-12):
    """Far-detuned CZ gate time ``tau_n`` for ``n >= 0``.

    The condition is non-decreasing in tau when ``|J1| <= J0``, so the root
    is bracketed by ``((2n+1) pi -/+ |J1|/omega) / J0``; bisection keeps the
    left end below zero and returns the smallest root.
    """
    if not (J0 > 0 and omega > 0):
        raise ValueError("J0 and omega must be positive")
    if abs(J1) > J0:
        raise ValueError(f"|J1| must not exceed J0 (J0={J0}, J1={J1})")
    if n < 0:
        raise ValueError("n must be >= 0")
    family = GateFamily.CZ_NRES_PLUS if n % 2 == 0 else GateFamily.CZ_NRES_MINUS
    target = (2 * n + 1) * math.pi
    if J1 == 0:
        tau = target / J0
        return GateSolutionNres(n=n, tau=tau, family=family, residual=abs(J0 * tau - target))

    def g(tau):
        return nonresonant_condition(J0, J1, omega, n, tau)

    lo = max(0.0, (target - abs(J1) / omega) / J0)
    hi = (target + abs(J1) / omega) / J0
    glo, ghi = g(lo), g(hi)
    if glo >= 0.0:
        tau = lo
    else:
        for _ in range(_MAX_BISECTIONS):
            if hi - lo <= tol * max(1.0, hi):
                break
            mid = 0.5 * (lo + hi)
            gm = g(mid)
            if gm < 0.0:
                lo, glo = mid, gm
            else:
                hi, ghi = mid, gm
        tau = hi if abs(ghi) <= abs(glo) else lo
    return GateSolutionNres(n=n, tau=tau, family=family, residual=abs(g(tau)))
