"""Dense complex matrix kernel for 2x2 and 4x4 operators.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Every function
also accepts stacks of shape ``(..., d, d)`` so that propagators can
exponentiate a whole time grid in one call.
"""
import numpy as np

#: Maximum allowed ``|U^dagger U - 1|_max`` for anything called a unitary.
UNITARITY_TOL = 1e-10
#: Relative tolerance on ``|H - H^dagger|_max`` accepted by :func:`hermitian_exp`.
HERMITIAN_TOL = 1e-12


class NotHermitianError(ValueError):
    def __init__(self, norm):
        super().__init__(f"generator is not Hermitian: |H - H^dagger|_max = {norm:.3e}")
        self.norm = norm


class NotUnitaryError(ValueError):
    def __init__(self, norm):
        super().__init__(f"matrix is not unitary: |U^dagger U - 1|_max = {norm:.3e}")
        self.norm = norm


def dagger(a):
    """Conjugate transpose over the last two axes."""
    return np.conj(np.swapaxes(a, -1, -2))


def _check_square(a):
    if a.ndim < 2 or a.shape[-1] != a.shape[-2] or a.shape[-1] not in (2, 4):
        raise ValueError(f"expected (..., 2, 2) or (..., 4, 4) matrices, got shape {a.shape}")


def hermiticity_error(h):
    h = np.asarray(h)
    return float(np.max(np.abs(h - dagger(h)), initial=0.0))


def unitarity_error(u):
    u = np.asarray(u)
    eye = np.eye(u.shape[-1])
    return float(np.max(np.abs(dagger(u) @ u - eye), initial=0.0))


def as_unitary(u, tol=UNITARITY_TOL):
    """Return ``u`` as a complex array after checking unitarity.

    Raises
    ------
    NotUnitaryError
        If ``|U^dagger U - 1|_max`` exceeds `tol`.
    """
    u = np.asarray(u, dtype=complex)
    _check_square(u)
    if not np.all(np.isfinite(u)):
        raise NotUnitaryError(float("inf"))
    err = unitarity_error(u)
    if err > tol:
        raise NotUnitaryError(err)
    return u


def as_unitary4(u, tol=UNITARITY_TOL):
    u = as_unitary(u, tol)
    if u.shape[-2:] != (4, 4):
        raise ValueError(f"expected a 4x4 unitary, got shape {u.shape}")
    return u


def _exp_su2(h, dt):
    # h = a*1 + bx*X + by*Y + bz*Z, closed form of the spectral decomposition.
    a = 0.5 * (h[..., 0, 0] + h[..., 1, 1]).real
    bz = 0.5 * (h[..., 0, 0] - h[..., 1, 1]).real
    bx = h[..., 0, 1].real
    by = -h[..., 0, 1].imag
    r = np.sqrt(bx * bx + by * by + bz * bz)
    theta = r * dt
    c = np.cos(theta)
    # sin(r dt) / r, finite at r = 0
    s = dt * np.sinc(theta / np.pi)
    phase = np.exp(-1j * a * dt)
    out = np.empty(np.shape(h), dtype=complex)
    out[..., 0, 0] = phase * (c - 1j * s * bz)
    out[..., 1, 1] = phase * (c + 1j * s * bz)
    out[..., 0, 1] = phase * (-1j * s * (bx - 1j * by))
    out[..., 1, 0] = phase * (-1j * s * (bx + 1j * by))
    return out


def hermitian_exp(h, dt):
    """Unitary exponential ``exp(-i H dt)`` of a Hermitian generator.

    Parameters
    ----------
    h : array_like, shape (..., d, d) with d in {2, 4}
        Hermitian generator(s) in rad/us.
    dt : float or array_like
        Time step in us. Broadcast against the leading axes of `h`.

    Returns
    -------
    ndarray
        ``exp(-i H dt)``, computed from the spectral decomposition of `h`
        (closed form for 2x2, ``numpy.linalg.eigh`` for 4x4).

    Raises
    ------
    NotHermitianError
        If `h` deviates from Hermitian by more than ``HERMITIAN_TOL``
        relative to its largest entry.
    """
    h = np.asarray(h, dtype=complex)
    _check_square(h)
    dt = np.asarray(dt, dtype=float)
    if not np.all(np.isfinite(dt)):
        raise ValueError("time step must be finite")
    err = hermiticity_error(h)
    scale = max(1.0, float(np.max(np.abs(h), initial=0.0)))
    if err > HERMITIAN_TOL * scale:
        raise NotHermitianError(err)
    if h.shape[-1] == 2:
        return _exp_su2(h, dt)
    evals, evecs = np.linalg.eigh(h)
    phases = np.exp(-1j * evals * dt[..., None])
    return (evecs * phases[..., None, :]) @ dagger(evecs)


def det4(u):
    """Determinant of a 4x4 unitary (modulus one up to roundoff)."""
    u = as_unitary4(u)
    return complex(np.linalg.det(u))


def ordered_product(factors):
    """Time-ordered product ``F[N-1] @ ... @ F[1] @ F[0]`` of a stack of matrices.

    Uses pairwise reduction, which keeps the operand order and vectorizes
    over the stack.
    """
    p = np.asarray(factors, dtype=complex)
    d = p.shape[-1]
    if p.shape[0] == 0:
        return np.eye(d, dtype=complex)
    while p.shape[0] > 1:
        if p.shape[0] % 2:
            p = np.concatenate([p, np.eye(d, dtype=complex)[None]], axis=0)
        p = p[1::2] @ p[0::2]
    return p[0]


def max_norm(a):
    return float(np.max(np.abs(np.asarray(a)), initial=0.0))
