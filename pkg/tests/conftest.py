import numpy as np
import pytest

from xgate.model import PulseParams

# Reference parameter set (rad/us): B = 1 GHz, dB = -100 MHz, J0 = 20 MHz, omega = 200 MHz.
B, DB, J0, OMEGA = 1000.0, -100.0, 20.0, 200.0


@pytest.fixture
def fig2_params():
    """The four resonant recipes as (family, n, m, tau, PulseParams)."""
    return {
        "cz_res_plus": (7, 2, 7 * np.pi / 20, PulseParams(B, DB, J0, 80 / 7, OMEGA)),
        "cz_res_minus": (5, 2, np.pi / 4, PulseParams(B, DB, J0, 16.0, OMEGA)),
        "iswap_plus": (2, 1, np.pi / 10, PulseParams(B, DB, J0, 20.0, OMEGA)),
        "iswap_minus": (4, 1, np.pi / 5, PulseParams(B, DB, J0, 10.0, OMEGA)),
    }


@pytest.fixture
def rng():
    return np.random.default_rng(20240519)


def random_unitary(rng, d):
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng, d, scale=1.0):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * 0.5 * (a + a.conj().T)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
