"""Two-qubit gates driven by an oscillating exchange interaction.

Units: angular frequencies in rad/us (= rad*MHz), times in us, hbar = 1.
Basis order: |uu>, |ud>, |du>, |dd>.
"""
from .model import BASIS, PulseParams, RwaValidity, hamiltonian_at, rotating_frame, rwa_validity
from .propagate import ConvergenceError, EvolutionTrace, PropagatorConfig, propagate, propagate_trace
from .analytic import GateFamily, RwaWarning, target_gate, u_nonres, u_res
from .equiv import GateClass, GateKind, InvariantPair, classify_gate, fidelity, makhlin_invariants
from .gatesolve import enumerate_resonant, solve_nonresonant, solve_resonant
from .noise import NoiseModel, QuadratureError, noise_sweep, noisy_fidelity

__version__ = "0.1.0"
