"""Simulation, transpilation and noisy-experiment toolkit for the quantum permutation algorithm."""

__version__ = "0.1.0"

from .builders import QpaScheme, build_pipeline, permutation_circuit, qft_circuit
from .core import Circuit, Gate, PermutationSpec, QubitLabeling
from .kernels import BACKEND
from .noise import CalibrationConfig, NoisySimConfig, average_success, load_calibration, noisy_run
from .reference import classical_parity, reference_qpa
from .simulator import run_circuit, sample, unitary_of
from .transpiler import CouplingMap, coupling_map, transpile

__all__ = [
    "BACKEND",
    "CalibrationConfig",
    "Circuit",
    "CouplingMap",
    "Gate",
    "NoisySimConfig",
    "PermutationSpec",
    "QpaScheme",
    "QubitLabeling",
    "average_success",
    "build_pipeline",
    "classical_parity",
    "coupling_map",
    "load_calibration",
    "noisy_run",
    "permutation_circuit",
    "qft_circuit",
    "reference_qpa",
    "run_circuit",
    "sample",
    "transpile",
    "unitary_of",
]
