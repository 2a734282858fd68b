"""Trajectory kernel selection.

The compiled ``qpa._kernels`` extension is used when it was built; otherwise
the numpy implementation in ``qpa._kernels_py`` takes over.  Setting
``QPA_PURE_PYTHON=1`` forces the fallback.
"""
from __future__ import annotations

import os

import numpy as np

from . import _kernels_py
from .core import Circuit, single_qubit_matrix

_OPCODES = {"CNOT": _kernels_py.CNOT, "CPHASE": _kernels_py.CPHASE, "SWAP": _kernels_py.SWAP, "TOFFOLI": _kernels_py.TOFFOLI}

evolve_python = _kernels_py.evolve
evolve_compiled = None

if os.environ.get("QPA_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from ._kernels import evolve as evolve_compiled
    except ImportError:  # extension not built
        evolve_compiled = None

BACKEND = "cython" if evolve_compiled is not None else "python"
evolve = evolve_compiled if evolve_compiled is not None else evolve_python


class Program:
    """Flat arrays describing a circuit, as the kernels consume them."""

    def __init__(self, c: Circuit):
        g = len(c.gates)
        self.n = c.num_qubits
        self.kinds = np.zeros(g, dtype=np.int32)
        self.qubits = np.zeros((g, 3), dtype=np.int32)
        self.mats = np.zeros((g, 2, 2), dtype=np.complex128)
        self.phases = np.ones(g, dtype=np.complex128)
        for i, gate in enumerate(c.gates):
            self.qubits[i, : gate.arity] = gate.qubits
            if gate.arity == 1:
                self.kinds[i] = _kernels_py.ONE_QUBIT
                self.mats[i] = single_qubit_matrix(gate)
            else:
                self.kinds[i] = _OPCODES[gate.kind]
                if gate.kind == "CPHASE":
                    self.phases[i] = np.exp(1j * gate.param)

    def __len__(self) -> int:
        return len(self.kinds)


def run_trajectories(program: Program, fail: np.ndarray, pauli: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Final states, one row per shot, for the given failure and Pauli draws."""
    fn = {"python": evolve_python, "cython": evolve_compiled, None: evolve}[backend]
    if fn is None:
        raise RuntimeError("compiled kernel is not available")
    fail = np.ascontiguousarray(fail, dtype=np.bool_)
    pauli = np.ascontiguousarray(pauli, dtype=np.int64)
    return fn(program.n, program.kinds, program.qubits, program.mats, program.phases, fail, pauli)
