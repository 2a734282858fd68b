"""Dense qudit reference model of the permutation problem.

Works for any dimension d >= 2 (not only powers of two) and serves as the
ground truth that every qubit circuit is checked against.
"""
from __future__ import annotations

import cmath
import math
from typing import Callable

import numpy as np

from .core import PermutationSpec

MODULUS_ATOL = 1e-9


class InternalInconsistency(RuntimeError):
    """The decoded state is not a single basis state (a convention bug)."""


def permutation_matrix(spec: PermutationSpec) -> np.ndarray:
    """0/1 matrix sending ``|k>`` to ``|(m + parity*k) mod d>``."""
    d = spec.d
    k = np.arange(d)
    rows = (spec.m + spec.parity * k) % d
    out = np.zeros((d, d), dtype=complex)
    out[rows, k] = 1
    return out


def permute_index(spec: PermutationSpec, k: int) -> int:
    return (spec.m + spec.parity * k) % spec.d


def dft_matrix(d: int) -> np.ndarray:
    """Unitary DFT with positive exponent, ``F[j, k] = exp(2*pi*i*j*k/d) / sqrt(d)``."""
    if d < 2:
        raise ValueError("d must be >= 2")
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / math.sqrt(d)


def principal_phase(z: complex) -> float:
    """Argument in (-pi, pi]."""
    phi = cmath.phase(z)
    return math.pi if phi <= -math.pi else phi


def reference_qpa(spec: PermutationSpec) -> tuple[int, complex]:
    """Run ``F^dagger P F |1>`` densely; return the outcome index and its phase."""
    d = spec.d
    f = dft_matrix(d)
    e1 = np.zeros(d, dtype=complex)
    e1[1] = 1
    out = f.conj().T @ permutation_matrix(spec) @ f @ e1
    hits = np.flatnonzero(np.abs(np.abs(out) - 1) < MODULUS_ATOL)
    if hits.size != 1:
        raise InternalInconsistency(f"{spec}: no single unit-modulus amplitude in {np.round(out, 6)}")
    k = int(hits[0])
    phase = out[k] / abs(out[k])
    return k, cmath.exp(1j * principal_phase(phase))


def expected_qpa_outcome(spec: PermutationSpec) -> tuple[int, complex]:
    """Closed form: ``(1, e^{-2 pi i m/d})`` for +, ``(d-1, e^{2 pi i m/d})`` for -.

    P_m^+ shifts F|1> by m, which multiplies it by ``e^{-2 pi i m/d}``; P_m^-
    reflects it onto ``e^{2 pi i m/d}`` F|d-1>.
    """
    d, m = spec.d, spec.m
    sign = -1 if spec.positive else 1
    k = 1 if spec.positive else d - 1
    return k, cmath.exp(1j * principal_phase(cmath.exp(sign * 2j * math.pi * m / d)))


def basis_oracle(spec: PermutationSpec) -> Callable[[int], int]:
    """Black box that only accepts and returns basis-state labels."""
    return lambda k: permute_index(spec, k)


class CountingOracle:
    """Wraps a basis-state oracle and counts how often it is queried."""

    def __init__(self, fn: Callable[[int], int]):
        self._fn = fn
        self.queries = 0

    def __call__(self, k: int) -> int:
        self.queries += 1
        return self._fn(k)


def classical_parity(oracle: Callable[[int], int], d: int) -> tuple[int, int]:
    """Decide the parity of a cyclic permutation with two basis-state queries.

    Querying ``|0>`` reveals ``m``; querying ``|1>`` then gives ``m + 1`` for a
    positive and ``m - 1`` for a negative permutation.  For d = 2 the two
    parities are the same map and the answer is reported as positive.
    Returns ``(parity, queries_used)``.
    """
    counter = oracle if isinstance(oracle, CountingOracle) else CountingOracle(oracle)
    before = counter.queries
    m = counter(0)
    image_of_one = counter(1)
    parity = 1 if image_of_one == (m + 1) % d else -1
    return parity, counter.queries - before
