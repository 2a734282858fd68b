"""Statevector simulation, exact outcome distributions and seeded sampling.

States are plain 1-D ``complex128`` arrays of length ``2**n``.  Every public
function treats its inputs as values: kernels work on a scratch copy.

Sampling is reproducible across platforms.  A seed drives numpy's PCG64 bit
generator; ``sample`` draws one ``Generator.random()`` double per shot and maps
it through the cumulative distribution (``searchsorted`` with ``side="right"``
over outcomes in index order).  Child seeds for parallel work come from
``derive_seed``, which spawns ``numpy.random.SeedSequence(seed)`` children.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Circuit, Gate, single_qubit_matrix

NORM_ATOL = 1e-10


class DimensionMismatch(ValueError):
    pass


def num_qubits_of(state: np.ndarray) -> int:
    dim = state.shape[0]
    n = dim.bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise DimensionMismatch(f"state length {dim} is not a power of two >= 2")
    return n


def check_state(state: np.ndarray) -> None:
    """Raise ValueError unless every column is finite with unit norm (within NORM_ATOL)."""
    a = np.asarray(state)
    if not np.all(np.isfinite(a)):
        raise ValueError("state has non-finite amplitudes")
    norms = np.sum(np.abs(a) ** 2, axis=0)
    if np.any(np.abs(norms - 1) > NORM_ATOL):
        raise ValueError(f"state is not normalized: squared norm {norms!r}")


def basis_state(n: int, k: int = 0) -> np.ndarray:
    psi = np.zeros(1 << n, dtype=complex)
    psi[k] = 1
    return psi


def zero_state(n: int) -> np.ndarray:
    return basis_state(n, 0)


# ---------------------------------------------------------------------------
# kernels on tensors shaped (2,)*n + batch


def _idx(n: int, fixed: dict[int, int]) -> tuple:
    sl = [slice(None)] * n
    for q, v in fixed.items():
        sl[q] = v
    return tuple(sl) + (Ellipsis,)


def _apply_inplace(psi: np.ndarray, g: Gate, n: int) -> None:
    kind, qs = g.kind, g.qubits
    if g.arity == 1:
        q = qs[0]
        i0, i1 = _idx(n, {q: 0}), _idx(n, {q: 1})
        if kind == "X":
            a0 = psi[i0].copy()
            psi[i0] = psi[i1]
            psi[i1] = a0
        elif kind == "H":
            a0 = psi[i0].copy()
            a1 = psi[i1]
            s = 1 / math.sqrt(2)
            psi[i0] = (a0 + a1) * s
            psi[i1] = (a0 - a1) * s
        else:
            # diagonal: Z, S, T, U1
            psi[i1] *= single_qubit_matrix(g)[1, 1]
    elif kind == "CNOT":
        c, t = qs
        i10, i11 = _idx(n, {c: 1, t: 0}), _idx(n, {c: 1, t: 1})
        a = psi[i10].copy()
        psi[i10] = psi[i11]
        psi[i11] = a
    elif kind == "CPHASE":
        psi[_idx(n, {qs[0]: 1, qs[1]: 1})] *= np.exp(1j * g.param)
    elif kind == "SWAP":
        a, b = qs
        i01, i10 = _idx(n, {a: 0, b: 1}), _idx(n, {a: 1, b: 0})
        tmp = psi[i01].copy()
        psi[i01] = psi[i10]
        psi[i10] = tmp
    elif kind == "TOFFOLI":
        c0, c1, t = qs
        i0, i1 = _idx(n, {c0: 1, c1: 1, t: 0}), _idx(n, {c0: 1, c1: 1, t: 1})
        a = psi[i0].copy()
        psi[i0] = psi[i1]
        psi[i1] = a
    else:  # pragma: no cover - Gate validates kinds
        raise ValueError(kind)


def _check(g: Gate, n: int) -> None:
    if max(g.qubits) >= n:
        raise DimensionMismatch(f"{g} does not fit a {n}-qubit state")


def apply_gate(state: np.ndarray, g: Gate) -> np.ndarray:
    n = num_qubits_of(state)
    _check(g, n)
    psi = np.array(state, dtype=complex).reshape((2,) * n + state.shape[1:])
    _apply_inplace(psi, g, n)
    return psi.reshape(state.shape)


def run_circuit(c: Circuit, initial: np.ndarray | None = None) -> np.ndarray:
    """Apply the gates of ``c`` left to right; ``initial`` defaults to ``|0...0>``."""
    if initial is None:
        initial = zero_state(c.num_qubits)
    else:
        check_state(initial)
    n = num_qubits_of(initial)
    if n != c.num_qubits:
        raise DimensionMismatch(f"{c.num_qubits}-qubit circuit on a {n}-qubit state")
    psi = np.array(initial, dtype=complex).reshape((2,) * n + initial.shape[1:])
    for g in c.gates:
        _apply_inplace(psi, g, n)
    return psi.reshape(initial.shape)


def unitary_of(c: Circuit) -> np.ndarray:
    """Dense ``2**n x 2**n`` unitary, built by running every basis column."""
    dim = 1 << c.num_qubits
    return run_circuit(c, np.eye(dim, dtype=complex))


def embed(matrix: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Lift a ``2**k`` operator on ``qubits`` (first most significant) to n qubits."""
    k = len(qubits)
    rest = [q for q in range(n) if q not in qubits]
    order = list(qubits) + rest
    full = np.kron(matrix, np.eye(1 << (n - k)))
    t = full.reshape((2,) * (2 * n))
    inv = np.argsort(order)
    t = t.transpose(list(inv) + [n + i for i in inv])
    return t.reshape(1 << n, 1 << n)


def permutation_unitary(wires: Sequence[int] | dict[int, int], n: int) -> np.ndarray:
    """Unitary moving the content of qubit ``i`` onto qubit ``wires[i]``."""
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    for k in range(dim):
        bits = [(k >> (n - 1 - i)) & 1 for i in range(n)]
        j = 0
        for i, b in enumerate(bits):
            if b:
                j |= 1 << (n - 1 - wires[i])
        out[j, k] = 1
    return out


# ---------------------------------------------------------------------------
# distributions


@dataclass(frozen=True)
class Distribution:
    probabilities: tuple[float, ...]

    def __post_init__(self) -> None:
        p = tuple(float(x) for x in self.probabilities)
        if len(p) < 1 or any(x < 0 or not math.isfinite(x) for x in p):
            raise ValueError("probabilities must be finite and nonnegative")
        if abs(sum(p) - 1) > NORM_ATOL * max(1, len(p)):
            raise ValueError(f"probabilities sum to {sum(p)!r}")
        object.__setattr__(self, "probabilities", p)

    @property
    def dim(self) -> int:
        return len(self.probabilities)

    def __getitem__(self, k: int) -> float:
        return self.probabilities[k]

    def as_array(self) -> np.ndarray:
        return np.array(self.probabilities)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "values": list(self.probabilities)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "Distribution":
        values = data["values"]
        if data.get("dim", len(values)) != len(values):
            raise ValueError("dim does not match values")
        return cls(tuple(values))

    @classmethod
    def from_json(cls, text: str) -> "Distribution":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class ShotCounts:
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        c = tuple(int(x) for x in self.counts)
        if any(x < 0 for x in c):
            raise ValueError("counts must be nonnegative")
        object.__setattr__(self, "counts", c)

    @property
    def dim(self) -> int:
        return len(self.counts)

    @property
    def shots(self) -> int:
        return sum(self.counts)

    def __getitem__(self, k: int) -> int:
        return self.counts[k]

    def frequencies(self) -> np.ndarray:
        return np.array(self.counts, dtype=float) / self.shots

    def to_dict(self) -> dict:
        return {"dim": self.dim, "values": list(self.counts)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "ShotCounts":
        values = data["values"]
        if data.get("dim", len(values)) != len(values):
            raise ValueError("dim does not match values")
        return cls(tuple(values))

    @classmethod
    def from_json(cls, text: str) -> "ShotCounts":
        return cls.from_dict(json.loads(text))


def _clean_probs(p: np.ndarray) -> tuple[float, ...]:
    p = np.clip(p, 0.0, None)
    return tuple(float(x) for x in p / p.sum())


def measure_all(state: np.ndarray) -> Distribution:
    return Distribution(_clean_probs(np.abs(np.asarray(state)) ** 2))


def marginal_probabilities(probs: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Marginal over ``qubits`` (listed order, first most significant) of a basis distribution.

    ``probs`` may carry leading batch axes; the last axis has length ``2**n``.
    """
    probs = np.asarray(probs)
    batch = probs.shape[:-1]
    t = probs.reshape(batch + (2,) * n)
    nb = len(batch)
    drop = tuple(nb + q for q in range(n) if q not in qubits)
    t = t.sum(axis=drop) if drop else t
    kept = sorted(qubits)
    perm = [kept.index(q) for q in qubits]
    t = np.transpose(t, list(range(nb)) + [nb + p for p in perm])
    return t.reshape(batch + (1 << len(qubits),))


def measure_qubits(state: np.ndarray, qubits: Sequence[int]) -> Distribution:
    n = num_qubits_of(state)
    for q in qubits:
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} out of range for {n} qubits")
    return Distribution(_clean_probs(marginal_probabilities(np.abs(state) ** 2, qubits, n)))


def measure_qubit(state: np.ndarray, j: int) -> tuple[float, float]:
    p = measure_qubits(state, [j])
    return p[0], p[1]


# ---------------------------------------------------------------------------
# sampling


def derive_seed(seed: int, index: int) -> int:
    """64-bit child seed number ``index`` of ``seed`` (SeedSequence spawning)."""
    child = np.random.SeedSequence(int(seed)).spawn(index + 1)[index]
    lo, hi = child.generate_state(2, dtype=np.uint32)
    return int(hi) << 32 | int(lo)


def generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def inverse_cdf(probabilities: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Outcome index for each uniform draw; the last axis of ``probabilities`` is the outcome."""
    cdf = np.cumsum(probabilities, axis=-1)
    last = probabilities.shape[-1] - 1
    if cdf.ndim == 1:
        idx = np.searchsorted(cdf, u * cdf[-1], side="right")
    else:
        idx = (cdf <= (u * cdf[:, -1])[:, None]).sum(axis=1)
    return np.minimum(idx, last)


def sample(dist: Distribution, shots: int, seed: int) -> ShotCounts:
    if shots < 1:
        raise ValueError("shots must be positive")
    u = generator(seed).random(shots)
    p = dist.as_array()
    idx = inverse_cdf(p, u)
    # a zero-probability outcome is never selected, even at the top edge
    idx = _avoid_zero(idx, p)
    return ShotCounts(tuple(np.bincount(idx, minlength=dist.dim)))


def _avoid_zero(idx: np.ndarray, p: np.ndarray) -> np.ndarray:
    if p.ndim == 1:
        bad = p[idx] == 0
        if bad.any():
            support = np.flatnonzero(p > 0)
            pos = np.searchsorted(support, idx[bad], side="right") - 1
            idx = idx.copy()
            idx[bad] = support[np.maximum(pos, 0)]
    return idx
