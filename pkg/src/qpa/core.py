"""Shared domain types: gates, circuits, permutation specs and qubit labelings.

Basis-state integers follow the q0-most-significant convention: for an
n-qubit register, ``|q0 q1 ... q_{n-1}>`` is the integer
``q0 * 2**(n-1) + ... + q_{n-1}``.  Reshaping a length ``2**n`` amplitude
vector to ``(2,) * n`` in C order therefore puts qubit ``j`` on axis ``j``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

GLOBAL_PHASE_ATOL = 1e-9

ONE_QUBIT = ("X", "Z", "H", "S", "T", "U1")
TWO_QUBIT = ("CNOT", "CPHASE", "SWAP")
THREE_QUBIT = ("TOFFOLI",)
PARAMETRIC = ("U1", "CPHASE")
SELF_INVERSE = ("X", "Z", "H", "CNOT", "SWAP", "TOFFOLI")

ARITY = {k: 1 for k in ONE_QUBIT}
ARITY.update({k: 2 for k in TWO_QUBIT})
ARITY.update({k: 3 for k in THREE_QUBIT})


class CircuitError(ValueError):
    """Malformed gate or circuit."""


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    param: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ARITY:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(self.qubits) != ARITY[self.kind]:
            raise CircuitError(
                f"{self.kind} takes {ARITY[self.kind]} operand(s), got {len(self.qubits)}"
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"{self.kind} operands must be distinct: {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise CircuitError(f"negative qubit index in {self.qubits}")
        if self.kind in PARAMETRIC:
            if self.param is None or not math.isfinite(self.param):
                raise CircuitError(f"{self.kind} needs a finite angle")
            object.__setattr__(self, "param", float(self.param))
        elif self.param is not None:
            raise CircuitError(f"{self.kind} takes no parameter")

    @property
    def arity(self) -> int:
        return ARITY[self.kind]

    def on(self, *qubits: int) -> "Gate":
        """Same gate acting on different qubits."""
        return Gate(self.kind, qubits, self.param)

    def inverse(self) -> "Gate":
        if self.kind in PARAMETRIC:
            return Gate(self.kind, self.qubits, -self.param)
        if self.kind == "S":
            return Gate("U1", self.qubits, -math.pi / 2)
        if self.kind == "T":
            return Gate("U1", self.qubits, -math.pi / 4)
        return self

    def __str__(self) -> str:
        head = self.kind if self.param is None else f"{self.kind},{self.param!r}"
        return f"{head} {','.join(str(q) for q in self.qubits)}"


# Convenience constructors, mirroring the gate names.
def X(q: int) -> Gate:
    return Gate("X", (q,))


def Z(q: int) -> Gate:
    return Gate("Z", (q,))


def H(q: int) -> Gate:
    return Gate("H", (q,))


def S(q: int) -> Gate:
    return Gate("S", (q,))


def T(q: int) -> Gate:
    return Gate("T", (q,))


def U1(lam: float, q: int) -> Gate:
    return Gate("U1", (q,), lam)


def CNOT(control: int, target: int) -> Gate:
    return Gate("CNOT", (control, target))


def CPHASE(lam: float, control: int, target: int) -> Gate:
    return Gate("CPHASE", (control, target), lam)


def SWAP(a: int, b: int) -> Gate:
    return Gate("SWAP", (a, b))


def TOFFOLI(c0: int, c1: int, target: int) -> Gate:
    return Gate("TOFFOLI", (c0, c1, target))


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self) -> None:
        if self.num_qubits < 1:
            raise CircuitError("a circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.qubits) >= self.num_qubits:
                raise CircuitError(f"{g} addresses a qubit outside 0..{self.num_qubits - 1}")

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.num_qubits != self.num_qubits:
            raise CircuitError("cannot concatenate circuits of different width")
        return Circuit(self.num_qubits, self.gates + other.gates)

    def inverse(self) -> "Circuit":
        return Circuit(self.num_qubits, tuple(g.inverse() for g in reversed(self.gates)))

    def count(self) -> dict[str, int]:
        """Gate counts by kind, in first-seen order."""
        counts: dict[str, int] = {}
        for g in self.gates:
            counts[g.kind] = counts.get(g.kind, 0) + 1
        return counts

    def count_by_arity(self) -> dict[int, int]:
        counts = {1: 0, 2: 0, 3: 0}
        for g in self.gates:
            counts[g.arity] += 1
        return counts

    def dumps(self) -> str:
        return dumps(self)


@dataclass(frozen=True)
class PermutationSpec:
    d: int
    m: int
    parity: int  # +1 or -1

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ValueError(f"dimension must be >= 2, got {self.d}")
        if not 0 <= self.m < self.d:
            raise ValueError(f"m must lie in [0, {self.d - 1}], got {self.m}")
        if self.parity not in (1, -1):
            raise ValueError(f"parity must be +1 or -1, got {self.parity}")

    @property
    def positive(self) -> bool:
        return self.parity == 1

    @property
    def sign(self) -> str:
        return "+" if self.positive else "-"

    def __str__(self) -> str:
        return f"P_{self.m}^{self.sign} (d={self.d})"

    @classmethod
    def all_for(cls, d: int) -> list["PermutationSpec"]:
        """Every spec of dimension d, positives first, ordered by m."""
        return [cls(d, m, p) for p in (1, -1) for m in range(d)]


def parse_parity(text: str | int) -> int:
    if isinstance(text, int):
        if text in (1, -1):
            return text
        raise ValueError(f"bad parity {text!r}")
    key = text.strip().lower()
    if key in ("+", "+1", "1", "pos", "positive", "plus"):
        return 1
    if key in ("-", "-1", "neg", "negative", "minus"):
        return -1
    raise ValueError(f"bad parity {text!r}")


@dataclass(frozen=True)
class QubitLabeling:
    """Logical qubit index (0 = most significant) -> physical qubit id."""

    mapping: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        m = {int(k): int(v) for k, v in dict(self.mapping).items()}
        if len(set(m.values())) != len(m):
            raise ValueError(f"labeling is not injective: {m}")
        object.__setattr__(self, "mapping", m)

    @classmethod
    def identity(cls, n: int) -> "QubitLabeling":
        return cls({i: i for i in range(n)})

    @classmethod
    def parse(cls, text: str) -> "QubitLabeling":
        """Parse ``q0=3,q1=2`` (the ``q`` prefix is optional)."""
        mapping = {}
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            try:
                lhs, rhs = item.split("=")
                mapping[int(lhs.strip().lstrip("qQ"))] = int(rhs)
            except ValueError as exc:
                raise ValueError(f"bad placement item {item!r}") from exc
        return cls(mapping)

    def __getitem__(self, q: int) -> int:
        return self.mapping[q]

    def __contains__(self, q: int) -> bool:
        return q in self.mapping

    def __len__(self) -> int:
        return len(self.mapping)

    def is_identity(self) -> bool:
        return all(k == v for k, v in self.mapping.items())

    def as_dict(self) -> dict[str, int]:
        return {f"q{k}": v for k, v in sorted(self.mapping.items())}

    def __str__(self) -> str:
        return ",".join(f"q{k}={v}" for k, v in sorted(self.mapping.items()))


# Preset placements used in the hardware runs; only calibration lookup depends on them.
PLACEMENTS = {
    ("optimized", 2): ("ibmqx2", QubitLabeling({0: 1, 1: 0})),
    ("original", 2): ("ibmqx4", QubitLabeling({0: 3, 1: 2})),
    ("optimized", 3): ("ibmqx4", QubitLabeling({0: 4, 1: 3, 2: 2})),
}


# ---------------------------------------------------------------------------
# matrices

_SQRT1_2 = 1 / math.sqrt(2)


def u1_matrix(lam: float) -> np.ndarray:
    return np.array([[1, 0], [0, np.exp(1j * lam)]], dtype=complex)


def single_qubit_matrix(g: Gate) -> np.ndarray:
    kind = g.kind
    if kind == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind == "H":
        return np.array([[_SQRT1_2, _SQRT1_2], [_SQRT1_2, -_SQRT1_2]], dtype=complex)
    if kind == "Z":
        return np.array([[1, 0], [0, -1]], dtype=complex)
    if kind == "S":
        return np.array([[1, 0], [0, 1j]], dtype=complex)
    if kind == "T":
        return u1_matrix(math.pi / 4)
    if kind == "U1":
        return u1_matrix(g.param)
    raise CircuitError(f"{kind} is not a single-qubit gate")


def gate_matrix(g: Gate) -> np.ndarray:
    """Defining unitary of ``g`` on its operands, first operand most significant."""
    if g.arity == 1:
        return single_qubit_matrix(g)
    if g.kind == "CNOT":
        m = np.eye(4, dtype=complex)
        m[[2, 3]] = m[[3, 2]]
        return m
    if g.kind == "CPHASE":
        return np.diag([1, 1, 1, np.exp(1j * g.param)]).astype(complex)
    if g.kind == "SWAP":
        m = np.eye(4, dtype=complex)
        m[[1, 2]] = m[[2, 1]]
        return m
    # TOFFOLI
    m = np.eye(8, dtype=complex)
    m[[6, 7]] = m[[7, 6]]
    return m


def global_phase_of(a: np.ndarray, b: np.ndarray, atol: float = GLOBAL_PHASE_ATOL) -> complex | None:
    """Phase ``p`` with ``a ~= p * b``, normalized on the first nonzero entry of ``b``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return None
    flat = b.ravel()
    nz = np.flatnonzero(np.abs(flat) > atol)
    if nz.size == 0:
        return 1.0 + 0j if np.allclose(a, 0, atol=atol) else None
    k = nz[0]
    ratio = a.ravel()[k] / flat[k]
    if abs(abs(ratio) - 1) > atol:
        return None
    ratio /= abs(ratio)
    return complex(ratio) if np.allclose(a, ratio * b, atol=atol, rtol=0) else None


def equal_up_to_global_phase(a: np.ndarray, b: np.ndarray, atol: float = GLOBAL_PHASE_ATOL) -> bool:
    return global_phase_of(a, b, atol) is not None


# ---------------------------------------------------------------------------
# text serialization
#
#   qubits 3
#   H 0
#   U1,1.5707963267948966 1
#   CNOT 1,0
#   TOFFOLI 1,2,0
#
# Blank lines and ``#`` comments are ignored.  Angles are written with ``repr``
# so every float round-trips exactly.


def dumps(circuit: Circuit) -> str:
    lines = [f"qubits {circuit.num_qubits}"]
    lines.extend(str(g) for g in circuit.gates)
    return "\n".join(lines) + "\n"


def loads(text: str) -> Circuit:
    num_qubits = None
    gates = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            head, _, operands = line.partition(" ")
            if head.lower() == "qubits":
                num_qubits = int(operands)
                continue
            kind, _, param = head.partition(",")
            qubits = tuple(int(q) for q in operands.replace(" ", "").split(","))
            gates.append(Gate(kind.upper(), qubits, float(param) if param else None))
        except (ValueError, CircuitError) as exc:
            raise CircuitError(f"line {lineno}: cannot parse {raw!r}: {exc}") from exc
    if num_qubits is None:
        num_qubits = max((max(g.qubits) for g in gates), default=0) + 1
    return Circuit(num_qubits, gates)


def circuit(num_qubits: int, gates: Iterable[Gate] = ()) -> Circuit:
    return Circuit(num_qubits, tuple(gates))


def concat(*parts: Circuit) -> Circuit:
    if not parts:
        raise CircuitError("nothing to concatenate")
    out = parts[0]
    for p in parts[1:]:
        out = out + p
    return out


def relabel(c: Circuit, mapping: Sequence[int] | Mapping[int, int], num_qubits: int | None = None) -> Circuit:
    """Rename qubits: operand ``q`` becomes ``mapping[q]``."""
    return Circuit(
        c.num_qubits if num_qubits is None else num_qubits,
        tuple(g.on(*(mapping[q] for q in g.qubits)) for g in c.gates),
    )
