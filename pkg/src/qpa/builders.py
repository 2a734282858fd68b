"""Circuit builders for the permutation algorithm on an n-qubit register (d = 2**n).

Two schemes share the same state preparation:

* ``original``: prep, permutation, inverse QFT, measure every qubit
  (outcome ``|1>`` for positive parity, ``|d-1>`` for negative);
* ``optimized``: prep, permutation, ``U1(pi/2)`` then ``H`` on qubit 1,
  measure qubit 1 only (``1`` for positive, ``0`` for negative).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    CNOT,
    CPHASE,
    Circuit,
    Gate,
    H,
    PermutationSpec,
    S,
    SWAP,
    TOFFOLI,
    U1,
    X,
    Z,
)

SCHEMES = ("original", "optimized")

# qubit whose relative phase is +-i for every n
DECODE_QUBIT = 1


class UnsupportedDimension(ValueError):
    pass


@dataclass(frozen=True)
class QpaScheme:
    variant: str
    n: int

    def __post_init__(self) -> None:
        if self.variant not in SCHEMES:
            raise ValueError(f"unknown scheme {self.variant!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")

    @property
    def d(self) -> int:
        return 1 << self.n

    def measured_qubits(self) -> tuple[int, ...]:
        if self.variant == "optimized":
            return (DECODE_QUBIT,)
        return tuple(range(self.n))

    def expected_outcome(self, spec: PermutationSpec) -> int:
        """Index of the correct outcome over the measured qubits."""
        if self.variant == "optimized":
            return 1 if spec.positive else 0
        return 1 if spec.positive else self.d - 1


# ---------------------------------------------------------------------------
# Fourier stages


def qft_circuit(n: int) -> Circuit:
    """QFT with positive exponent: n H, n(n-1)/2 CPHASE, floor(n/2) trailing SWAPs."""
    if n < 1:
        raise ValueError("n must be >= 1")
    gates: list[Gate] = []
    for j in range(n):
        gates.append(H(j))
        for k in range(j + 1, n):
            gates.append(CPHASE(2 * math.pi / 2 ** (k - j + 1), k, j))
    for j in range(n // 2):
        gates.append(SWAP(j, n - 1 - j))
    return Circuit(n, gates)


def inverse_qft_circuit(n: int) -> Circuit:
    return qft_circuit(n).inverse()


def optimized_prep_circuit(n: int) -> Circuit:
    """``|0...0> -> F|1>`` with one H and one phase gate per qubit.

    Qubit j (0-based) picks up the relative phase ``2*pi / 2**(j+1)``; the
    first two use the named gates Z and S, the rest U1.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    gates: list[Gate] = []
    for j in range(n):
        lam = 2 * math.pi / 2 ** (j + 1)
        gates.append(H(j))
        gates.append(Z(j) if j == 0 else S(j) if j == 1 else U1(lam, j))
    return Circuit(n, gates)


def optimized_decode_circuit(n: int) -> Circuit:
    if n < 2:
        raise ValueError("the decode qubit needs n >= 2")
    return Circuit(n, [S(DECODE_QUBIT), H(DECODE_QUBIT)])


# ---------------------------------------------------------------------------
# permutations
#
# Adding 2**b to the register is an increment of the sub-register q0..q_{n-1-b}.
# An increment is the descending cascade  C^{L}X(q1..qL -> q0), ..., CNOT(qL -> q_{L-1}), X(qL).


def mcx(controls: list[int], target: int) -> list[Gate]:
    """Multi-controlled X from X/CNOT/TOFFOLI, with H and CPHASE for >= 3 controls."""
    if not controls:
        return [X(target)]
    if len(controls) == 1:
        return [CNOT(controls[0], target)]
    if len(controls) == 2:
        return [TOFFOLI(controls[0], controls[1], target)]
    return [H(target), *mc_phase(math.pi, controls, target), H(target)]


def mc_phase(lam: float, controls: list[int], target: int) -> list[Gate]:
    """Phase ``e^{i lam}`` on the all-ones subspace of ``controls + [target]``, no ancilla."""
    if not controls:
        return [U1(lam, target)]
    if len(controls) == 1:
        return [CPHASE(lam, controls[0], target)]
    *rest, last = controls
    return [
        CPHASE(lam / 2, last, target),
        *mcx(rest, last),
        CPHASE(-lam / 2, last, target),
        *mcx(rest, last),
        *mc_phase(lam / 2, rest, target),
    ]


def increment(qubits: list[int]) -> list[Gate]:
    """+1 mod 2**len(qubits); ``qubits[0]`` is the most significant."""
    gates: list[Gate] = []
    for i, t in enumerate(qubits):
        gates.extend(mcx(qubits[i + 1:], t))
    return gates


def decrement(qubits: list[int]) -> list[Gate]:
    return [g.inverse() for g in reversed(increment(qubits))]


def add_constant(n: int, m: int) -> list[Gate]:
    m %= 1 << n
    gates: list[Gate] = []
    for b in range(n - 1, -1, -1):
        if m >> b & 1:
            gates.extend(increment(list(range(n - b))))
    return gates


def subtract_constant(n: int, m: int) -> list[Gate]:
    m %= 1 << n
    gates: list[Gate] = []
    for b in range(n - 1, -1, -1):
        if m >> b & 1:
            gates.extend(decrement(list(range(n - b))))
    return gates


def _shift(n: int, m: int) -> list[Gate]:
    """Cheaper of adding m and subtracting d - m."""
    d = 1 << n
    a, s = add_constant(n, m), subtract_constant(n, d - m)
    return a if _cost(a) <= _cost(s) else s


_COST = {1: 1, 2: 10, 3: 69}


def _cost(gates: list[Gate]) -> int:
    return sum(_COST[g.arity] for g in gates)


def cancel_pairs(gates: list[Gate]) -> list[Gate]:
    """Drop adjacent identical self-inverse gates, looking past gates on other qubits.

    An X on a qubit also commutes past a CNOT/TOFFOLI that uses it as target.
    """
    out: list[Gate] = []
    for g in gates:
        if g.kind in ("X", "Z", "H", "CNOT", "SWAP", "TOFFOLI"):
            j = len(out) - 1
            while j >= 0:
                h = out[j]
                if h == g:
                    del out[j]
                    break
                shared = set(h.qubits) & set(g.qubits)
                if not shared:
                    j -= 1
                    continue
                if (
                    g.kind == "X"
                    and h.kind in ("CNOT", "TOFFOLI")
                    and shared == {h.qubits[-1]}
                ):
                    j -= 1
                    continue
                out.append(g)
                break
            else:
                out.append(g)
        else:
            out.append(g)
    return out


# Curated two-qubit set: X and CNOT only, every CNOT controlled by q1.
_TWO_QUBIT = {
    (0, 1): [],
    (1, 1): [CNOT(1, 0), X(1)],
    (2, 1): [X(0)],
    (3, 1): [X(1), CNOT(1, 0)],
    (0, -1): [CNOT(1, 0)],
    (1, -1): [X(1)],
    (2, -1): [CNOT(1, 0), X(0)],
    (3, -1): [X(0), X(1)],
}


def generic_permutation_gates(n: int, spec: PermutationSpec) -> list[Gate]:
    d = 1 << n
    if spec.positive:
        return cancel_pairs(_shift(n, spec.m))
    neg = [X(q) for q in range(n)]
    # m - k = (d-1-k) + (m+1)  =  NEG then shift by m+1,  or  shift by d-1-m then NEG
    candidates = [
        cancel_pairs(neg + _shift(n, spec.m + 1)),
        cancel_pairs(_shift(n, d - 1 - spec.m) + neg),
    ]
    return min(candidates, key=_cost)


def permutation_circuit(n: int, spec: PermutationSpec) -> Circuit:
    if spec.d != 1 << n:
        raise UnsupportedDimension(f"spec dimension {spec.d} != 2**{n}")
    if n == 1:
        # d = 2: P_m^+ and P_m^- coincide
        return Circuit(1, [X(0)] if spec.m else [])
    if n == 2:
        return Circuit(2, _TWO_QUBIT[(spec.m, spec.parity)])
    return Circuit(n, generic_permutation_gates(n, spec))


# ---------------------------------------------------------------------------
# pipelines


def build_pipeline(scheme: QpaScheme, spec: PermutationSpec) -> Circuit:
    n = scheme.n
    if spec.d != scheme.d:
        raise UnsupportedDimension(f"spec dimension {spec.d} does not match n={n}")
    prep = optimized_prep_circuit(n)
    perm = permutation_circuit(n, spec)
    if scheme.variant == "optimized":
        return prep + perm + optimized_decode_circuit(n)
    return prep + perm + inverse_qft_circuit(n)


def scaling_row(n: int) -> dict[str, int]:
    """Closed-form and constructed gate counts for both schemes at width n."""
    qft = qft_circuit(n).count()
    prep = 2 * n
    fourier = qft.get("H", 0) + qft.get("CPHASE", 0)
    swaps = qft.get("SWAP", 0)
    row = {
        "n": n,
        "optimized_prep": prep,
        "optimized_decode": 2,
        "optimized_total": prep + 2,
        "fdag_h_cphase": fourier,
        "fdag_swaps": swaps,
        "original_total": prep + fourier + swaps,
        "qft_pair_total": 2 * (fourier + swaps),
    }
    return row
