"""Lowering of logical circuits onto a directed coupling map.

The native target is {X, Z, H, S, T, U1} plus CNOT along an allowed
(control, target) edge.  ``transpile`` runs four passes in a fixed order:

1. TOFFOLI -> 6 CNOT + 9 single-qubit gates,
2. CPHASE -> 2 CNOT + 3 U1,
3. SWAP elimination by relabeling wires,
4. CNOT direction reversal with four H gates.

Passes 1 and 2 already know where each gate will land after pass 3, so they
orient their CNOTs along existing edges whenever the map allows it.
Circuits stay on logical indices; ``placement`` maps them to physical qubits.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .core import (
    CNOT,
    Circuit,
    Gate,
    H,
    QubitLabeling,
    T,
    U1,
)

ABSORB_MODES = ("output", "input")


class UnroutableCircuit(ValueError):
    pass


@dataclass(frozen=True)
class CouplingMap:
    num_qubits: int
    edges: frozenset[tuple[int, int]]
    name: str = "custom"

    def __post_init__(self) -> None:
        edges = frozenset((int(c), int(t)) for c, t in self.edges)
        for c, t in edges:
            if c == t:
                raise ValueError(f"self-loop on qubit {c}")
            if not (0 <= c < self.num_qubits and 0 <= t < self.num_qubits):
                raise ValueError(f"edge {(c, t)} outside 0..{self.num_qubits - 1}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_adjacency(cls, adjacency: dict[int, Iterable[int]], num_qubits: int, name: str = "custom") -> "CouplingMap":
        return cls(num_qubits, frozenset((c, t) for c, ts in adjacency.items() for t in ts), name)

    def allows(self, control: int, target: int) -> bool:
        return (control, target) in self.edges

    def connected(self, a: int, b: int) -> bool:
        return (a, b) in self.edges or (b, a) in self.edges

    def to_dict(self) -> dict:
        return {"num_qubits": self.num_qubits, "edges": [list(e) for e in sorted(self.edges)]}

    @classmethod
    def from_dict(cls, data: dict, name: str = "custom") -> "CouplingMap":
        return cls(int(data["num_qubits"]), frozenset(tuple(e) for e in data["edges"]), data.get("name", name))

    @classmethod
    def load(cls, path: str | Path) -> "CouplingMap":
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text(encoding="utf-8")), name=path.stem)


COUPLING_MAPS = {
    "ibmqx2": CouplingMap.from_adjacency({0: (1, 2), 1: (2,), 3: (2, 4), 4: (2,)}, 5, "ibmqx2"),
    "ibmqx4": CouplingMap.from_adjacency({1: (0,), 2: (0, 1, 4), 3: (2, 4)}, 5, "ibmqx4"),
}


def coupling_map(name_or_path: str) -> CouplingMap:
    if name_or_path in COUPLING_MAPS:
        return COUPLING_MAPS[name_or_path]
    path = Path(name_or_path)
    if path.exists():
        return CouplingMap.load(path)
    raise ValueError(f"unknown coupling map {name_or_path!r} (presets: {', '.join(COUPLING_MAPS)})")


@dataclass
class TranspileReport:
    input_counts: dict[str, int]
    output_counts: dict[str, int] = field(default_factory=dict)
    pass_deltas: dict[str, dict[str, int]] = field(default_factory=dict)
    input_relabeling: QubitLabeling | None = None
    output_relabeling: QubitLabeling | None = None
    placement: QubitLabeling | None = None
    coupling_map: str = ""

    def total_delta(self) -> int:
        return sum(sum(d.values()) for d in self.pass_deltas.values())

    def to_dict(self) -> dict:
        return {
            "coupling_map": self.coupling_map,
            "placement": self.placement.as_dict() if self.placement else None,
            "input_counts": dict(sorted(self.input_counts.items())),
            "output_counts": dict(sorted(self.output_counts.items())),
            "pass_deltas": {k: dict(sorted(v.items())) for k, v in self.pass_deltas.items()},
            "input_relabeling": self.input_relabeling.as_dict() if self.input_relabeling else None,
            "output_relabeling": self.output_relabeling.as_dict() if self.output_relabeling else None,
        }


# ---------------------------------------------------------------------------
# single rewrites


def toffoli_gates(c0: int, c1: int, target: int) -> list[Gate]:
    """Clifford+T Toffoli; uses the edges c0->target, c1->target and c1->c0."""
    tdg = -math.pi / 4
    return [
        H(target),
        CNOT(c0, target),
        T(c0),
        U1(tdg, target),
        CNOT(c1, target),
        CNOT(c1, c0),
        U1(tdg, c0),
        T(target),
        CNOT(c1, c0),
        CNOT(c0, target),
        U1(tdg, target),
        CNOT(c1, target),
        T(target),
        T(c1),
        H(target),
    ]


def decompose_toffoli(g: Gate) -> Circuit:
    if g.kind != "TOFFOLI":
        raise ValueError(f"expected TOFFOLI, got {g.kind}")
    c0, c1, t = g.qubits
    return Circuit(max(g.qubits) + 1, toffoli_gates(c0, c1, t))


def cphase_gates(lam: float, control: int, target: int) -> list[Gate]:
    return [
        U1(lam / 2, control),
        CNOT(control, target),
        U1(-lam / 2, target),
        CNOT(control, target),
        U1(lam / 2, target),
    ]


def decompose_cphase(g: Gate) -> Circuit:
    if g.kind != "CPHASE":
        raise ValueError(f"expected CPHASE, got {g.kind}")
    c, t = g.qubits
    return Circuit(max(g.qubits) + 1, cphase_gates(g.param, c, t))


def decompose_inverse_qft_2q() -> Circuit:
    """Two-qubit inverse QFT without its leading SWAP: 2 CNOT (q0 -> q1) and 5 one-qubit gates.

    Composing a SWAP in front gives the full inverse QFT.
    """
    return Circuit(2, [H(1), *cphase_gates(-math.pi / 2, 0, 1), H(0)])


def reverse_cnot(g: Gate) -> Circuit:
    if g.kind != "CNOT":
        raise ValueError(f"expected CNOT, got {g.kind}")
    c, t = g.qubits
    return Circuit(max(g.qubits) + 1, [H(c), H(t), CNOT(t, c), H(c), H(t)])


# ---------------------------------------------------------------------------
# SWAP elimination


def swap_frames(gates: list[Gate], absorb: str = "output") -> tuple[list[list[int] | None], list[int]]:
    """Wire each gate lands on once SWAPs are removed.

    Returns one frame per gate (``None`` for SWAPs) and the final frame.  With
    ``absorb="output"`` the gates after a SWAP are renamed and the relabeling
    shows up on the outputs; with ``absorb="input"`` the gates before it are
    renamed, which is invisible when the register starts in ``|0...0>``.
    """
    if absorb not in ABSORB_MODES:
        raise ValueError(f"absorb must be one of {ABSORB_MODES}")
    n = 1 + max((q for g in gates for q in g.qubits), default=0)
    wire = list(range(n))
    frames: list[list[int] | None] = [None] * len(gates)
    order = range(len(gates)) if absorb == "output" else range(len(gates) - 1, -1, -1)
    for i in order:
        g = gates[i]
        if g.kind == "SWAP":
            a, b = g.qubits
            wire[a], wire[b] = wire[b], wire[a]
        else:
            frames[i] = list(wire)
    return frames, wire


def eliminate_swaps(c: Circuit, absorb: str = "output") -> tuple[Circuit, QubitLabeling]:
    """Drop every SWAP and rename wires instead.

    For ``absorb="output"`` the returned labeling ``pi`` satisfies
    ``unitary_of(out) == permutation_unitary(pi) @ unitary_of(c)``: the value
    of logical qubit ``i`` is read from wire ``pi[i]``.  For ``absorb="input"``
    ``unitary_of(out) == unitary_of(c) @ permutation_unitary(pi)^-1``.
    """
    gates = list(c.gates)
    frames, final = swap_frames(gates, absorb)
    out = [g.on(*(f[q] for q in g.qubits)) for g, f in zip(gates, frames) if f is not None]
    full = final + list(range(len(final), c.num_qubits))
    return Circuit(c.num_qubits, out), QubitLabeling(dict(enumerate(full)))


# ---------------------------------------------------------------------------
# transpile


def _phys(placement: QubitLabeling, frame: list[int] | None, q: int) -> int:
    w = frame[q] if frame is not None and q < len(frame) else q
    return placement[w]


def _cnot_cost(cmap: CouplingMap, pairs: list[tuple[int, int]]) -> int:
    return sum(0 if cmap.allows(a, b) else 1 for a, b in pairs)


def _toffoli_pass(gates: list[Gate], cmap: CouplingMap, placement: QubitLabeling, absorb: str) -> list[Gate]:
    frames, _ = swap_frames(gates, absorb)
    out: list[Gate] = []
    for g, f in zip(gates, frames):
        if g.kind != "TOFFOLI":
            out.append(g)
            continue
        a, b, t = g.qubits
        pa, pb, pt = (_phys(placement, f, q) for q in (a, b, t))
        for x, y in ((pa, pb), (pa, pt), (pb, pt)):
            if not cmap.connected(x, y):
                raise UnroutableCircuit(f"{g}: physical qubits {x} and {y} are not coupled in {cmap.name}")
        # controls are interchangeable; pick the order with fewer reversed CNOTs
        cost_ab = _cnot_cost(cmap, [(pa, pt), (pb, pt), (pb, pa)])
        cost_ba = _cnot_cost(cmap, [(pb, pt), (pa, pt), (pa, pb)])
        c0, c1 = (a, b) if cost_ab <= cost_ba else (b, a)
        out.extend(toffoli_gates(c0, c1, t))
    return out


def _cphase_pass(gates: list[Gate], cmap: CouplingMap, placement: QubitLabeling, absorb: str) -> list[Gate]:
    frames, _ = swap_frames(gates, absorb)
    out: list[Gate] = []
    for g, f in zip(gates, frames):
        if g.kind != "CPHASE":
            out.append(g)
            continue
        a, b = g.qubits
        # CPHASE is symmetric in its operands
        if not cmap.allows(_phys(placement, f, a), _phys(placement, f, b)) and cmap.allows(
            _phys(placement, f, b), _phys(placement, f, a)
        ):
            a, b = b, a
        out.extend(cphase_gates(g.param, a, b))
    return out


def _direction_pass(gates: list[Gate], cmap: CouplingMap, placement: QubitLabeling) -> list[Gate]:
    out: list[Gate] = []
    for g in gates:
        if g.kind != "CNOT":
            out.append(g)
            continue
        c, t = g.qubits
        pc, pt = placement[c], placement[t]
        if cmap.allows(pc, pt):
            out.append(g)
        elif cmap.allows(pt, pc):
            out.extend(reverse_cnot(g).gates)
        else:
            raise UnroutableCircuit(f"{g}: no edge {pc}->{pt} or {pt}->{pc} in {cmap.name}")
    return out


def _counts(gates: list[Gate]) -> dict[str, int]:
    return Circuit(1 + max((q for g in gates for q in g.qubits), default=0), gates).count()


def _delta(before: list[Gate], after: list[Gate]) -> dict[str, int]:
    a, b = _counts(before), _counts(after)
    return {k: b.get(k, 0) - a.get(k, 0) for k in sorted(set(a) | set(b)) if b.get(k, 0) != a.get(k, 0)}


def transpile(
    c: Circuit,
    cmap: CouplingMap,
    placement: QubitLabeling | None = None,
    absorb: str = "output",
) -> tuple[Circuit, TranspileReport]:
    if placement is None:
        placement = QubitLabeling.identity(c.num_qubits)
    for q in range(c.num_qubits):
        if q not in placement:
            raise UnroutableCircuit(f"logical qubit {q} has no placement")
        if not 0 <= placement[q] < cmap.num_qubits:
            raise UnroutableCircuit(f"q{q} placed on {placement[q]}, outside {cmap.name}")

    report = TranspileReport(input_counts=c.count(), placement=placement, coupling_map=cmap.name)
    gates = list(c.gates)

    lowered = _toffoli_pass(gates, cmap, placement, absorb)
    report.pass_deltas["toffoli"] = _delta(gates, lowered)
    gates = lowered

    lowered = _cphase_pass(gates, cmap, placement, absorb)
    report.pass_deltas["cphase"] = _delta(gates, lowered)
    gates = lowered

    relabeled, labeling = eliminate_swaps(Circuit(c.num_qubits, gates), absorb)
    report.pass_deltas["swap"] = _delta(gates, list(relabeled.gates))
    identity = QubitLabeling.identity(c.num_qubits)
    if absorb == "output":
        report.output_relabeling, report.input_relabeling = labeling, identity
    else:
        report.output_relabeling, report.input_relabeling = identity, labeling
    gates = list(relabeled.gates)

    directed = _direction_pass(gates, cmap, placement)
    report.pass_deltas["direction"] = _delta(gates, directed)

    out = Circuit(c.num_qubits, directed)
    report.output_counts = out.count()
    return out, report


def is_native(c: Circuit, cmap: CouplingMap, placement: QubitLabeling) -> bool:
    for g in c.gates:
        if g.kind in ("CPHASE", "SWAP", "TOFFOLI"):
            return False
        if g.kind == "CNOT" and not cmap.allows(placement[g.qubits[0]], placement[g.qubits[1]]):
            return False
    return True
