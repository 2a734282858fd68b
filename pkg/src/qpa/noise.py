"""Calibration data, analytic error budgets and Monte Carlo noisy execution.

Noise model used by :func:`noisy_run`, per shot:

* every gate fails independently with its calibrated error probability
  (``e_g`` of the physical qubit for one-qubit gates, ``e_cx`` of the directed
  physical edge for CNOT); a failed gate is followed by a uniformly random
  Pauli string on its support (complete depolarization);
* each measured qubit that reads 1 relaxes to 0 with ``p_relax`` (default 0);
* each measured bit is then flipped with the readout error ``e_r``.

T1, T2 and the qubit frequency are carried as data only.

Random draws per sample, from ``Generator(PCG64(derive_seed(seed, i)))`` in
this order: ``random(shots)`` for the outcome, ``random((shots, gates))`` for
gate failures, ``integers(0, 64, (shots, gates))`` for Pauli strings,
``random((shots, measured))`` for relaxation and the same again for readout.
The first draw is exactly what :func:`qpa.simulator.sample` consumes, so a
noiseless calibration reproduces ideal sampling shot for shot.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .builders import QpaScheme
from .core import Circuit, Gate, PermutationSpec, QubitLabeling
from .kernels import Program, run_trajectories
from .simulator import (
    ShotCounts,
    derive_seed,
    generator,
    inverse_cdf,
    marginal_probabilities,
    measure_qubits,
    run_circuit,
    sample,
    _avoid_zero,
)

DEFAULT_SHOTS = 8192
DEFAULT_SAMPLES = 5
NATIVE_ONE_QUBIT = ("X", "Z", "H", "S", "T", "U1")


class MissingCalibration(KeyError):
    pass


class WeightMismatch(ValueError):
    pass


@dataclass(frozen=True)
class QubitCalibration:
    f: float  # GHz
    T1: float  # us
    T2: float  # us
    e_g: float
    e_r: float
    p_relax: float = 0.0

    def __post_init__(self) -> None:
        for name in ("e_g", "e_r", "p_relax"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError(f"{name}={v} is not a probability")
        if self.T1 <= 0 or self.T2 <= 0:
            raise ValueError("T1 and T2 must be positive")


@dataclass(frozen=True)
class CalibrationConfig:
    qubits: dict[int, QubitCalibration]
    edges: dict[tuple[int, int], float]
    name: str = "custom"
    note: str = ""

    def __post_init__(self) -> None:
        for edge, e in self.edges.items():
            if not 0 <= e <= 1:
                raise ValueError(f"CNOT error {e} on {edge} is not a probability")

    def qubit(self, q: int) -> QubitCalibration:
        try:
            return self.qubits[q]
        except KeyError:
            raise MissingCalibration(f"no calibration for physical qubit {q} in {self.name}") from None

    def cnot_error(self, control: int, target: int) -> float:
        try:
            return self.edges[(control, target)]
        except KeyError:
            raise MissingCalibration(f"no CNOT calibration for edge {control}->{target} in {self.name}") from None

    @classmethod
    def zero(cls, qubits: Iterable[int], edges: Iterable[tuple[int, int]] = ()) -> "CalibrationConfig":
        """Error-free calibration over the given qubits and edges."""
        q = {i: QubitCalibration(5.0, 50.0, 50.0, 0.0, 0.0) for i in qubits}
        return cls(q, {tuple(e): 0.0 for e in edges}, name="noiseless")

    def to_dict(self) -> dict:
        qubits = []
        for i, c in sorted(self.qubits.items()):
            entry = {"id": i, "f": c.f, "T1": c.T1, "T2": c.T2, "e_g": c.e_g, "e_r": c.e_r}
            if c.p_relax:
                entry["p_relax"] = c.p_relax
            qubits.append(entry)
        edges = [{"control": c, "target": t, "e_cx": e} for (c, t), e in sorted(self.edges.items())]
        out = {"name": self.name}
        if self.note:
            out["note"] = self.note
        out.update(qubits=qubits, edges=edges)
        return out

    @classmethod
    def from_dict(cls, data: dict, name: str | None = None) -> "CalibrationConfig":
        qubits = {
            int(q["id"]): QubitCalibration(
                float(q["f"]), float(q["T1"]), float(q["T2"]), float(q["e_g"]), float(q["e_r"]),
                float(q.get("p_relax", 0.0)),
            )
            for q in data["qubits"]
        }
        edges = {(int(e["control"]), int(e["target"])): float(e["e_cx"]) for e in data["edges"]}
        return cls(qubits, edges, name=data.get("name", name or "custom"), note=data.get("note", ""))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


PRESETS = ("ibmqx2", "ibmqx4", "ibmqx_fit")


def load_calibration(name_or_path: str | Path) -> CalibrationConfig:
    """Load a preset (``ibmqx2``, ``ibmqx4``, ``ibmqx_fit``, optionally with ``.json``) or a file."""
    key = str(name_or_path)
    stem = key[:-5] if key.endswith(".json") else key
    path = Path(key)
    if path.exists():
        return CalibrationConfig.from_dict(json.loads(path.read_text(encoding="utf-8")), name=path.stem)
    if stem in PRESETS:
        text = resources.files("qpa").joinpath("data", f"{stem}.json").read_text(encoding="utf-8")
        return CalibrationConfig.from_dict(json.loads(text), name=stem)
    raise FileNotFoundError(f"no calibration file or preset named {key!r}")


@dataclass(frozen=True)
class NoisySimConfig:
    calibration: CalibrationConfig
    placement: QubitLabeling
    shots: int = DEFAULT_SHOTS
    samples: int = DEFAULT_SAMPLES
    seed: int = 0

    def __post_init__(self) -> None:
        if self.shots < 1 or self.samples < 1:
            raise ValueError("shots and samples must be >= 1")

    def physical(self, q: int) -> int:
        try:
            return self.placement[q]
        except KeyError:
            raise MissingCalibration(f"logical qubit {q} has no placement") from None

    def with_seed(self, seed: int) -> "NoisySimConfig":
        return replace(self, seed=seed)


def gate_error(g: Gate, cfg: NoisySimConfig) -> float:
    if g.kind in NATIVE_ONE_QUBIT:
        return cfg.calibration.qubit(cfg.physical(g.qubits[0])).e_g
    if g.kind == "CNOT":
        return cfg.calibration.cnot_error(cfg.physical(g.qubits[0]), cfg.physical(g.qubits[1]))
    raise ValueError(f"{g.kind} is not native; transpile the circuit first")


def circuit_error_estimate(c: Circuit, cfg: NoisySimConfig, measured_qubits: Iterable[int] = ()) -> float:
    """``1 - prod(1 - e_gate) * prod(1 - e_r)`` over gates and measured qubits."""
    survive = 1.0
    for g in c.gates:
        survive *= 1 - gate_error(g, cfg)
    for q in measured_qubits:
        survive *= 1 - cfg.calibration.qubit(cfg.physical(q)).e_r
    return 1 - survive


def readout_survival(cfg: NoisySimConfig, measured_qubits: Iterable[int]) -> float:
    out = 1.0
    for q in measured_qubits:
        out *= 1 - cfg.calibration.qubit(cfg.physical(q)).e_r
    return out


# ---------------------------------------------------------------------------
# Monte Carlo


def _bits(idx: np.ndarray, m: int) -> np.ndarray:
    """Outcome indices -> (shots, m) bits, first measured qubit most significant."""
    shifts = np.arange(m - 1, -1, -1)
    return (idx[:, None] >> shifts) & 1


def noisy_run(pipeline: Circuit, cfg: NoisySimConfig, measured_qubits: Sequence[int], backend: str | None = None) -> list[ShotCounts]:
    """One :class:`ShotCounts` per sample over the measured qubits (listed order, first most significant)."""
    measured = list(measured_qubits)
    mcount = len(measured)
    n = pipeline.num_qubits
    gate_p = np.array([gate_error(g, cfg) for g in pipeline.gates], dtype=float)
    readout = np.array([cfg.calibration.qubit(cfg.physical(q)).e_r for q in measured])
    relax = np.array([cfg.calibration.qubit(cfg.physical(q)).p_relax for q in measured])

    ideal = measure_qubits(run_circuit(pipeline), measured).as_array()
    program = Program(pipeline)
    shots = cfg.shots
    results = []
    for i in range(cfg.samples):
        rng = generator(derive_seed(cfg.seed, i))
        u = rng.random(shots)
        fail = rng.random((shots, len(gate_p))) < gate_p
        pauli = rng.integers(0, 64, size=(shots, len(gate_p)))
        u_relax = rng.random((shots, mcount))
        u_read = rng.random((shots, mcount))

        idx = _avoid_zero(inverse_cdf(ideal, u), ideal)
        noisy_rows = np.flatnonzero(fail.any(axis=1))
        if noisy_rows.size:
            states = run_trajectories(program, fail[noisy_rows], pauli[noisy_rows], backend)
            probs = marginal_probabilities(np.abs(states) ** 2, measured, n)
            idx[noisy_rows] = inverse_cdf(probs, u[noisy_rows])

        bits = _bits(idx, mcount)
        bits[(bits == 1) & (u_relax < relax)] = 0
        bits ^= (u_read < readout).astype(bits.dtype)
        weights = 1 << np.arange(mcount - 1, -1, -1)
        outcome = bits @ weights
        results.append(ShotCounts(tuple(np.bincount(outcome, minlength=1 << mcount))))
    return results


def ideal_run(pipeline: Circuit, measured_qubits: Sequence[int], shots: int = DEFAULT_SHOTS, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> list[ShotCounts]:
    """Noiseless counterpart of :func:`noisy_run` with identical seeding."""
    dist = measure_qubits(run_circuit(pipeline), list(measured_qubits))
    return [sample(dist, shots, derive_seed(seed, i)) for i in range(samples)]


# ---------------------------------------------------------------------------
# statistics


def success_probability(counts: ShotCounts, spec: PermutationSpec, scheme: QpaScheme) -> float:
    """Fraction of shots on the outcome that reveals the right parity."""
    expected_dim = 2 if scheme.variant == "optimized" else scheme.d
    if counts.dim != expected_dim:
        raise ValueError(f"{scheme.variant} counts need dim {expected_dim}, got {counts.dim}")
    return counts[scheme.expected_outcome(spec)] / counts.shots


def mean_success(samples: Sequence[ShotCounts], spec: PermutationSpec, scheme: QpaScheme) -> float:
    return float(np.mean([success_probability(c, spec, scheme) for c in samples]))


@dataclass(frozen=True)
class AverageSuccess:
    mean: float
    margin: float
    N: int
    d: int
    threshold: float  # smallest N for which the normal approximation is trusted
    valid: bool


def average_success(values: Sequence[float], weights: Sequence[float] | None = None, N: int = 100_000) -> AverageSuccess:
    """Ensemble success ``sum p S`` and its standard-error margin.

    ``values`` holds one success probability per operator, 2d of them.  For
    uniform weights the margin is ``sum sqrt(S - S**2) / sqrt(N d)``; general
    weights use ``2 sqrt(d / N) sum p sqrt(S - S**2)``, which reduces to it.
    ``valid`` checks ``N > 9 d C / (1 - C)`` with ``C = max(S)``.
    """
    s = np.asarray(values, dtype=float)
    if s.size == 0 or s.size % 2:
        raise WeightMismatch("need one value per operator: an even, nonzero count")
    if np.any((s < 0) | (s > 1)):
        raise ValueError("success probabilities must lie in [0, 1]")
    p = np.full(s.size, 1 / s.size) if weights is None else np.asarray(weights, dtype=float)
    if p.shape != s.shape:
        raise WeightMismatch(f"{p.size} weights for {s.size} values")
    if np.any(p < 0) or abs(p.sum() - 1) > 1e-9:
        raise WeightMismatch("weights must be a probability distribution")
    d = s.size // 2
    mean = float(p @ s)
    margin = float(2 * math.sqrt(d / N) * (p @ np.sqrt(np.clip(s - s * s, 0, None))))
    c = float(s.max())
    threshold = math.inf if c >= 1 else 9 * d * c / (1 - c)
    return AverageSuccess(mean, margin, N, d, threshold, N > threshold)
