"""Experiment suites: every permutation for one scheme and register width."""
from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .builders import QpaScheme, build_pipeline, permutation_circuit
from .core import PLACEMENTS, Circuit, PermutationSpec, QubitLabeling
from .noise import (
    DEFAULT_SAMPLES,
    DEFAULT_SHOTS,
    CalibrationConfig,
    NoisySimConfig,
    average_success,
    circuit_error_estimate,
    ideal_run,
    mean_success,
    noisy_run,
    readout_survival,
)
from .simulator import derive_seed, measure_qubits, run_circuit
from .transpiler import CouplingMap, coupling_map, decompose_inverse_qft_2q, transpile

DEFAULT_ENSEMBLE = 100_000


@dataclass(frozen=True)
class ExperimentSetup:
    scheme: QpaScheme
    cmap: CouplingMap
    placement: QubitLabeling
    calibration: CalibrationConfig | None  # None runs the ideal simulation
    shots: int = DEFAULT_SHOTS
    samples: int = DEFAULT_SAMPLES
    seed: int = 0
    ensemble: int = DEFAULT_ENSEMBLE

    @property
    def absorb(self) -> str:
        # original scheme: the inverse QFT's SWAP is absorbed by flipping everything before it
        return "input" if self.scheme.variant == "original" else "output"


def default_setup(
    variant: str,
    n: int,
    calibration: CalibrationConfig | None,
    map_name: str | None = None,
    placement: QubitLabeling | None = None,
    **kwargs,
) -> ExperimentSetup:
    preset_map, preset_place = PLACEMENTS.get((variant, n), ("ibmqx4", QubitLabeling.identity(n)))
    cmap = coupling_map(map_name or preset_map)
    return ExperimentSetup(QpaScheme(variant, n), cmap, placement or preset_place, calibration, **kwargs)


def spec_seed(seed: int, spec: PermutationSpec) -> int:
    """Independent stream per spec so the 2d pipelines do not share noise draws."""
    return derive_seed(seed, PermutationSpec.all_for(spec.d).index(spec))


def run_spec(setup: ExperimentSetup, spec: PermutationSpec, backend: str | None = None) -> dict:
    scheme = setup.scheme
    seed = spec_seed(setup.seed, spec)
    logical = build_pipeline(scheme, spec)
    native, report = transpile(logical, setup.cmap, setup.placement, absorb=setup.absorb)
    measured = [report.output_relabeling[q] for q in scheme.measured_qubits()]
    ideal = measure_qubits(run_circuit(native), measured)
    if setup.calibration is None:
        counts = ideal_run(native, measured, setup.shots, setup.samples, seed)
    else:
        cfg = NoisySimConfig(setup.calibration, setup.placement, setup.shots, setup.samples, seed)
        counts = noisy_run(native, cfg, measured, backend=backend)
    per_sample = [c[scheme.expected_outcome(spec)] / c.shots for c in counts]
    return {
        "m": spec.m,
        "parity": spec.sign,
        "logical_counts": logical.count(),
        "native_counts": native.count(),
        "measured_wires": measured,
        "ideal": list(ideal.probabilities),
        "samples": [list(c.counts) for c in counts],
        "success_per_sample": per_sample,
        "success": mean_success(counts, spec, scheme),
        "transpile": report.to_dict(),
    }


def run_experiment(setup: ExperimentSetup, backend: str | None = None, jobs: int = 1) -> dict:
    scheme = setup.scheme
    specs = PermutationSpec.all_for(scheme.d)
    if jobs > 1:
        # each spec has its own seeds, so the rows do not depend on scheduling
        with ThreadPoolExecutor(jobs) as pool:
            rows = list(pool.map(lambda s: run_spec(setup, s, backend), specs))
    else:
        rows = [run_spec(setup, spec, backend) for spec in specs]
    stats = average_success([r["success"] for r in rows], N=setup.ensemble)
    return {
        "scheme": scheme.variant,
        "n": scheme.n,
        "d": scheme.d,
        "coupling_map": setup.cmap.name,
        "placement": setup.placement.as_dict(),
        "ideal": setup.calibration is None,
        "calibration_id": setup.calibration.name if setup.calibration else None,
        "calibration": setup.calibration.to_dict() if setup.calibration else None,
        "shots": setup.shots,
        "samples": setup.samples,
        "seed": setup.seed,
        "ensemble_size": setup.ensemble,
        "average_success": stats.mean,
        "margin": stats.margin,
        "normal_approximation_threshold": stats.threshold,
        "normal_approximation_ok": stats.valid,
        "specs": rows,
    }


CSV_COLUMNS = ("scheme", "n", "m", "parity", "sample", "outcome", "count", "frequency", "ideal_probability")


def distributions_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in report["specs"]:
        for s, counts in enumerate(row["samples"]):
            total = sum(counts)
            for outcome, count in enumerate(counts):
                w.writerow(
                    (report["scheme"], report["n"], row["m"], row["parity"], s, outcome, count,
                     repr(count / total), repr(row["ideal"][outcome]))
                )
    return buf.getvalue()


def error_budget(calibration: CalibrationConfig) -> dict[str, float]:
    """Product-of-survivals error estimates on the preset hardware placements.

    ``fdag``: the lowered 2-qubit inverse QFT on the original scheme's qubits.
    ``total``: the extra error of the original 2-qubit pipeline over the
    optimized one, i.e. the inverse QFT plus the readout of the different
    measured qubits.
    ``toffoli``: the lowered Toffoli of the 3-qubit permutations.
    """
    orig = default_setup("original", 2, calibration)
    opt = default_setup("optimized", 2, calibration)
    opt3 = default_setup("optimized", 3, calibration)

    def cfg(setup: ExperimentSetup) -> NoisySimConfig:
        return NoisySimConfig(calibration, setup.placement)

    fdag, _ = transpile(decompose_inverse_qft_2q(), orig.cmap, orig.placement, absorb=orig.absorb)
    e_fdag = circuit_error_estimate(fdag, cfg(orig))
    ratio = readout_survival(cfg(orig), orig.scheme.measured_qubits()) / readout_survival(
        cfg(opt), opt.scheme.measured_qubits()
    )
    total = 1 - (1 - e_fdag) * ratio

    spec = next(s for s in PermutationSpec.all_for(8) if permutation_circuit(3, s).count().get("TOFFOLI"))
    toffoli = Circuit(3, [g for g in permutation_circuit(3, spec).gates if g.kind == "TOFFOLI"][:1])
    lowered, _ = transpile(toffoli, opt3.cmap, opt3.placement)
    return {"fdag": e_fdag, "total": total, "toffoli": circuit_error_estimate(lowered, cfg(opt3))}
