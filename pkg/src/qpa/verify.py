"""Dense equivalence checks of every builder and pass against the reference model."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .builders import (
    QpaScheme,
    build_pipeline,
    generic_permutation_gates,
    inverse_qft_circuit,
    optimized_prep_circuit,
    permutation_circuit,
    qft_circuit,
)
from .core import CNOT, SWAP, TOFFOLI, Circuit, PermutationSpec, equal_up_to_global_phase, gate_matrix
from .reference import dft_matrix, permutation_matrix, reference_qpa
from .simulator import measure_qubits, permutation_unitary, run_circuit, unitary_of
from .transpiler import decompose_inverse_qft_2q, decompose_toffoli, eliminate_swaps, reverse_cnot

ATOL = 1e-9


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


def diff_entries(actual: np.ndarray, expected: np.ndarray, limit: int = 4) -> str:
    bad = np.argwhere(~np.isclose(actual, expected, atol=ATOL, rtol=0))
    parts = [
        f"[{i},{j}] got {np.round(actual[i, j], 6)} expected {np.round(expected[i, j], 6)}"
        for i, j in bad[:limit]
    ]
    more = f" (+{len(bad) - limit} more)" if len(bad) > limit else ""
    return "; ".join(parts) + more


def check_permutation(c: Circuit, spec: PermutationSpec) -> CheckResult:
    name = f"permutation n={c.num_qubits} {spec}"
    if spec.d != 1 << c.num_qubits:
        return CheckResult(name, False, f"circuit width {c.num_qubits} does not match d={spec.d}")
    u = unitary_of(c)
    expected = permutation_matrix(spec)
    if np.allclose(u, expected, atol=ATOL, rtol=0):
        return CheckResult(name, True)
    return CheckResult(name, False, diff_entries(u, expected))


def _permutations(n_max: int) -> Iterator[CheckResult]:
    for n in range(2, n_max + 1):
        for spec in PermutationSpec.all_for(1 << n):
            yield check_permutation(permutation_circuit(n, spec), spec)
    n = n_max + 1
    for spec in PermutationSpec.all_for(1 << n):
        res = check_permutation(Circuit(n, generic_permutation_gates(n, spec)), spec)
        res.name = "generic " + res.name
        yield res


def _reference() -> Iterator[CheckResult]:
    for d in range(2, 17):
        for spec in PermutationSpec.all_for(d):
            k, _ = reference_qpa(spec)
            want = 1 if spec.positive else d - 1
            yield CheckResult(f"reference {spec}", k == want, f"outcome {k}, expected {want}")


def _fourier(n_max: int) -> Iterator[CheckResult]:
    for n in range(1, n_max + 1):
        f = dft_matrix(1 << n)
        u = unitary_of(qft_circuit(n))
        yield CheckResult(f"qft n={n}", equal_up_to_global_phase(u, f), diff_entries(u, f))
        u = unitary_of(inverse_qft_circuit(n))
        yield CheckResult(f"inverse qft n={n}", equal_up_to_global_phase(u, f.conj().T), diff_entries(u, f.conj().T))
        psi = run_circuit(optimized_prep_circuit(n))
        yield CheckResult(f"optimized prep n={n}", bool(np.allclose(psi, f[:, 1], atol=ATOL)), "state differs from F|1>")


def _pipelines(n_max: int) -> Iterator[CheckResult]:
    for n in range(2, n_max + 1):
        for variant in ("original", "optimized"):
            scheme = QpaScheme(variant, n)
            for spec in PermutationSpec.all_for(1 << n):
                dist = measure_qubits(run_circuit(build_pipeline(scheme, spec)), scheme.measured_qubits())
                p = dist[scheme.expected_outcome(spec)]
                yield CheckResult(f"{variant} pipeline n={n} {spec}", abs(p - 1) < ATOL, f"success {p!r}")


def _passes() -> Iterator[CheckResult]:
    toff = Circuit(3, [TOFFOLI(0, 1, 2)])
    yield CheckResult(
        "toffoli decomposition",
        equal_up_to_global_phase(unitary_of(decompose_toffoli(TOFFOLI(0, 1, 2))), unitary_of(toff)),
    )
    fdag = Circuit(2, [SWAP(0, 1)]) + decompose_inverse_qft_2q()
    yield CheckResult("2-qubit inverse QFT lowering", equal_up_to_global_phase(unitary_of(fdag), dft_matrix(4).conj().T))
    yield CheckResult(
        "cnot reversal", bool(np.allclose(unitary_of(reverse_cnot(CNOT(0, 1))), gate_matrix(CNOT(0, 1)), atol=ATOL))
    )
    out, lab = eliminate_swaps(qft_circuit(2))
    u = permutation_unitary(lab.mapping, 2).conj().T @ unitary_of(out)
    yield CheckResult("swap elimination on qft n=2", equal_up_to_global_phase(u, dft_matrix(4)))


def run_checks(n_max: int = 3) -> Iterator[CheckResult]:
    suites: list[Callable[[], Iterator[CheckResult]]] = [
        _reference,
        lambda: _permutations(n_max),
        lambda: _fourier(5),
        lambda: _pipelines(n_max),
        _passes,
    ]
    for suite in suites:
        yield from suite()
