import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracle
from qpa.builders import QpaScheme, build_pipeline, inverse_qft_circuit, qft_circuit
from qpa.core import CNOT, CPHASE, SWAP, TOFFOLI, Circuit, PermutationSpec, QubitLabeling
from qpa.transpiler import (
    COUPLING_MAPS, CouplingMap, UnroutableCircuit, coupling_map, decompose_cphase,
    decompose_inverse_qft_2q, decompose_toffoli, eliminate_swaps, is_native, reverse_cnot, transpile,
)
from strategies import circuits

# one direction per pair, so roughly half of all CNOTs need reversing
TRIANGULAR = CouplingMap(4, frozenset((i, j) for i in range(4) for j in range(i + 1, 4)), "triangular")


def declared_equivalent(c, out, report, absorb):
    n = c.num_qubits
    u_in, u_out = oracle.unitary(c), oracle.unitary(out)
    if absorb == "output":
        pi = [report.output_relabeling[i] for i in range(n)]
        return oracle.same_up_to_phase(u_out, oracle.wire_permutation(pi, n) @ u_in)
    pi = [report.input_relabeling[i] for i in range(n)]
    return oracle.same_up_to_phase(u_out, u_in @ oracle.wire_permutation(pi, n).T)


@settings(max_examples=100)
@given(circuits(max_n=4, max_gates=10), st.sampled_from(["output", "input"]), st.data())
def test_transpile_preserves_unitary(c, absorb, data):
    placement = QubitLabeling(dict(enumerate(data.draw(st.permutations(range(4)))[: c.num_qubits])))
    out, report = transpile(c, TRIANGULAR, placement, absorb=absorb)
    assert is_native(out, TRIANGULAR, placement)
    assert declared_equivalent(c, out, report, absorb)


@given(circuits(max_n=4, max_gates=10), st.sampled_from(["output", "input"]))
def test_swap_elimination_formula(c, absorb):
    out, lab = eliminate_swaps(c, absorb)
    assert "SWAP" not in out.count()
    pi = [lab[i] for i in range(c.num_qubits)]
    p = oracle.wire_permutation(pi, c.num_qubits)
    u_in, u_out = oracle.unitary(c), oracle.unitary(out)
    if absorb == "output":
        np.testing.assert_allclose(u_out, p @ u_in, atol=1e-9)
    else:
        np.testing.assert_allclose(u_out, u_in @ p.T, atol=1e-9)


def test_toffoli_lowering_counts_and_unitary():
    lowered = decompose_toffoli(TOFFOLI(0, 1, 2))
    arity = lowered.count_by_arity()
    assert (lowered.count()["CNOT"], arity[1]) == (6, 9)
    assert set(lowered.count()) <= {"CNOT", "H", "T", "U1"}
    assert oracle.same_up_to_phase(oracle.unitary(lowered), oracle.unitary(Circuit(3, [TOFFOLI(0, 1, 2)])))


def test_inverse_qft_lowering():
    c = decompose_inverse_qft_2q()
    assert c.count()["CNOT"] == 2 and c.count_by_arity()[1] == 5
    full = Circuit(2, [SWAP(0, 1)]) + c
    assert oracle.same_up_to_phase(oracle.unitary(full), oracle.dft(4).conj().T)
    assert oracle.same_up_to_phase(oracle.unitary(full), oracle.unitary(inverse_qft_circuit(2)))


@pytest.mark.parametrize("lam", [math.pi / 2, -math.pi / 4, 1.234])
def test_cphase_lowering(lam):
    c = decompose_cphase(CPHASE(lam, 0, 1))
    assert c.count()["CNOT"] == 2
    assert oracle.same_up_to_phase(oracle.unitary(c), oracle.unitary(Circuit(2, [CPHASE(lam, 0, 1)])))
    # symmetric: the lowering with swapped roles is the same operator
    c2 = decompose_cphase(CPHASE(lam, 1, 0))
    np.testing.assert_allclose(oracle.unitary(c2), oracle.unitary(c), atol=1e-12)


def test_reverse_cnot():
    np.testing.assert_allclose(oracle.unitary(reverse_cnot(CNOT(0, 1))), oracle.unitary(Circuit(2, [CNOT(0, 1)])), atol=1e-12)
    assert reverse_cnot(CNOT(0, 1)).count() == {"H": 4, "CNOT": 1}


def test_direction_fix_on_ibmqx4():
    out, report = transpile(Circuit(2, [CNOT(1, 0)]), COUPLING_MAPS["ibmqx4"], QubitLabeling({0: 3, 1: 2}))
    assert out.count() == {"H": 4, "CNOT": 1}
    assert report.pass_deltas["direction"] == {"H": 4}
    out, _ = transpile(Circuit(2, [CNOT(0, 1)]), COUPLING_MAPS["ibmqx4"], QubitLabeling({0: 3, 1: 2}))
    assert out.count() == {"CNOT": 1}


def test_unroutable():
    with pytest.raises(UnroutableCircuit):
        transpile(Circuit(2, [CNOT(0, 1)]), COUPLING_MAPS["ibmqx4"], QubitLabeling({0: 0, 1: 3}))
    # 0, 1, 4: no edge between 0 and 4
    with pytest.raises(UnroutableCircuit):
        transpile(Circuit(3, [TOFFOLI(0, 1, 2)]), COUPLING_MAPS["ibmqx4"], QubitLabeling({0: 0, 1: 1, 2: 4}))
    with pytest.raises(UnroutableCircuit):
        transpile(Circuit(2, [CNOT(0, 1)]), COUPLING_MAPS["ibmqx4"], QubitLabeling({0: 0}))
    with pytest.raises(UnroutableCircuit):
        transpile(Circuit(2, [CNOT(0, 1)]), COUPLING_MAPS["ibmqx4"], QubitLabeling({0: 0, 1: 7}))


def test_report_accounting():
    c = build_pipeline(QpaScheme("original", 2), PermutationSpec(4, 3, -1))
    out, report = transpile(c, COUPLING_MAPS["ibmqx4"], QubitLabeling({0: 3, 1: 2}), absorb="input")
    for kind in set(report.input_counts) | set(report.output_counts):
        moved = sum(d.get(kind, 0) for d in report.pass_deltas.values())
        assert report.input_counts.get(kind, 0) + moved == report.output_counts.get(kind, 0)
    assert report.total_delta() == len(out) - len(c)
    assert json.loads(json.dumps(report.to_dict()))["placement"] == {"q0": 3, "q1": 2}


def test_original_two_qubit_fits_ibmqx4_without_reversals():
    """With input-side SWAP absorption the inverse QFT lands on the 3->2 edge directly."""
    place = QubitLabeling({0: 3, 1: 2})
    for spec in PermutationSpec.all_for(4):
        c = build_pipeline(QpaScheme("original", 2), spec)
        out, report = transpile(c, COUPLING_MAPS["ibmqx4"], place, absorb="input")
        assert report.pass_deltas["direction"] == {}
        assert report.output_relabeling.is_identity()
        assert declared_equivalent(c, out, report, "input")


@pytest.mark.parametrize("n", [2, 3])
def test_optimized_pipelines_are_native(n):
    from qpa.core import PLACEMENTS

    name, place = PLACEMENTS[("optimized", n)]
    for spec in PermutationSpec.all_for(1 << n):
        c = build_pipeline(QpaScheme("optimized", n), spec)
        out, report = transpile(c, COUPLING_MAPS[name], place)
        assert is_native(out, COUPLING_MAPS[name], place)
        assert declared_equivalent(c, out, report, "output")


def test_qft_swaps_become_relabeling():
    out, report = transpile(qft_circuit(3), CouplingMap(3, frozenset({(0, 1), (1, 2), (0, 2)})))
    assert "SWAP" not in out.count()
    assert report.output_relabeling.mapping == {0: 2, 1: 1, 2: 0}


def test_coupling_map_io(tmp_path):
    path = tmp_path / "line.json"
    path.write_text(json.dumps({"num_qubits": 3, "edges": [[0, 1], [1, 2]]}))
    cm = coupling_map(str(path))
    assert cm.allows(0, 1) and not cm.allows(1, 0) and cm.connected(1, 0)
    assert CouplingMap.from_dict(cm.to_dict()).edges == cm.edges
    with pytest.raises(ValueError):
        coupling_map("no-such-map")
    with pytest.raises(ValueError):
        CouplingMap(2, frozenset({(0, 0)}))


def test_preset_maps():
    assert COUPLING_MAPS["ibmqx4"].edges == {(1, 0), (2, 0), (2, 1), (2, 4), (3, 2), (3, 4)}
    assert COUPLING_MAPS["ibmqx2"].edges == {(0, 1), (0, 2), (1, 2), (3, 2), (3, 4), (4, 2)}
