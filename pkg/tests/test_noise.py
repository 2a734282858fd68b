import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpa import kernels
from qpa.builders import QpaScheme, build_pipeline
from qpa.core import CNOT, Circuit, PermutationSpec, QubitLabeling
from qpa.experiment import default_setup
from qpa.noise import (
    PRESETS, CalibrationConfig, MissingCalibration, NoisySimConfig, QubitCalibration, WeightMismatch,
    average_success, circuit_error_estimate, gate_error, ideal_run, load_calibration, mean_success,
    noisy_run, success_probability,
)
from qpa.simulator import ShotCounts
from qpa.transpiler import transpile

import oracle

FIT = load_calibration("ibmqx_fit")


def native_pipeline(variant, n, spec, calibration=FIT):
    setup = default_setup(variant, n, calibration)
    out, report = transpile(build_pipeline(setup.scheme, spec), setup.cmap, setup.placement, absorb=setup.absorb)
    measured = [report.output_relabeling[q] for q in setup.scheme.measured_qubits()]
    return setup, out, measured


def flat_calibration(e_g=0.0, e_cx=0.0, e_r=0.0, p_relax=0.0):
    q = {i: QubitCalibration(5.0, 50.0, 50.0, e_g, e_r, p_relax) for i in range(5)}
    edges = {(c, t): e_cx for c in range(5) for t in range(5) if c != t}
    return CalibrationConfig(q, edges, name="flat")


# ---------------------------------------------------------------------------
# calibration files


@pytest.mark.parametrize("name", PRESETS)
def test_presets_load_and_round_trip(name, tmp_path):
    cal = load_calibration(name)
    assert load_calibration(name + ".json") == cal
    path = tmp_path / "cal.json"
    path.write_text(cal.dumps())
    again = load_calibration(path)
    assert again.qubits == cal.qubits and again.edges == cal.edges


def test_fit_ratio_cnot_to_single_qubit():
    e_g = np.mean([q.e_g for q in FIT.qubits.values()])
    e_cx = np.mean(list(FIT.edges.values()))
    assert 5 < e_cx / e_g < 20


def test_missing_calibration():
    cfg = NoisySimConfig(load_calibration("ibmqx4"), QubitLabeling({0: 3, 1: 2}))
    with pytest.raises(MissingCalibration):
        gate_error(CNOT(1, 0), cfg)  # 2 -> 3 is not an ibmqx4 edge
    with pytest.raises(MissingCalibration):
        NoisySimConfig(FIT, QubitLabeling({0: 1})).physical(1)
    with pytest.raises(FileNotFoundError):
        load_calibration("ibmqx9")


def test_calibration_validation():
    with pytest.raises(ValueError):
        QubitCalibration(5.0, 50.0, 50.0, 1.5, 0.0)
    with pytest.raises(ValueError):
        QubitCalibration(5.0, 0.0, 50.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        CalibrationConfig({}, {(0, 1): -0.1})


# ---------------------------------------------------------------------------
# error budget


def test_error_estimate_examples():
    cfg = NoisySimConfig(FIT, QubitLabeling({0: 3, 1: 2}))
    assert circuit_error_estimate(Circuit(2, []), cfg) == 0
    one = circuit_error_estimate(Circuit(2, [CNOT(0, 1)]), cfg)
    assert one == pytest.approx(FIT.edges[(3, 2)])
    both = circuit_error_estimate(Circuit(2, [CNOT(0, 1)]), cfg, measured_qubits=[0])
    assert both == pytest.approx(1 - (1 - FIT.edges[(3, 2)]) * (1 - FIT.qubits[3].e_r))


@given(st.lists(st.sampled_from(["H0", "H1", "X0", "C"]), max_size=15), st.randoms())
def test_error_estimate_monotone_and_order_free(names, rnd):
    from qpa.core import H, X

    table = {"H0": H(0), "H1": H(1), "X0": X(0), "C": CNOT(0, 1)}
    cfg = NoisySimConfig(FIT, QubitLabeling({0: 3, 1: 2}))
    gates = [table[n] for n in names]
    base = circuit_error_estimate(Circuit(2, gates), cfg)
    more = circuit_error_estimate(Circuit(2, gates + [CNOT(0, 1)]), cfg)
    assert more >= base
    shuffled = list(gates)
    rnd.shuffle(shuffled)
    assert circuit_error_estimate(Circuit(2, shuffled), cfg) == pytest.approx(base, abs=1e-15)


def test_non_native_gate_rejected():
    from qpa.core import TOFFOLI

    with pytest.raises(ValueError):
        gate_error(TOFFOLI(0, 1, 2), NoisySimConfig(FIT, QubitLabeling.identity(3)))


# ---------------------------------------------------------------------------
# Monte Carlo


@pytest.mark.parametrize("variant,n", [("optimized", 2), ("original", 2), ("optimized", 3)])
def test_zero_error_equals_ideal_sampling(variant, n):
    zero = flat_calibration()
    spec = PermutationSpec(1 << n, 1, -1)
    setup, out, measured = native_pipeline(variant, n, spec, zero)
    cfg = NoisySimConfig(zero, setup.placement, shots=4096, samples=3, seed=11)
    assert noisy_run(out, cfg, measured) == ideal_run(out, measured, 4096, 3, 11)


def test_zero_error_nondeterministic_state_matches_ideal():
    from qpa.core import H

    c = Circuit(2, [H(0), CNOT(0, 1), H(1)])
    cfg = NoisySimConfig(flat_calibration(), QubitLabeling({0: 0, 1: 1}), shots=2000, samples=2, seed=3)
    assert noisy_run(c, cfg, [0, 1]) == ideal_run(c, [0, 1], 2000, 2, 3)


@pytest.mark.skipif(kernels.evolve_compiled is None, reason="compiled kernel not built")
@pytest.mark.parametrize("variant,n", [("optimized", 2), ("original", 2), ("optimized", 3)])
def test_backends_give_identical_counts(variant, n):
    setup, out, measured = native_pipeline(variant, n, PermutationSpec(1 << n, 3, 1))
    cfg = NoisySimConfig(FIT, setup.placement, shots=4096, samples=2, seed=5)
    assert noisy_run(out, cfg, measured, backend="python") == noisy_run(out, cfg, measured, backend="cython")


def test_same_seed_same_counts():
    setup, out, measured = native_pipeline("optimized", 3, PermutationSpec(8, 7, 1))
    cfg = NoisySimConfig(FIT, setup.placement, seed=42)
    a, b = noisy_run(out, cfg, measured), noisy_run(out, cfg, measured)
    assert a == b and len(a) == 5 and all(c.shots == 8192 for c in a)
    assert noisy_run(out, cfg.with_seed(43), measured) != a


def test_readout_only_success_is_binomial():
    cal = flat_calibration(e_r=0.1)
    setup, out, measured = native_pipeline("optimized", 2, PermutationSpec(4, 2, -1), cal)
    counts = noisy_run(out, NoisySimConfig(cal, setup.placement, shots=20000, samples=1, seed=1), measured)[0]
    s = success_probability(counts, PermutationSpec(4, 2, -1), setup.scheme)
    assert abs(s - 0.9) < 4 * math.sqrt(0.09 / 20000)


def test_relaxation_hits_positive_parity_only():
    cal = flat_calibration(p_relax=0.2)
    for parity, want in ((1, 0.8), (-1, 1.0)):
        spec = PermutationSpec(4, 1, parity)
        setup, out, measured = native_pipeline("optimized", 2, spec, cal)
        counts = noisy_run(out, NoisySimConfig(cal, setup.placement, shots=20000, samples=1, seed=2), measured)
        s = mean_success(counts, spec, setup.scheme)
        assert abs(s - want) < 4 * math.sqrt(want * (1 - want) / 20000) + 1e-12


def test_appending_gates_lowers_success():
    """Paired comparison: same seeds, ten extra identity CNOT pairs before decoding."""
    spec = PermutationSpec(4, 0, 1)
    setup, out, measured = native_pipeline("optimized", 2, spec)
    padded = Circuit(out.num_qubits, out.gates[:-2] + (CNOT(1, 0),) * 20 + out.gates[-2:])
    assert np.allclose(oracle.unitary(padded)[:, 0], oracle.unitary(out)[:, 0])
    cfg = NoisySimConfig(FIT, setup.placement, seed=9)
    base = [success_probability(c, spec, setup.scheme) for c in noisy_run(out, cfg, measured)]
    more = [success_probability(c, spec, setup.scheme) for c in noisy_run(padded, cfg, measured)]
    diff = np.subtract(base, more)
    sigma = math.sqrt(2 * 0.25 / 8192 / len(diff))
    assert diff.mean() > 4 * sigma


def test_error_rate_monotonicity():
    spec = PermutationSpec(8, 5, 1)
    means = []
    for e in (0.0, 0.01, 0.05):
        cal = flat_calibration(e_g=e / 10, e_cx=e)
        setup, out, measured = native_pipeline("optimized", 3, spec, cal)
        means.append(mean_success(noisy_run(out, NoisySimConfig(cal, setup.placement, seed=4), measured), spec, setup.scheme))
    assert means[0] == 1.0
    assert means[0] > means[1] > means[2]


def test_sample_spread_within_binomial_bound():
    spec = PermutationSpec(4, 1, -1)
    setup, out, measured = native_pipeline("optimized", 2, spec)
    cfg = NoisySimConfig(FIT, setup.placement, samples=40, seed=6)
    s = np.array([success_probability(c, spec, setup.scheme) for c in noisy_run(out, cfg, measured)])
    bound = math.sqrt(s.mean() * (1 - s.mean()) / 8192)
    assert bound <= 0.0024
    # sample std of 40 binomial draws stays well inside 1.5x the bound
    assert s.std(ddof=1) < 1.5 * bound


# ---------------------------------------------------------------------------
# statistics


def test_success_fixtures():
    scheme = QpaScheme("optimized", 2)
    plus = ShotCounts((303, 7889))
    minus = ShotCounts((8077, 115))
    assert round(success_probability(plus, PermutationSpec(4, 0, 1), scheme), 3) == 0.963
    assert round(success_probability(minus, PermutationSpec(4, 0, -1), scheme), 3) == 0.986
    with pytest.raises(ValueError):
        success_probability(ShotCounts((1, 2, 3, 4)), PermutationSpec(4, 0, 1), scheme)
    original = QpaScheme("original", 2)
    assert success_probability(ShotCounts((1, 2, 3, 4)), PermutationSpec(4, 0, -1), original) == 0.4


def test_average_success_hand_values():
    r = average_success([0.9] * 8, N=100)
    assert r.mean == pytest.approx(0.9)
    assert r.margin == pytest.approx(0.12)  # 8 * 0.3 / sqrt(100 * 4)
    assert r.threshold == pytest.approx(324)  # 9 * 4 * 0.9 / 0.1
    assert not r.valid
    assert average_success([0.9] * 8, N=1000).valid
    perfect = average_success([1.0] * 8)
    assert perfect.margin == 0 and not perfect.valid


@given(st.lists(st.floats(0, 1), min_size=1, max_size=16).map(lambda v: v + v), st.integers(10, 10**6))
def test_margin_matches_oracle(values, N):
    assert average_success(values, N=N).margin == pytest.approx(oracle.margin(values, N), rel=1e-9, abs=1e-15)


@settings(max_examples=40)
@given(st.lists(st.floats(0.01, 0.99), min_size=2, max_size=2).map(lambda v: v * 4), st.data())
def test_general_weights(values, data):
    raw = np.array(data.draw(st.lists(st.floats(0.1, 1), min_size=len(values), max_size=len(values))))
    p = raw / raw.sum()
    r = average_success(values, weights=p, N=5000)
    s = np.array(values)
    d = len(values) // 2
    assert r.mean == pytest.approx(float(p @ s))
    assert r.margin == pytest.approx(2 * math.sqrt(d / 5000) * float(p @ np.sqrt(s - s * s)))


def test_average_success_errors():
    with pytest.raises(WeightMismatch):
        average_success([0.9, 0.9, 0.9])
    with pytest.raises(WeightMismatch):
        average_success([0.9, 0.9], weights=[1.0])
    with pytest.raises(WeightMismatch):
        average_success([0.9, 0.9], weights=[0.7, 0.7])
    with pytest.raises(ValueError):
        average_success([1.2, 0.9])


def test_half_counts_give_half():
    spec = PermutationSpec(4, 2, 1)
    assert success_probability(ShotCounts((4096, 4096)), spec, QpaScheme("optimized", 2)) == 0.5


def test_fitted_two_qubit_range():
    from qpa.experiment import run_experiment

    r = run_experiment(default_setup("optimized", 2, FIT, seed=2024))
    values = [s["success"] for s in r["specs"]]
    assert all(0.95 <= v <= 0.997 for v in values), values
    # negative parities read 0 and are not hit by relaxation
    assert min(values[4:]) > max(values[:4])
