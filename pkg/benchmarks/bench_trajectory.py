"""Compare the compiled and numpy trajectory kernels on the native QPA pipelines.

    python benchmarks/bench_trajectory.py --shots 8192 --repeat 5
"""
import argparse
import time

import numpy as np

from qpa.builders import QpaScheme, build_pipeline
from qpa.core import PermutationSpec
from qpa.experiment import default_setup
from qpa.kernels import Program, evolve_compiled, run_trajectories
from qpa.noise import gate_error, load_calibration, NoisySimConfig
from qpa.transpiler import transpile

CASES = [("optimized", 2, 1, 1), ("original", 2, 3, -1), ("optimized", 3, 7, 1)]


def draws(native, cfg, shots, seed):
    rng = np.random.default_rng(seed)
    p = np.array([gate_error(g, cfg) for g in native.gates])
    # every shot fails somewhere so the kernel sees the full load
    fail = rng.random((shots, len(p))) < np.maximum(p, 0.05)
    fail[:, 0] = True
    pauli = rng.integers(0, 64, size=(shots, len(p)))
    return fail, pauli


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--shots", type=int, default=8192)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--calib", default="ibmqx_fit")
    args = ap.parse_args()

    calib = load_calibration(args.calib)
    print(f"{'case':<22}{'gates':>6}{'python ms':>12}{'cython ms':>12}{'speedup':>9}")
    for variant, n, m, parity in CASES:
        setup = default_setup(variant, n, calib)
        spec = PermutationSpec(1 << n, m, parity)
        native, _ = transpile(build_pipeline(QpaScheme(variant, n), spec), setup.cmap, setup.placement, absorb=setup.absorb)
        cfg = NoisySimConfig(calib, setup.placement, args.shots)
        program = Program(native)
        fail, pauli = draws(native, cfg, args.shots, 0)

        t_py, ref = timeit(lambda: run_trajectories(program, fail, pauli, "python"), args.repeat)
        label = f"{variant} n={n} {spec.sign}{m}"
        if evolve_compiled is None:
            print(f"{label:<22}{len(program):>6}{t_py * 1e3:>12.2f}{'n/a':>12}{'':>9}")
            continue
        t_cy, out = timeit(lambda: run_trajectories(program, fail, pauli, "cython"), args.repeat)
        assert np.allclose(out, ref, atol=1e-12), "backends disagree"
        print(f"{label:<22}{len(program):>6}{t_py * 1e3:>12.2f}{t_cy * 1e3:>12.2f}{t_py / t_cy:>8.1f}x")


if __name__ == "__main__":
    main()
