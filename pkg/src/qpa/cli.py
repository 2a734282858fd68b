"""``qpa`` command line: build, transpile, experiment, scaling, verify.

Exit codes: 0 success, 1 runtime failure, 2 flag error, 3 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .builders import (
    SCHEMES,
    QpaScheme,
    build_pipeline,
    inverse_qft_circuit,
    optimized_decode_circuit,
    optimized_prep_circuit,
    permutation_circuit,
    qft_circuit,
    scaling_row,
)
from .core import CircuitError, PermutationSpec, QubitLabeling, dumps, loads, parse_parity
from .experiment import DEFAULT_ENSEMBLE, default_setup, distributions_csv, run_experiment
from .noise import DEFAULT_SAMPLES, DEFAULT_SHOTS, load_calibration
from .transpiler import ABSORB_MODES, UnroutableCircuit, coupling_map, transpile
from .verify import check_permutation, run_checks

EXIT_OK, EXIT_RUNTIME, EXIT_FLAGS, EXIT_VERIFY = 0, 1, 2, 3
MAX_SCALING_N = 12
STAGES = ("pipeline", "prep", "permutation", "decode", "qft", "iqft")


class FlagError(Exception):
    pass


def _parity(text: str) -> int:
    try:
        return parse_parity(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _placement(text: str) -> QubitLabeling:
    try:
        return QubitLabeling.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _seed(args: argparse.Namespace) -> int:
    env = os.environ.get("QPA_SEED")
    if env is None:
        return args.seed
    try:
        return int(env)
    except ValueError:
        raise FlagError(f"QPA_SEED must be an integer, got {env!r}") from None


def _spec(n: int, m: int, parity: int) -> PermutationSpec:
    try:
        return PermutationSpec(1 << n, m, parity)
    except ValueError as exc:
        raise FlagError(str(exc)) from None


def _read_circuit(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    try:
        return loads(text)
    except CircuitError as exc:
        raise FlagError(f"{path}: {exc}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load_map(name: str):
    try:
        return coupling_map(name)
    except (KeyError, FileNotFoundError, ValueError) as exc:
        raise FlagError(f"unknown coupling map {name!r}: {exc}") from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_build(args: argparse.Namespace) -> int:
    n = args.n
    if args.stage == "qft":
        c = qft_circuit(n)
    elif args.stage == "iqft":
        c = inverse_qft_circuit(n)
    elif args.stage == "prep":
        c = optimized_prep_circuit(n)
    elif args.stage == "decode":
        if n < 2:
            raise FlagError("the decode stage needs n >= 2")
        c = optimized_decode_circuit(n)
    else:
        if args.m is None or args.parity is None:
            raise FlagError(f"--m and --parity are required for --stage {args.stage}")
        spec = _spec(n, args.m, args.parity)
        if args.stage == "permutation":
            c = permutation_circuit(n, spec)
        else:
            if args.scheme == "optimized" and n < 2:
                raise FlagError("the optimized scheme needs n >= 2")
            c = build_pipeline(QpaScheme(args.scheme, n), spec)
    _write(args.output, dumps(c))
    return EXIT_OK


def cmd_transpile(args: argparse.Namespace) -> int:
    c = _read_circuit(args.circuit)
    cmap = _load_map(args.map)
    try:
        out, report = transpile(c, cmap, args.place, absorb=args.absorb)
    except UnroutableCircuit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    _write(args.output, dumps(out))
    payload = json.dumps(report.to_dict(), indent=2) + "\n"
    if args.report:
        Path(args.report).write_text(payload, encoding="utf-8")
    else:
        sys.stderr.write(payload)
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace) -> int:
    calibration = None
    if not args.ideal:
        try:
            calibration = load_calibration(args.calib)
        except (FileNotFoundError, KeyError, ValueError) as exc:
            raise FlagError(f"cannot load calibration {args.calib!r}: {exc}") from None
    if args.map:
        _load_map(args.map)
    setup = default_setup(
        args.scheme,
        args.n,
        calibration,
        map_name=args.map,
        placement=args.place,
        shots=args.shots,
        samples=args.samples,
        seed=_seed(args),
        ensemble=args.ensemble,
    )
    try:
        report = run_experiment(setup, jobs=args.jobs)
    except UnroutableCircuit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    report = {"generated_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()), "version": __version__, **report}
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(text, encoding="utf-8")
        (out / "distributions.csv").write_text(distributions_csv(report), encoding="utf-8")
        print(
            f"{report['scheme']} n={report['n']}: average success {report['average_success']:.4f} "
            f"+/- {report['margin']:.4%} -> {out}",
            file=sys.stderr,
        )
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_scaling(args: argparse.Namespace) -> int:
    if not 1 <= args.max_n <= MAX_SCALING_N:
        raise FlagError(f"--max-n must lie in [1, {MAX_SCALING_N}], got {args.max_n}")
    rows = [scaling_row(n) for n in range(1, args.max_n + 1)]
    fh = sys.stdout if args.output in (None, "-") else open(args.output, "w", encoding="utf-8", newline="")
    try:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    if args.permutation_file:
        if args.m is None or args.parity is None:
            raise FlagError("--permutation-file needs --m and --parity")
        c = _read_circuit(args.permutation_file)
        results = [check_permutation(c, _spec(c.num_qubits, args.m, args.parity))]
    else:
        results = run_checks(args.max_n)
    passed = 0
    for res in results:
        if not res.ok:
            print(f"FAIL {res.name}: {res.detail}")
            return EXIT_VERIFY
        passed += 1
        if args.verbose:
            print(f"ok   {res.name}")
    print(f"all {passed} checks passed")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpa", description="Quantum permutation algorithm toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="emit a logical circuit")
    p.add_argument("--scheme", choices=SCHEMES, default="optimized")
    p.add_argument("--n", type=_positive, required=True, help="register width in qubits")
    p.add_argument("--m", type=int, help="shift of the permutation")
    p.add_argument("--parity", type=_parity, help="+ or -")
    p.add_argument("--stage", choices=STAGES, default="pipeline")
    p.add_argument("-o", "--output", help="output file (default stdout)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("transpile", help="lower a circuit file onto a coupling map")
    p.add_argument("circuit", help="circuit file, or - for stdin")
    p.add_argument("--map", default="ibmqx4", help="preset name or JSON file {num_qubits, edges}")
    p.add_argument("--place", type=_placement, help="placement such as q0=3,q1=2 (default identity)")
    p.add_argument("--absorb", choices=ABSORB_MODES, default="output", help="side on which SWAPs become relabelings")
    p.add_argument("-o", "--output", help="output circuit file (default stdout)")
    p.add_argument("--report", help="JSON report file (default stderr)")
    p.set_defaults(func=cmd_transpile)

    p = sub.add_parser("experiment", help="run all 2d permutations of one scheme")
    p.add_argument("--scheme", choices=SCHEMES, required=True)
    p.add_argument("--n", type=int, choices=(2, 3), required=True)
    p.add_argument("--map", help="coupling map preset or JSON file (default per scheme)")
    p.add_argument("--place", type=_placement, help="placement such as q0=4,q1=3,q2=2")
    p.add_argument("--calib", default="ibmqx_fit.json", help="calibration preset or JSON file")
    p.add_argument("--ideal", action="store_true", help="noiseless sampling; ignores --calib")
    p.add_argument("--shots", type=_positive, default=DEFAULT_SHOTS)
    p.add_argument("--samples", type=_positive, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=0, help="overridden by QPA_SEED")
    p.add_argument("--ensemble", type=_positive, default=DEFAULT_ENSEMBLE, help="N used for the margin")
    p.add_argument("--jobs", type=_positive, default=1, help="threads across permutations")
    p.add_argument("--out", help="directory for report.json and distributions.csv (default: JSON on stdout)")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("scaling", help="gate-count table for n = 1..max-n")
    p.add_argument("--max-n", type=int, default=10)
    p.add_argument("-o", "--output", help="CSV file (default stdout)")
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("verify", help="dense equivalence checks against the reference model")
    p.add_argument("--permutation-file", help="check one serialized permutation circuit instead")
    p.add_argument("--m", type=int)
    p.add_argument("--parity", type=_parity)
    p.add_argument("--max-n", type=int, default=3, help="widths checked exhaustively (generic construction at max-n+1)")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FlagError as exc:
        parser.print_usage(sys.stderr)
        print(f"qpa {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
