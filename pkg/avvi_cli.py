import argparse
import logging
import sys
from typing import List, Optional

import pandas as pd

from avvi.analysis_service import AvviAnalysisService, modes_of
from avvi.config import CSV_SAMPLES, ORACLE_CLIP, ORACLE_EPS, ORACLE_GRID
from avvi.instances import all_bounds, gen_family
from avvi.parametric_sweep import Mode, SweepInvariantError
from avvi.sampling_oracle import sampling_oracle
from avvi.utils import atomic_write_text, canonical_json
from scripts.curve_exporter import export_curves
from scripts.instance_io import InstanceFormatError, dumps_instance, load_instance
from scripts.verification_suites import SUITES, VerificationRunner

logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _emit(text: str, output: Optional[str]):
    if output:
        atomic_write_text(output, text)
    else:
        sys.stdout.write(text)


def _add_oracle_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--grid", type=int, default=ORACLE_GRID, help="Oracle simplex grid budget.")
    parser.add_argument("--eps", type=float, default=ORACLE_EPS, help="Oracle neighbourhood radius.")
    parser.add_argument("--clip", type=float, default=ORACLE_CLIP, help="Oracle clip box radius.")


def build_parser() -> argparse.ArgumentParser:

    parser = argparse.ArgumentParser(prog="avvi_cli.py", description="Exact component counting for affine vector variational inequalities.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="Generate a family instance.")
    gen.add_argument("--family", choices=["pp"], default="pp")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--p", type=int, default=0)
    gen.add_argument("-o", "--output", help="Instance path (stdout when omitted).")

    analyze = sub.add_parser("analyze", help="Sweep, count components and report.")
    analyze.add_argument("input")
    analyze.add_argument("--mode", choices=["weak", "pareto", "both"], default="both")
    analyze.add_argument("-o", "--output", help="Report path (stdout when omitted).")
    analyze.add_argument("--curve-csv", help="Write curve samples for plotting.")
    analyze.add_argument("--csv-samples", type=int, default=CSV_SAMPLES)
    analyze.add_argument("--oracle", action="store_true", help="Append the sampling-oracle cross-check.")
    analyze.add_argument("--degraded", action="store_true", help="Keep irrational critical values as isolating intervals.")
    analyze.add_argument("--no-timing", action="store_true", help="Omit timings for byte-stable reports.")
    _add_oracle_flags(analyze)

    verify = sub.add_parser("verify", help="Run verification suites.")
    verify.add_argument("--suite", choices=SUITES + ["all"], required=True)
    verify.add_argument("--n-max", type=int, default=8)
    verify.add_argument("--seed", type=int, default=0)

    bounds = sub.add_parser("bounds", help="Print the component-count bounds.")
    bounds.add_argument("m", type=int)
    bounds.add_argument("n", type=int)
    bounds.add_argument("p", type=int)

    oracle = sub.add_parser("oracle", help="Standalone sampling-oracle run.")
    oracle.add_argument("input")
    oracle.add_argument("--mode", choices=["weak", "pareto"], default="weak")
    _add_oracle_flags(oracle)

    return parser


def cmd_generate(args) -> int:

    try:
        problem = gen_family(args.n, args.p)
    except ValueError as e:
        logger.error(f"Cannot generate instance: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    _emit(dumps_instance(problem), args.output)
    return EXIT_OK


def cmd_analyze(args) -> int:

    problem = load_instance(args.input)
    modes = modes_of(args.mode)
    service = AvviAnalysisService(
        modes=modes,
        exact=not args.degraded,
        oracle=args.oracle,
        grid=args.grid,
        eps=args.eps,
        clip=args.clip,
        timing=not args.no_timing,
    )
    try:
        result = service.run(problem)
    except SweepInvariantError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILED

    _emit(canonical_json(result.report), args.output)
    if args.curve_csv:
        if not result.graphs:
            logger.warning("No structural pieces to export; curve CSV skipped")
        else:
            export_curves(result, args.curve_csv, modes[0], args.csv_samples)
    return EXIT_OK


def cmd_verify(args) -> int:

    runner = VerificationRunner(n_max=args.n_max, seed=args.seed)
    tables, passed = runner.run(args.suite)
    for name, table in tables.items():
        print(f"== {name} ==")
        print(table.to_string(index=False))
    print("PASSED" if passed else "FAILED")
    return EXIT_OK if passed else EXIT_FAILED


def cmd_bounds(args) -> int:

    if args.m < 1 or args.n < 1 or args.p < 0:
        print("error: need m, n >= 1 and p >= 0", file=sys.stderr)
        return EXIT_USAGE
    rows = []
    for bound in all_bounds(args.m, args.n, args.p):
        rows.append({"bound": bound.kind.value, "value": bound.value if bound.applicable else "Inapplicable", "note": bound.reason})
    print(pd.DataFrame(rows).to_string(index=False))
    return EXIT_OK


def cmd_oracle(args) -> int:

    problem = load_instance(args.input)
    report = sampling_oracle(problem, grid=args.grid, eps=args.eps, clip=args.clip, mode=Mode(args.mode))
    sys.stdout.write(canonical_json(report))
    return EXIT_OK


COMMANDS = {
    "gen": cmd_generate,
    "analyze": cmd_analyze,
    "verify": cmd_verify,
    "bounds": cmd_bounds,
    "oracle": cmd_oracle,
}


def main(argv: Optional[List[str]] = None) -> int:

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    try:
        return COMMANDS[args.command](args)
    except InstanceFormatError as e:
        logger.error(f"Bad instance file: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
