"""Command-line entry point: ``mharm run | export | conventions``.

Exit codes: 0 when every check passes, 1 when some check fails, 2 for usage
and input errors.
"""

from __future__ import annotations

import argparse
import sys

from mharm.config import load_config
from mharm.conventions import conventions_table
from mharm.errors import MharmError
from mharm.io import read_stack, stack_to_csv, write_reports
from mharm.suites import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mharm", description="Numerical identity checks on the motion group M(2).")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an identity suite and write CSV and JSON reports")
    run.add_argument("suite", choices=SUITES + ("all",))
    run.add_argument("--config", help="YAML file layered over the packaged defaults")
    run.add_argument("--seed", type=int, help="run with this single seed instead of the configured list")
    run.add_argument("--out", help="report directory (default: output_dir from the config)")
    run.add_argument("--quiet", action="store_true", help="print only the summary line")

    exp = sub.add_parser("export", help="print a stored mode or spectral stack as CSV")
    exp.add_argument("stack_file")

    sub.add_parser("conventions", help="print the normalization conventions")
    return p


def _run(args) -> int:
    overrides = {"seeds": [args.seed]} if args.seed is not None else None
    cfg = load_config(args.config, overrides)
    reports = run_suite(cfg, args.suite)
    out_dir = args.out if args.out is not None else cfg.output_dir
    csv_path, json_path = write_reports(reports, out_dir, args.suite)
    if not args.quiet:
        for r in reports:
            print(r.line())
    failed = sum(not r.passed for r in reports)
    print(f"{len(reports) - failed}/{len(reports)} checks passed; reports in {csv_path} and {json_path}")
    return EXIT_FAIL if failed else EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _run(args)
        if args.command == "export":
            sys.stdout.write(stack_to_csv(read_stack(args.stack_file)))
            return EXIT_OK
        print(conventions_table())
        return EXIT_OK
    except (MharmError, OSError, ValueError) as e:
        print(f"mharm: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
