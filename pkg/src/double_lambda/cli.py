"""Command-line interface.

Subcommands: simulate, predict, susceptibility, scan, report.  Exit code 0
when every comparison passes, 1 on a comparison failure, 2 on config or
usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .configs import reference_config, reference_kinds
from .errors import DoubleLambdaError
from .scenarios import (build_setup, load_config, load_report, resolve_outdir,
                        run_scenario, scan, write_prediction_tables,
                        write_susceptibility_tables)


def _get_config(arg: str) -> dict:
    if Path(arg).exists():
        return load_config(arg)
    if arg in reference_kinds():
        return reference_config(arg)
    return load_config(arg)   # raises with a helpful message


def _print_report(report) -> None:
    for r in report.rows:
        mark = "PASS" if r.passed else "FAIL"
        print(f"[{mark}] {r.name}: observed={r.observed:.6g} "
              f"predicted={r.predicted:.6g} (tol {r.tolerance:.3g} {r.tol_kind})")
    print(f"scenario {report.kind}: "
          f"{'all comparisons passed' if report.passed else 'FAILED'}")


def _parse_values(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise DoubleLambdaError(f"bad --values list: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="double-lambda",
        description="EIT and light storage in a double-lambda medium: "
                    "propagation solver and closed-form analytics.")
    sub = p.add_subparsers(dest="command", required=True)

    kinds = ", ".join(reference_kinds())
    for name, help_text in (
            ("simulate", "run a scenario and compare against analytics"),
            ("predict", "write analytic prediction tables (no PDE solve)"),
            ("susceptibility", "write the susceptibility matrix tables"),
            ("scan", "run a scenario over a list of parameter values")):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("config",
                        help=f"path to a JSON config, or one of: {kinds}")
        sp.add_argument("--outdir", default=None,
                        help="output directory (default from config or "
                             "DOUBLE_LAMBDA_OUTDIR)")
        if name == "scan":
            sp.add_argument("--param", required=True,
                            help="dotted config path, e.g. signals.1.phase")
            sp.add_argument("--values", required=True,
                            help="comma-separated list of values")
            sp.add_argument("--workers", type=int, default=None)

    rp = sub.add_parser("report", help="re-print the verdict of a finished run")
    rp.add_argument("rundir", help="directory containing report.json")

    mk = sub.add_parser("make-config", help="print a reference config as JSON")
    mk.add_argument("kind", choices=reference_kinds())
    return p


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help
        return int(exc.code or 0)

    try:
        if args.command == "make-config":
            print(json.dumps(reference_config(args.kind), indent=2,
                             sort_keys=True))
            return 0

        if args.command == "report":
            report = load_report(args.rundir)
            _print_report(report)
            return 0 if report.passed else 1

        config = _get_config(args.config)

        if args.command == "simulate":
            result = run_scenario(config, outdir=args.outdir)
            _print_report(result.report)
            return 0 if result.report.passed else 1

        if args.command == "predict":
            setup = build_setup(config)
            out = resolve_outdir(config, args.outdir)
            for path in write_prediction_tables(setup, out):
                print(f"wrote {path}")
            return 0

        if args.command == "susceptibility":
            setup = build_setup(config)
            out = resolve_outdir(config, args.outdir)
            for path in write_susceptibility_tables(setup, out):
                print(f"wrote {path}")
            return 0

        if args.command == "scan":
            values = _parse_values(args.values)
            results = scan(config, args.param, values, outdir=args.outdir,
                           max_workers=args.workers)
            ok = True
            for v, rep in results:
                if isinstance(rep, Exception):
                    print(f"value {v!r}: ERROR {rep}")
                    ok = False
                else:
                    status = "pass" if rep.passed else "FAIL"
                    ok = ok and rep.passed
                    print(f"value {v!r}: {status}")
            return 0 if ok else 1

    except DoubleLambdaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


def main() -> None:
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
