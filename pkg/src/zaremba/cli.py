"""Command-line entry point.

Exit status: 0 when every verdict passes, 2 when an inequality verdict
fails, 1 on configuration, input or solver errors.
"""
from __future__ import annotations

import argparse
import sys
import time

from .errors import ZarembaError
from .experiments import KINDS, parse_config, run, run_paper_example, run_property_suite
from .report import FORMATS, emit_report

EXIT_OK, EXIT_ERROR, EXIT_FAILED = 0, 1, 2


def _u64(text):
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="zaremba", description="Reverse Faber-Krahn and Nagy-type checks for mixed problems.")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind)
        p.add_argument("--config", help="YAML or JSON experiment document")
        p.add_argument("--output", help="report path (default: stdout)")
        p.add_argument("--format", choices=FORMATS, default=None)
        p.add_argument("--seed", type=_u64, default=None)
        if kind == "suite":
            p.add_argument("--count", type=int, default=None, help="random bodies per dimension")
            p.add_argument("--profile-count", type=int, default=None)
    return parser


def _report_for(args):
    if args.config is None:
        if args.kind == "paper-example":
            return run_paper_example(seed=args.seed or 0), "json", None
        if args.kind == "suite":
            if args.seed is None:
                raise ZarembaError("suite needs --seed or --config")
            kw = {}
            if args.count is not None:
                kw["count"] = args.count
            if args.profile_count is not None:
                kw["profile_count"] = args.profile_count
            return run_property_suite(args.seed, **kw), "json", None
        raise ZarembaError(f"{args.kind} needs --config")
    with open(args.config, encoding="utf-8") as fh:
        text = fh.read()
    cfg = parse_config(text, kind=args.kind, seed=args.seed)
    if args.kind == "suite":
        if args.count is not None:
            cfg.count = args.count
        if args.profile_count is not None:
            cfg.profile_count = args.profile_count
    return run(cfg), cfg.output.get("format", "json"), cfg.output.get("path")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        start = time.perf_counter()
        report, fmt, path = _report_for(args)
        report.runtime = time.perf_counter() - start
        path = args.output or path
        text = emit_report(report, args.format or fmt)
        if path:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except (ZarembaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as exc:  # operational failure outside the package's own error types
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(f"{report.kind}: {'pass' if report.passed else 'fail'} ({report.runtime:.2f} s)", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
