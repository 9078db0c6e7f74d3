"""Command line entry point.

    drazin-lab run --suite drazin|operator|structure|all [--seed N]
                   [--tol X] [--window N] [--corpus N] [--out PATH]
                   [--format json|text]
    drazin-lab gen --count N [--seed N] --out DIR

DRAZIN_LAB_TOL, when set, overrides --tol.  Exit codes: 0 all checks pass,
1 at least one check failed, 2 usage error, 3 I/O error.  Output files are
written atomically (temp file plus rename).
"""

from __future__ import annotations

import argparse
import os
import sys

from .corpus import write_corpus
from .suites import SUITE_NAMES, RunConfig, format_report, run_suite


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="drazin-lab",
        description="verification suites for one-sided Drazin inverses")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a check suite")
    run.add_argument("--suite", required=True, choices=SUITE_NAMES)
    run.add_argument("--seed", type=int, default=1)
    run.add_argument("--tol", type=float, default=None)
    run.add_argument("--window", type=int, default=128)
    run.add_argument("--corpus", type=int, default=25,
                     help="number of generated matrices per sweep")
    run.add_argument("--out", default=None,
                     help="write the report here instead of stdout")
    run.add_argument("--format", dest="fmt", default="json",
                     choices=("json", "text"))

    gen = sub.add_parser("gen", help="write a matrix corpus with metadata")
    gen.add_argument("--count", type=int, required=True)
    gen.add_argument("--seed", type=int, default=1)
    gen.add_argument("--out", required=True, help="output directory")
    return p


def _atomic_write(path: str, text: str):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _run(args) -> int:
    tol = args.tol
    env = os.environ.get("DRAZIN_LAB_TOL")
    if env is not None:
        try:
            tol = float(env)
        except ValueError:
            print(f"DRAZIN_LAB_TOL is not a number: {env!r}",
                  file=sys.stderr)
            return 2
    cfg = RunConfig(seed=args.seed, tol=tol, window=args.window,
                    corpus_size=args.corpus, out=args.out, fmt=args.fmt)
    try:
        cfg.validate()
    except ValueError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    report = run_suite(args.suite, cfg)
    text = format_report(report, args.fmt)
    if args.out:
        try:
            _atomic_write(args.out, text)
        except OSError as exc:
            print(f"cannot write {args.out}: {exc}", file=sys.stderr)
            return 3
    else:
        sys.stdout.write(text)
    return 0 if report["summary"]["failed"] == 0 else 1


def _gen(args) -> int:
    if args.count < 1:
        print(f"count must be at least 1, got {args.count}",
              file=sys.stderr)
        return 2
    if not (0 <= args.seed < 2 ** 64):
        print(f"seed must fit in 64 bits, got {args.seed}", file=sys.stderr)
        return 2
    try:
        paths = write_corpus(args.out, args.seed, args.count)
    except OSError as exc:
        print(f"cannot write corpus to {args.out}: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {len(paths)} files ({args.count} matrices) to {args.out}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _run(args)
    return _gen(args)


if __name__ == "__main__":
    sys.exit(main())
