"""Command line: ``rground FILE`` grounds a script and optionally solves it;
``rground bench FAMILY SIZE`` runs one benchmark instance."""
from __future__ import annotations

import argparse
import os
import sys
import time

from .frontend import FrontendError
from .grounder import GrounderConfig, GroundingError
from .pipeline import ground_text
from .relalg import RelationError
from .sexpr import ParseError
from .solver import SolverError, run_solver
from .terms import TermError

_GROUNDING_ERRORS = (FrontendError, ParseError, GroundingError, RelationError, TermError)


def _ground_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rground", description="Ground an SMT-LIB script.")
    p.add_argument("file", help="input script, or - for standard input")
    p.add_argument("--ground-only", action="store_true", help="write the grounded script and stop")
    p.add_argument("--solver", default=os.environ.get("RGROUND_SOLVER"),
                   help='solver command reading SMT-LIB on stdin, e.g. "z3 -in"')
    p.add_argument("--timeout", type=float, default=600.0, help="solver timeout in seconds")
    p.add_argument("--output", help="write the grounded script to this path")
    p.add_argument("--stats", action="store_true", help="print per-assertion statistics")
    p.add_argument("--dump-relations", action="store_true",
                   help="print intermediate relations on stderr")
    return p


def _bench_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rground bench", description="Run one benchmark instance.")
    p.add_argument("family", choices=["graph-coloring", "n-queens", "pigeonhole", "common-item"])
    p.add_argument("size", type=int)
    p.add_argument("--solver", default=os.environ.get("RGROUND_SOLVER"))
    p.add_argument("--timeout", type=float, default=600.0)
    p.add_argument("--header", action="store_true", help="print the CSV header first")
    return p


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def run_ground(args) -> int:
    if args.timeout <= 0:
        _err("error: --timeout must be positive")
        return 1
    try:
        text = sys.stdin.read() if args.file == "-" else open(args.file, encoding="utf-8").read()
    except OSError as e:
        _err(f"error: {e}")
        return 1
    t0 = time.perf_counter()
    try:
        res = ground_text(text, GrounderConfig(trace=args.dump_relations))
    except _GROUNDING_ERRORS as e:
        _err(f"error: {type(e).__name__}: {e}")
        return 1
    ground_ms = res.ground_seconds * 1000
    if args.dump_relations:
        for label, rel in res.grounder.trace:
            sys.stderr.write(rel.dump(label) + "\n")
    if args.stats:
        for i, counts in enumerate(res.per_assertion, 1):
            items = " ".join(f"{k}={v}" for k, v in sorted(counts.items()))
            _err(f"; assertion {i}: {items}")
    solve = args.solver and not args.ground_only
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(res.text)
    elif not solve:
        sys.stdout.write(res.text)
    _err(f"; ground: {ground_ms:.1f} ms")
    if not solve:
        return 0
    try:
        out = run_solver(args.solver, res.text, args.timeout)
    except SolverError as e:
        _err(f"error: {type(e).__name__}: {e}")
        return 2
    sys.stdout.write(out.stdout)
    if out.stderr:
        sys.stderr.write(out.stderr)
    solve_ms = out.seconds * 1000
    _err(f"; solve: {solve_ms:.1f} ms")
    _err(f"; total: {(time.perf_counter() - t0) * 1000:.1f} ms")
    return 0 if out.verdict in ("sat", "unsat") else 2


def run_bench_cli(args) -> int:
    from .bench import CSV_HEADER, run_bench

    if args.header:
        print(CSV_HEADER)
    try:
        row = run_bench(args.family, args.size, args.solver, args.timeout)
    except _GROUNDING_ERRORS as e:
        _err(f"error: {type(e).__name__}: {e}")
        return 1
    print(row.csv())
    return 0 if row.verdict in ("sat", "unsat", "grounded") else 2


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if argv and argv[0] == "bench":
        return run_bench_cli(_bench_parser().parse_args(argv[1:]))
    return run_ground(_ground_parser().parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
