"""Sweep the benchmark families over a range of sizes and write CSV rows.

    python scripts/run_bench.py --solver "z3 -in" --out results/bench.csv
"""
import argparse
import os
import sys

from rground.bench import CSV_HEADER, FAMILIES, run_bench

DEFAULT_SIZES = {
    "graph-coloring": [10, 50, 100, 500, 1000],
    "n-queens": [4, 6, 8],
    "pigeonhole": [2, 3, 4, 5, 6],
    "common-item": [5, 20, 100],
}


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--families", nargs="*", default=list(FAMILIES), choices=FAMILIES)
    p.add_argument("--sizes", nargs="*", type=int, help="override the per-family default sizes")
    p.add_argument("--solver", default=os.environ.get("RGROUND_SOLVER"))
    p.add_argument("--timeout", type=float, default=600.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV path (default: stdout)")
    args = p.parse_args(argv)

    out = open(args.out, "w") if args.out else sys.stdout
    print(CSV_HEADER, file=out, flush=True)
    for fam in args.families:
        for size in args.sizes or DEFAULT_SIZES[fam]:
            row = run_bench(fam, size, args.solver, args.timeout, args.seed)
            print(row.csv(), file=out, flush=True)
    if args.out:
        out.close()


if __name__ == "__main__":
    main()
