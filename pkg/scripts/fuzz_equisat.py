"""Differential fuzzing: brute-force satisfiability of random instances
before and after grounding.  Prints a summary and any disagreeing seeds.

    python scripts/fuzz_equisat.py --cases 5000 --depth 4
"""
import argparse
import random
import time
from collections import Counter

from rground.frontend import prepare
from rground.grounder import Grounder, Residual
from rground.oracle import FiniteInstance, RandomConfig, brute_force_satisfiable, random_instance
from rground.printer import term_to_smtlib


def check(seed, cfg):
    inst = random_instance(random.Random(seed), cfg)
    want, _ = brute_force_satisfiable(inst)
    gr = Grounder(inst.structure)
    out = []
    for s in inst.sentences:
        g = gr.ground_sentence(prepare(s, inst.structure))
        out.append(g.term if isinstance(g, Residual) else g)
    got, _ = brute_force_satisfiable(FiniteInstance(inst.structure, tuple(out)))
    return inst, want, got


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--cases", type=int, default=1000)
    p.add_argument("--start", type=int, default=0, help="first seed")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--ids", type=int, default=3)
    p.add_argument("--open-points", type=int, default=7)
    args = p.parse_args(argv)
    cfg = RandomConfig(max_depth=args.depth, max_ids=args.ids, max_open_points=args.open_points)

    tally = Counter()
    t0 = time.perf_counter()
    for seed in range(args.start, args.start + args.cases):
        try:
            inst, want, got = check(seed, cfg)
        except Exception as e:  # report and keep going
            tally[f"error {type(e).__name__}"] += 1
            print(f"seed {seed}: {type(e).__name__}: {e}")
            continue
        tally["sat" if want else "unsat"] += 1
        if want != got:
            tally["DISAGREE"] += 1
            print(f"seed {seed}: input {want}, grounded {got}")
            for s in inst.sentences:
                print("   ", term_to_smtlib(s))
    secs = time.perf_counter() - t0
    print(f"{args.cases} cases in {secs:.1f} s: " + ", ".join(f"{k}={v}" for k, v in sorted(tally.items())))
    return 1 if tally["DISAGREE"] else 0


if __name__ == "__main__":
    raise SystemExit(main())
