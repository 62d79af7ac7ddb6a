"""Distinguisher success against the union bound for a few DNF shapes at n=16.

    python scripts/distinguisher_sweep.py --trials 2000
"""
import argparse
import random

from nsprobe import lowerbounds as lb

SHAPES = [(None, None), (4, 6), (2, 8), (1, 10)]

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    print("clauses,width,q,thinness,success_rate,stderr,bound,vacuous")
    for m, w in SHAPES:
        spec = lb.FamilySpec("D2_bias", args.n, 2.0, 0.0, num_clauses=m, clause_width=w)
        base = lb.draw_base(spec, rng)
        m, w = spec.dnf_shape
        for q in (1, 2, 4, 8):
            r = lb.distinguisher_experiment(spec, q, args.trials, rng, base)
            print(f"{m},{w},{q},{r.thinness:.4f},{r.success_rate:.4f},{r.stderr:.4f},"
                  f"{r.bound:.4f},{int(r.vacuous)}")
