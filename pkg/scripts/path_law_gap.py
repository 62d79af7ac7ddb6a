"""Exact total variation between the path-pair sampler's law and the
Process-D law conditioned on crossing the edge without a bad event.

    python scripts/path_law_gap.py --deltas 0.01,0.02,0.05,0.1,0.2
"""
import argparse

from nsprobe import exact
from nsprobe import oracle as orc
from nsprobe.params import NsParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--spec", default='{"n":6,"root":{"clauses":[[0,1],[2,3,4],[1,5]],"kind":"dnf"}}')
    ap.add_argument("--deltas", default="0.01,0.02,0.05,0.1,0.2")
    ap.add_argument("--eps", type=float, default=0.25)
    args = ap.parse_args()
    f = orc.deserialize(args.spec)
    edges = exact.influential_edges(orc.truth_table(f))
    print("delta,t2,edges,max_tv,mean_tv")
    for d in (float(s) for s in args.deltas.split(",")):
        p = NsParams.build(f.n, d, args.eps)
        tvs = [exact.total_variation(exact.path_sampler_law(e, p),
                                     exact.conditional_path_law(f, p, e))
               for e in edges if p.in_middle(e)]
        print(f"{d},{p.t2},{len(tvs)},{max(tvs):.4f},{sum(tvs) / len(tvs):.4f}")


if __name__ == "__main__":
    main()
