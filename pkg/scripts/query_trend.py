"""Mean query counts of the main estimator vs standard sampling over n.

    python scripts/query_trend.py --n 16,20,24 --runs 30 --seed 7
"""
import argparse
import csv
import io
import sys
from collections import defaultdict
from contextlib import redirect_stdout

from nsprobe.cli import main as cli


def run(args):
    buf = io.StringIO()
    argv = ["bench", "--family", args.family, "--n", args.n, "--delta-rule", args.delta_rule,
            "--eps", str(args.eps), "--runs", str(args.runs), "--methods", "ns,ns-std",
            "--seed", str(args.seed), "--workers", str(args.workers)]
    with redirect_stdout(buf):
        if cli(argv) != 0:
            sys.exit("bench failed")
    queries = defaultdict(list)
    for row in csv.DictReader(io.StringIO(buf.getvalue())):
        queries[int(row["n"]), row["method"]].append(int(row["queries"]))
    print("n,mean_main,mean_std,ratio")
    for n in sorted({k[0] for k in queries}):
        a = sum(queries[n, "ns"]) / len(queries[n, "ns"])
        b = sum(queries[n, "ns-std"]) / len(queries[n, "ns-std"])
        print(f"{n},{a:.0f},{b:.0f},{a / b:.3f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", default="majority")
    ap.add_argument("--n", default="16,20,24")
    ap.add_argument("--delta-rule", default="1/n")
    ap.add_argument("--eps", type=float, default=0.25)
    ap.add_argument("--runs", type=int, default=30)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--workers", type=int, default=1)
    run(ap.parse_args())
