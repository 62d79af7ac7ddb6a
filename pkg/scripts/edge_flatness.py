"""max/min of the exact edge-crossing probabilities p_e over middle
influential edges, for small fixtures and a grid of delta.

    python scripts/edge_flatness.py
"""
from nsprobe import exact
from nsprobe import oracle as orc
from nsprobe.params import NsParams

FIXTURES = {
    "dictator6": orc.dictator(6, 2),
    "majority5": orc.majority(5),
    "majority6": orc.majority(6),
    "dnf6": orc.dnf(6, [(0, 1), (2, 3, 4), (1, 5)]),
    "threshold6": orc.threshold(6, 2),
    "dnf5": orc.dnf(5, [(0, 1, 2), (2, 3), (1, 4)]),
}

if __name__ == "__main__":
    deltas = (0.01, 0.05, 0.1, 1 / 6, 0.2)
    print("fixture," + ",".join(f"{d:.3g}" for d in deltas))
    for name, f in FIXTURES.items():
        ratios = []
        for d in deltas:
            pe = exact.process_d_exact(f, NsParams.build(f.n, d, 0.25)).p_e.values()
            ratios.append(max(pe) / min(pe))
        print(name + "," + ",".join(f"{r:.3f}" for r in ratios))
