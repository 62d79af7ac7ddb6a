"""Hard-instance families and experiments around them.

D1 is the single truncated threshold f0.  D2 draws are f0 OR F(sigma(x))
for a random monotone DNF F and a uniform coordinate permutation sigma.
Both agree above f0's threshold T, so a tester learns something only from
points at or below level T, where D2 is "thin".
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import asdict, dataclass

import numpy as np

from . import exact
from . import hypercube as hc
from . import oracle as orc
from .estimators import std_bias_estimate, std_ns_estimate
from .oracle import FunctionSpec, OracleSession

D1 = "D1"
D2_KINDS = ("D2_bias", "D2_influence", "D2_ns")
EXACT_LEVEL_LIMIT = 10 ** 6


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    n: int
    C1: float = 2.0
    C2: float = 0.0
    num_clauses: int | None = None
    clause_width: int | None = None
    delta: float | None = None

    def __post_init__(self):
        if self.kind != D1 and self.kind not in D2_KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.kind == "D2_ns" and self.delta is None:
            raise ValueError("D2_ns needs delta")

    @property
    def dnf_shape(self) -> tuple[int, int]:
        if self.num_clauses is not None and self.clause_width is not None:
            return self.num_clauses, self.clause_width
        m, w = orc.paper_shape(self.n, self.C2)
        return (self.num_clauses if self.num_clauses is not None else m,
                self.clause_width if self.clause_width is not None else w)

    @property
    def threshold(self) -> int:
        return orc.f0_threshold(self.n, self.C1)

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, d: dict) -> FamilySpec:
        return cls(**d)


@dataclass
class ThinnessReport:
    level: int
    estimate: float
    samples: int
    stderr: float
    exact: bool


def draw_base(spec: FamilySpec, rng: random.Random) -> FunctionSpec:
    m, w = spec.dnf_shape
    return orc.make_random_dnf(spec.n, m, w, rng)


def with_f0(spec: FamilySpec, base: FunctionSpec, rng: random.Random) -> FunctionSpec:
    """f0 OR base(sigma(x)) with a fresh uniform sigma."""
    sigma = orc.random_permutation(spec.n, rng)
    return orc.or_(orc.make_f0(spec.n, spec.C1), orc.permute(base, sigma))


def draw_family(spec: FamilySpec, rng: random.Random) -> FunctionSpec:
    if spec.kind == D1:
        return orc.make_f0(spec.n, spec.C1)
    return with_f0(spec, draw_base(spec, rng), rng)


def level_points(n: int, l: int) -> np.ndarray:
    pts = [sum(1 << i for i in c) for c in itertools.combinations(range(n), l)]
    return np.array(pts, dtype=np.uint64)


def measure_thinness(f: FunctionSpec, T: int, samples: int, rng: random.Random) -> ThinnessReport:
    """Pr[f(x) = 1 | level(x) = T]; exact when the level has <= 10^6 points."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    n = f.n
    if math.comb(n, T) <= EXACT_LEVEL_LIMIT:
        vals = orc.evaluate_batch(f, level_points(n, T))
        return ThinnessReport(T, float(vals.mean()), len(vals), 0.0, True)
    g = orc.compile_spec(f)
    hits = sum(g(hc.random_point_at_level(n, T, rng)) for _ in range(samples))
    p = hits / samples
    return ThinnessReport(T, p, samples, math.sqrt(p * (1 - p) / samples), False)


@dataclass
class DistinguishResult:
    q: int
    trials: int
    success_rate: float
    stderr: float
    thinness: float
    bound: float
    vacuous: bool
    queries: int


def distinguisher_experiment(spec: FamilySpec, q: int, trials: int, rng: random.Random,
                             base: FunctionSpec | None = None) -> DistinguishResult:
    """Non-adaptive level-T distinguisher between D1 and D2.

    The base DNF F is fixed for the whole experiment (drawn from ``spec`` if
    not given); each trial picks the hidden family by a fair coin and, for
    D2, a fresh permutation.  The tester queries ``q`` uniform points on
    level T and answers D2 iff some answer is 1.  The union bound gives
    success <= 1/2 + q * thinness(F).
    """
    if q < 0:
        raise ValueError("q must be >= 0")
    if spec.kind == D1:
        raise ValueError("distinguisher needs a D2 family spec")
    n, T = spec.n, spec.threshold
    if base is None:
        base = draw_base(spec, rng)
    thin = measure_thinness(base, T, 10 ** 5, rng).estimate
    f0 = orc.make_f0(n, spec.C1)
    correct = queries = 0
    for _ in range(trials):
        hidden_d2 = rng.random() < 0.5
        f = with_f0(spec, base, rng) if hidden_d2 else f0
        sess = OracleSession(f)
        said_d2 = False
        for _ in range(q):
            if sess.evaluate(hc.random_point_at_level(n, T, rng)):
                said_d2 = True
        queries += sess.query_count
        correct += said_d2 == hidden_d2
    rate = correct / trials if trials else 0.0
    se = math.sqrt(rate * (1 - rate) / trials) if trials else 0.0
    bound = 0.5 + q * thin
    return DistinguishResult(q, trials, rate, se, thin, bound, bound >= 1.0, queries)


def draw_h_alpha(n: int, alpha: float, rng: random.Random) -> FunctionSpec:
    """Uniform function with exactly round(alpha 2^n) ones, as a truth table."""
    if n > 24:
        raise orc.DimensionError("H^alpha tables are limited to n <= 24")
    size = 1 << n
    k = round(alpha * size)
    if not 0 <= k <= size:
        raise ValueError("alpha out of range")
    gen = np.random.default_rng(rng.getrandbits(64))
    bits = np.zeros(size, dtype=np.uint8)
    bits[gen.choice(size, k, replace=False)] = 1
    return FunctionSpec(n, orc.Table(bits.tobytes()), name="halpha")


def h_alpha_concentration(n: int, alpha: float, deltas, draws: int,
                          rng: random.Random) -> dict[float, float]:
    """Fraction of H^alpha draws with exact NS_delta in [0.1 alpha, 3 alpha], per delta."""
    inside = {d: 0 for d in deltas}
    for _ in range(draws):
        w = exact.spectral_weights(orc.truth_table(draw_h_alpha(n, alpha, rng)))
        for d in deltas:
            ns = exact.ns_from_weights(w, d)
            inside[d] += 0.1 * alpha <= ns <= 3 * alpha
    return {d: c / draws for d, c in inside.items()}


def asymptotic_targets(n: int, C2: float, delta: float | None) -> dict:
    out = {"bias": n ** -C2, "influence": math.sqrt(n) * n ** -C2}
    if delta is not None:
        out["ns"] = (delta * math.sqrt(n) if delta <= 1 / math.sqrt(n) else 1.0) * n ** -C2
    return out


def verify_family_properties(spec: FamilySpec, rng: random.Random, draws: int = 1,
                             epsilon: float = 0.1) -> dict:
    """Bias, influence and NS of D2 draws next to the asymptotic targets.

    Exact for n <= 20; otherwise bias and NS come from standard sampling and
    influence is left out.  Purely informational: the targets carry
    unspecified constants.
    """
    delta = spec.delta if spec.delta is not None else 1 / math.sqrt(spec.n)
    rows = []
    for _ in range(draws):
        f = draw_family(spec, rng)
        if spec.n <= 20:
            tab = orc.truth_table(f)
            w = exact.spectral_weights(tab)
            rows.append({"bias": exact.exact_bias(tab),
                         "influence": exact.influence_edge_scan(tab),
                         "ns": exact.ns_from_weights(w, delta), "exact": True})
        else:
            sess = OracleSession(f)
            rows.append({"bias": std_bias_estimate(sess, epsilon, rng=rng,
                                                   max_trials=10 ** 7).value,
                         "ns": std_ns_estimate(sess, delta, epsilon, rng=rng,
                                               max_trials=10 ** 7).value,
                         "exact": False})
    return {"family": spec.to_dict(), "delta": delta, "threshold": spec.threshold,
            "draws": rows, "targets": asymptotic_targets(spec.n, spec.C2, delta)}


def sandwich(F: FunctionSpec, C1: float, deltas=(0.1,)) -> dict:
    """Exact effect of OR-ing f0 into F, next to the allowed changes.

    Uses the exact bias of f0 in place of n^-C1, which is never larger.
    """
    n = F.n
    f0 = orc.make_f0(n, C1)
    b0 = exact.exact_bias(f0)
    t, t2 = orc.truth_table(F), orc.truth_table(orc.or_(F, f0))
    w, w2 = exact.spectral_weights(t), exact.spectral_weights(t2)
    return {
        "b0": b0,
        "bias": (exact.exact_bias(t), exact.exact_bias(t2)),
        "influence": (exact.influence_edge_scan(t), exact.influence_edge_scan(t2)),
        "ns": {d: (exact.ns_from_weights(w, d), exact.ns_from_weights(w2, d)) for d in deltas},
        "influence_allowance": 2 * n * b0,
        "ns_allowance": 2 * b0,
    }


def f0_properties(n: int, C1: float, deltas=(0.05, 0.1, 0.25, 0.5)) -> dict:
    T = orc.f0_threshold(n, C1)
    tab = orc.truth_table(orc.make_f0(n, C1))
    w = exact.spectral_weights(tab)
    bias = exact.exact_bias(tab)
    return {
        "n": n, "C1": C1, "threshold": T, "bias": bias, "bound": n ** -C1,
        # the next lower threshold misses the bound, so bias > bound / slack
        "slack": orc.binomial_tail(n, T - 1) / bias if bias else math.inf,
        "influence": exact.influence_edge_scan(tab),
        "ns": {d: exact.ns_from_weights(w, d) for d in deltas},
    }
