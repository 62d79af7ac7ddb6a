"""Sublinear-query noise-sensitivity estimation for monotone functions.

The estimator splits NS_d[f] = 2 Pr[f(x)=1, f(z)=0] into
``p_A`` (the Phase-1 descent x -> y crosses an influential edge) and
``p_B`` (the Phase-2 ascent y -> z then stays below it).  ``p_A`` is about
d I[f] / 2 and comes from an influence estimate; ``p_B`` is estimated by
sampling an influential edge (:func:`sample_edge_A`), drawing Process-D
paths through it (:func:`sample_paths_B`) and checking f(z).
"""
from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field

from . import hypercube as hc
from .estimators import CapExceeded, influence_estimate, make_rng, require_monotone
from .oracle import OracleSession
from .params import NsParams


class InfluenceCapExceeded(CapExceeded):
    pass


class EdgeSamplerCapExceeded(CapExceeded):
    pass


class LoopCapExceeded(CapExceeded):
    pass


class LengthSamplerCapExceeded(CapExceeded):
    pass


@dataclass(frozen=True)
class PathPair:
    P1: hc.Path
    P2: hc.Path
    x: int
    y: int
    z: int


@dataclass
class NsReport:
    estimate: float
    influence_estimate: float
    p_tilde_A: float
    p_tilde_B: float
    queries: int
    influence_queries: int
    edge_sampler_attempts: int
    loop_iterations: int
    successes: int
    seed: object = None
    w_attempts: int = 0
    w_clamped: int = 0
    params: dict = field(default_factory=dict)

    @property
    def phi(self) -> float:
        return self.successes / self.loop_iterations if self.loop_iterations else 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def in_middle(e: hc.Edge, params: NsParams) -> bool:
    return params.in_middle(e)


def sample_edge_A(session: OracleSession, params: NsParams, rng: random.Random,
                  check: bool = False) -> hc.Edge | None:
    """One attempt of the edge sampler; ``None`` on failure.

    Descends ``params.w`` steps from a uniform x.  If the endpoints disagree,
    a binary search along the path finds the influential edge it crossed;
    the edge is returned only if it lies in the middle band.
    """
    n, q = session.n, session._query
    x = rng.getrandbits(n)
    flips = rng.sample(hc.ones(x), min(params.w, x.bit_count()))
    y = x
    for i in flips:
        y &= ~(1 << i)
    fx, fy = q(x), q(y)
    if fx == fy:
        return None
    verts = [x]
    for i in flips:
        verts.append(verts[-1] & ~(1 << i))
    lo, hi = 0, len(flips)
    seen = {0: fx, hi: fy}
    while hi - lo > 1:
        mid = (lo + hi) // 2
        fm = q(verts[mid])
        seen[mid] = fm
        if fm == fx:
            lo = mid
        else:
            hi = mid
    if check:
        vals = [seen[k] for k in sorted(seen)]
        assert all(a >= b for a, b in zip(vals, vals[1:])), f"values along P1 not monotone: {vals}"
    e = hc.Edge(verts[hi], flips[lo])
    if check:
        assert seen[lo] != seen[hi], "binary search ended on a non-influential edge"
    return e if params.in_middle(e) else None


def sample_lengths_W(e: hc.Edge, params: NsParams, rng: random.Random,
                     diag: dict | None = None) -> tuple[int, int]:
    """Rejection-sample (w1, w2) for Phase-1 paths crossing the layer of e.

    Draw a start level uniformly in [L(v1), L(v1) + t2 - 1] (clamped to n),
    a start point on it, and a Phase-1 walk; accept once the walk crosses
    the layer.  w1 is the gap from the start to v1, w2 from v2 to the end.
    """
    n = params.n
    u, v2 = e.upper_level, e.lower_level
    hi = u + params.t2 - 1
    if hi > n:
        hi = n
        if diag is not None:
            diag["w_clamped"] = diag.get("w_clamped", 0) + 1
    delta, rand = params.delta, rng.random
    for attempt in range(1, params.w_attempt_cap + 1):
        l = rng.randint(u, hi)
        # the lengths depend only on how many of the l set bits flip, not on
        # which start point or visiting order produced them
        flips = 0
        for _ in range(l):
            if rand() < delta:
                flips += 1
        end = l - flips
        if end <= v2:
            if diag is not None:
                diag["w_attempts"] = diag.get("w_attempts", 0) + attempt
            return l - u, v2 - end
    raise LengthSamplerCapExceeded(
        f"length sampler made {params.w_attempt_cap} attempts without crossing the layer")


def sample_paths_B(e: hc.Edge, params: NsParams, rng: random.Random,
                   diag: dict | None = None) -> PathPair:
    """Draw Process-D paths P1 (through e) and P2; makes no oracle queries."""
    n = params.n
    w1, w2 = sample_lengths_W(e, params, rng, diag)
    up = hc.ascending_walk(e.upper, n, w1, rng)
    down = hc.descending_walk(e.lower, w2, rng)
    x = up.end
    P1 = hc.Path(x, tuple(reversed(up.flips)) + (e.coord,) + down.flips, hc.DESCENDING)
    y = P1.end
    P2 = hc.phase2_walk(y, hc.zeros(x, n), params.delta, rng)
    return PathPair(P1, P2, x, y, P2.end)


def estimate_ns(session: OracleSession, params: NsParams, rng: random.Random | None = None, *,
                seed=None, check: bool = False, force: bool = False) -> NsReport:
    """Estimate NS_delta[f] as 2 * (delta * I~ / 2) * p~_B.

    Raises :class:`InfluenceCapExceeded` (e.g. for constant functions),
    :class:`EdgeSamplerCapExceeded` or :class:`LoopCapExceeded`; none of
    them fabricates an estimate.
    """
    if params.n != session.n:
        raise ValueError("params dimension does not match the function")
    require_monotone(session, force)
    rng = make_rng(rng, seed)
    q = session._query
    start = session.query_count
    infl = influence_estimate(
        session, params.influence_epsilon, params.C, w=params.w, mode=params.mode,
        rng=rng, seed=seed, max_trials=params.influence_trial_cap or None, force=True)
    if infl.cap_reached:
        raise InfluenceCapExceeded(
            f"influence stage hit its cap after {infl.trials} trials; I[f] is likely "
            f"below n^-{params.C}", infl)
    p_a = params.delta * infl.value / 2

    diag: dict = {}
    alpha = beta = attempts = 0
    while alpha < params.kappa:
        while True:
            attempts += 1
            if attempts > params.edge_attempt_cap:
                raise EdgeSamplerCapExceeded(
                    f"edge sampler failed {params.edge_attempt_cap} times")
            e = sample_edge_A(session, params, rng, check)
            if e is not None:
                break
        pp = sample_paths_B(e, params, rng, diag)
        fx, fz = q(pp.x), q(pp.z)
        if check:
            assert fx == 1, "x above an influential edge must evaluate to 1"
        if fx == 1 and fz == 0:
            alpha += 1
        beta += 1
        if beta >= params.loop_cap and alpha < params.kappa:
            raise LoopCapExceeded(f"main loop ran {beta} iterations with {alpha} successes")
    p_b = alpha / beta
    return NsReport(
        estimate=2 * p_a * p_b, influence_estimate=infl.value, p_tilde_A=p_a, p_tilde_B=p_b,
        queries=session.query_count - start, influence_queries=infl.queries,
        edge_sampler_attempts=attempts, loop_iterations=beta, successes=alpha, seed=seed,
        w_attempts=diag.get("w_attempts", 0), w_clamped=diag.get("w_clamped", 0),
        params=params.to_dict())
