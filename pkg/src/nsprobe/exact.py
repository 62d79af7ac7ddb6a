"""Exact ground truth: truth tables, Walsh-Hadamard spectra, and Process D.

Fourier quantities use the +-1 convention g = 1 - 2f, under which Parseval
gives sum_S g^(S)^2 = 1 and

    I[f]      = sum_S |S| g^(S)^2
    NS_d[f]   = 1/2 sum_S (1 - (1-2d)^|S|) g^(S)^2
    Stab_r[f] = sum_S r^|S| g^(S)^2

Everything here is brute force over the cube; keep n small.
"""
from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from . import hypercube as hc
from .oracle import DimensionError, FunctionSpec, table_is_monotone, truth_table
from .params import NsParams

PROCESS_D_MAX_N = 6
BRUTE_FORCE_MAX_N = 4


def as_table(f) -> np.ndarray:
    if isinstance(f, FunctionSpec):
        return truth_table(f)
    return np.asarray(f, dtype=np.uint8)


def table_dim(tab: np.ndarray) -> int:
    n = int(len(tab)).bit_length() - 1
    if 1 << n != len(tab):
        raise ValueError(f"table length {len(tab)} is not a power of two")
    return n


def popcounts(n: int) -> np.ndarray:
    return np.bitwise_count(np.arange(1 << n, dtype=np.uint64)).astype(np.int64)


def walsh_hadamard(vec: np.ndarray) -> np.ndarray:
    """Unnormalized in-place butterfly, O(n 2^n)."""
    a = np.array(vec, dtype=np.float64)
    n = table_dim(a)
    for i in range(n):
        v = a.reshape(-1, 2, 1 << i)
        lo = v[:, 0, :].copy()
        v[:, 0, :] += v[:, 1, :]
        v[:, 1, :] = lo - v[:, 1, :]
    return a


def fourier(f) -> np.ndarray:
    """Coefficients g^(S) of g = 1 - 2f, indexed by the subset mask S."""
    tab = as_table(f)
    return walsh_hadamard(1.0 - 2.0 * tab) / len(tab)


def spectral_weights(f) -> np.ndarray:
    """W[k] = sum over |S| = k of g^(S)^2."""
    coef = fourier(f)
    n = table_dim(coef)
    return np.bincount(popcounts(n), weights=coef ** 2, minlength=n + 1)


def exact_bias(f) -> float:
    tab = as_table(f)
    return float(np.count_nonzero(tab)) / len(tab)


def influential_edge_count(tab: np.ndarray) -> int:
    n = table_dim(tab)
    total = 0
    for i in range(n):
        v = tab.reshape(-1, 2, 1 << i)
        total += int(np.count_nonzero(v[:, 0, :] != v[:, 1, :]))
    return total


def influence_edge_scan(f) -> float:
    tab = as_table(f)
    n = table_dim(tab)
    return influential_edge_count(tab) / 2 ** (n - 1)


def influence_fourier(f) -> float:
    w = spectral_weights(f)
    return float(np.dot(np.arange(len(w)), w))


def exact_influence(f) -> tuple[float, float]:
    """(edge-scan value, Fourier value); these must agree."""
    tab = as_table(f)
    return influence_edge_scan(tab), influence_fourier(tab)


def ns_from_weights(w: np.ndarray, delta: float) -> float:
    k = np.arange(len(w))
    return float(0.5 * np.dot(1.0 - (1.0 - 2.0 * delta) ** k, w))


def exact_ns(f, delta: float) -> float:
    if not 0 < delta <= 0.5:
        raise ValueError("delta must be in (0, 1/2]")
    return ns_from_weights(spectral_weights(f), delta)


def exact_ns_direct(f, delta: float) -> float:
    """Pairwise sum over all (x, z): O(4^n), n <= 10 only."""
    tab = as_table(f)
    n = table_dim(tab)
    if n > 10:
        raise DimensionError("direct pairwise noise sensitivity is limited to n <= 10")
    xs = np.arange(1 << n, dtype=np.uint64)
    d = np.bitwise_count(xs[:, None] ^ xs[None, :]).astype(np.int64)
    weight = delta ** d * (1.0 - delta) ** (n - d)
    diff = tab[:, None] != tab[None, :]
    return float(np.sum(weight * diff) / 2 ** n)


def exact_stability(f, rho: float) -> float:
    if not -1 <= rho <= 1:
        raise ValueError("rho must be in [-1, 1]")
    w = spectral_weights(f)
    return float(np.dot(rho ** np.arange(len(w)), w))


def influential_edges(tab: np.ndarray) -> list[hc.Edge]:
    n = table_dim(tab)
    out = []
    for x in range(1 << n):
        for i in range(n):
            if not (x >> i) & 1 and tab[x] != tab[x | (1 << i)]:
                out.append(hc.Edge(x, i))
    return out


# -- walk hitting probabilities --------------------------------------------

def layer_hit_probability(n: int, lower_level: int, w: int) -> float:
    """Pr that a w-step descending walk from a uniform point crosses a given edge.

    A walk crosses the layer of an edge with upper level u iff it starts at a
    level in [u, u + w - 1]; within the layer every edge is equally likely.
    """
    u = lower_level + 1
    mass = sum(math.comb(n, l) for l in range(u, min(n, u + w - 1) + 1)) / 2 ** n
    return mass / (u * math.comb(n, u))


def walk_edge_law(f, w: int, params: NsParams | None = None) -> dict[hc.Edge, float]:
    """Pr[a w-step descending walk from uniform x crosses e] for influential e.

    With ``params`` only middle edges are kept.  For a monotone f these
    events are disjoint, so the values sum to the walk's success rate.
    """
    tab = as_table(f)
    n = table_dim(tab)
    out = {}
    for e in influential_edges(tab):
        if params is not None and not params.in_middle(e):
            continue
        out[e] = layer_hit_probability(n, e.lower_level, w)
    return out


def influence_walk_success(f, w: int) -> float:
    """Exact per-trial Pr[f(x) != f(y)] of the w-step influence walk."""
    return sum(walk_edge_law(f, w).values())


def edge_sampler_law(f, params: NsParams) -> dict[hc.Edge, float]:
    """Output law of the edge sampler conditioned on success."""
    law = walk_edge_law(f, params.w, params)
    z = sum(law.values())
    return {e: p / z for e, p in law.items()}


# -- the length sampler loop, enumerated -------------------------------------

def w_level_range(e: hc.Edge, params: NsParams) -> tuple[int, int]:
    u = e.upper_level
    return u, min(params.n, u + params.t2 - 1)


def length_sampler_law(e: hc.Edge, params: NsParams) -> dict[tuple[int, int], float]:
    """Exact output law of the (w1, w2) rejection loop, by full enumeration.

    Enumerates every start level in the range, every start point on that
    level and every subset of flipped coordinates; the loop's output law is
    the accepted mass renormalized.
    """
    n, delta = params.n, params.delta
    lo, hi = w_level_range(e, params)
    u, v2 = e.upper_level, e.lower_level
    acc: dict[tuple[int, int], float] = defaultdict(float)
    for l in range(lo, hi + 1):
        pts = [sum(1 << i for i in c) for c in itertools.combinations(range(n), l)]
        for x in pts:
            s1 = hc.ones(x)
            for k in range(l + 1):
                for flipped in itertools.combinations(s1, k):
                    p = delta ** k * (1 - delta) ** (l - k) / len(pts) / (hi - lo + 1)
                    end = l - len(flipped)
                    if end <= v2:
                        acc[(l - u, v2 - end)] += p
    z = sum(acc.values())
    return {k: v / z for k, v in acc.items()}


# -- Process D -------------------------------------------------------------

@dataclass
class ProcessDExact:
    n: int
    delta: float
    ns: float
    p_A: float
    p_B: float
    p_e: dict = field(default_factory=dict)
    q_e: dict = field(default_factory=dict)
    pr_E1: float = 0.0
    pr_E2: float = 0.0
    pr_x1_z0_good: float = 0.0  # Pr[f(x)=1, f(z)=0, no bad event]

    @property
    def sum_p_e(self) -> float:
        return math.fsum(self.p_e.values())

    @property
    def sum_p_e_q_e(self) -> float:
        return math.fsum(self.p_e[e] * self.q_e[e] for e in self.p_e)


def _phase2_zero_prob(tab, y: int, s0: list[int], delta: float) -> float:
    """Pr[f(z) = 0] when z sets each coordinate of s0 in y independently w.p. delta."""
    tot = 0.0
    m = len(s0)
    for k in range(m + 1):
        pk = delta ** k * (1 - delta) ** (m - k)
        for g in itertools.combinations(s0, k):
            z = y
            for i in g:
                z |= 1 << i
            if tab[z] == 0:
                tot += pk
    return tot


def _crossings(tab, x: int, order) -> list[tuple[int, hc.Edge]]:
    """Influential edges along a descending path, each with its step index.

    The step index equals L(x) - L(v1) for the edge's upper end v1.
    """
    out = []
    p = x
    for step, i in enumerate(order):
        q = p & ~(1 << i)
        if tab[p] != tab[q]:
            out.append((step, hc.Edge(q, i)))
        p = q
    return out


class _Acc:
    def __init__(self):
        self.ns_half = 0.0
        self.p_A = 0.0
        self.good = 0.0
        self.E1 = 0.0
        self.E2 = 0.0
        self.pe = defaultdict(float)
        self.pe_q = defaultdict(float)

    def path(self, tab, params, x, order, prob, zero_prob):
        """Account one ordered Phase-1 path of probability ``prob``."""
        y = x
        for i in order:
            y &= ~(1 << i)
        cross = _crossings(tab, x, order)
        if len(cross) > 1:
            raise ValueError("Phase-1 path crosses several influential edges; f is not monotone")
        e1 = e2 = False
        edge = None
        if cross:
            step, edge = cross[0]
            e1 = step >= params.t2
            e2 = not params.in_middle(edge)
        self.E1 += prob * e1
        self.E2 += prob * e2
        fx1 = tab[x] == 1
        self.ns_half += prob * fx1 * zero_prob
        if e1 or e2:
            return
        if fx1 and tab[y] == 0:
            self.p_A += prob
            self.good += prob * zero_prob
        if edge is not None:
            self.pe[edge] += prob
            self.pe_q[edge] += prob * zero_prob

    def result(self, n, delta) -> ProcessDExact:
        p_B = self.good / self.p_A if self.p_A > 0 else 0.0
        q_e = {e: self.pe_q[e] / p for e, p in self.pe.items() if p > 0}
        return ProcessDExact(n, delta, ns=2 * self.ns_half, p_A=self.p_A, p_B=p_B,
                             p_e=dict(self.pe), q_e=q_e, pr_E1=self.E1, pr_E2=self.E2,
                             pr_x1_z0_good=self.good)


def process_d_exact(f, params: NsParams) -> ProcessDExact:
    """Exact Process-D probabilities by enumeration (n <= 6).

    The flipped set of each phase is enumerated with its binomial weight.
    Within Phase 1 the order of the flipped coordinates is uniform and only
    matters when the path changes value (f(x) = 1, f(y) = 0); those orders
    are enumerated, the rest are integrated out.  Phase 2 enters only
    through Pr[f(z) = 0 | y], summed over its flip sets.
    """
    tab = as_table(f)
    n = table_dim(tab)
    if n > PROCESS_D_MAX_N:
        raise DimensionError(f"process D enumeration is limited to n <= {PROCESS_D_MAX_N}")
    if params.n != n:
        raise ValueError("params dimension does not match the function")
    if not table_is_monotone(tab, n):
        raise ValueError("process D decomposition needs a monotone function")
    delta = params.delta
    acc = _Acc()
    for x in range(1 << n):
        s1, s0 = hc.ones(x), hc.zeros(x, n)
        l = len(s1)
        for k in range(l + 1):
            pk = delta ** k * (1 - delta) ** (l - k) / 2 ** n
            for F in itertools.combinations(s1, k):
                y = x
                for i in F:
                    y &= ~(1 << i)
                zero_prob = _phase2_zero_prob(tab, y, s0, delta)
                if tab[x] == tab[y]:
                    # monotone: constant along every ordering, nothing crossed
                    acc.path(tab, params, x, (), pk, zero_prob)
                    continue
                orders = list(itertools.permutations(F))
                for order in orders:
                    acc.path(tab, params, x, order, pk / len(orders), zero_prob)
    return acc.result(n, delta)


def process_d_brute_force(f, params: NsParams) -> ProcessDExact:
    """Same quantities by enumerating traversal orders and every coin flip (n <= 4)."""
    tab = as_table(f)
    n = table_dim(tab)
    if n > BRUTE_FORCE_MAX_N:
        raise DimensionError(f"brute-force process D is limited to n <= {BRUTE_FORCE_MAX_N}")
    delta = params.delta
    acc = _Acc()
    for x in range(1 << n):
        s1, s0 = hc.ones(x), hc.zeros(x, n)
        orders1 = list(itertools.permutations(s1))
        orders0 = list(itertools.permutations(s0))
        for o1 in orders1:
            for coins1 in itertools.product((0, 1), repeat=len(s1)):
                p1 = math.prod(delta if c else 1 - delta for c in coins1)
                path = tuple(i for i, c in zip(o1, coins1) if c)
                y = x
                for i in path:
                    y &= ~(1 << i)
                zero_prob = 0.0
                for o0 in orders0:
                    for coins0 in itertools.product((0, 1), repeat=len(s0)):
                        p0 = math.prod(delta if c else 1 - delta for c in coins0)
                        z = y
                        for i, c in zip(o0, coins0):
                            if c:
                                z |= 1 << i
                        if tab[z] == 0:
                            zero_prob += p0 / len(orders0)
                acc.path(tab, params, x, path, p1 / len(orders1) / 2 ** n, zero_prob)
    return acc.result(n, delta)


def conditional_path_law(f, params: NsParams, e: hc.Edge) -> dict[tuple, float]:
    """Process-D law of (x, P1 flips, P2 flips) given e in P1 and no bad event.

    Only paths through e are enumerated: x must contain the upper end of e,
    P1 must clear the extra coordinates of x first, then e's coordinate.
    """
    tab = as_table(f)
    n = table_dim(tab)
    if n > PROCESS_D_MAX_N:
        raise DimensionError(f"conditional path law is limited to n <= {PROCESS_D_MAX_N}")
    delta = params.delta
    v1 = e.upper
    u = hc.level(v1)
    law: dict[tuple, float] = defaultdict(float)
    for x in range(1 << n):
        if not hc.precedes(v1, x):
            continue
        gap = hc.level(x) - u
        if gap >= params.t2:
            continue  # E1
        s1, s0 = hc.ones(x), hc.zeros(x, n)
        head = set(hc.ones(x & ~v1))
        for k in range(gap + 1, len(s1) + 1):
            pk = delta ** k * (1 - delta) ** (len(s1) - k) / 2 ** n
            for F in itertools.combinations(s1, k):
                if e.coord not in F or not head <= set(F):
                    continue
                orders = list(itertools.permutations(F))
                for order in orders:
                    if set(order[:gap]) != head or order[gap] != e.coord:
                        continue
                    cross = _crossings(tab, x, order)
                    if any(not params.in_middle(c) for _, c in cross):
                        continue  # E2
                    y = x
                    for i in order:
                        y &= ~(1 << i)
                    p1 = pk / len(orders)
                    for j in range(len(s0) + 1):
                        pj = delta ** j * (1 - delta) ** (len(s0) - j)
                        for G in itertools.combinations(s0, j):
                            o2s = list(itertools.permutations(G))
                            for o2 in o2s:
                                law[(x, order, o2)] += p1 * pj / len(o2s)
    z = sum(law.values())
    if z == 0:
        return {}
    return {k: v / z for k, v in law.items()}


def total_variation(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def _ordered_walk_prob(avail: int, steps: int) -> float:
    """Probability of one specific ordered choice of ``steps`` coordinates out of ``avail``."""
    return 1.0 / math.perm(avail, steps)


def path_sampler_law(e: hc.Edge, params: NsParams) -> dict[tuple, float]:
    """Exact output law of the path-pair sampler: (x, P1 flips, P2 flips) -> prob.

    Built from :func:`length_sampler_law` and the uniform walks that extend
    the edge upward and downward; P2 is the Phase-2 pass over the zeros of x.
    """
    n, delta = params.n, params.delta
    v1, v2 = e.upper, e.lower
    up_free, down_free = hc.zeros(v1, n), hc.ones(v2)
    law: dict[tuple, float] = defaultdict(float)
    for (w1, w2), pw in length_sampler_law(e, params).items():
        pu = _ordered_walk_prob(len(up_free), w1)
        pd = _ordered_walk_prob(len(down_free), w2)
        for up in itertools.permutations(up_free, w1):
            x = v1
            for i in up:
                x |= 1 << i
            s0 = hc.zeros(x, n)
            for down in itertools.permutations(down_free, w2):
                p1 = tuple(reversed(up)) + (e.coord,) + down
                for j in range(len(s0) + 1):
                    pj = delta ** j * (1 - delta) ** (len(s0) - j)
                    for G in itertools.combinations(s0, j):
                        o2s = list(itertools.permutations(G))
                        for o2 in o2s:
                            law[(x, p1, o2)] += pw * pu * pd * pj / len(o2s)
    return dict(law)
