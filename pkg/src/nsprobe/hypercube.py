"""Points, edges and random walks on the Boolean hypercube {0,1}^n.

Points are plain Python ints used as bit masks: bit ``i`` of the int is
coordinate ``i``.  Python ints are unbounded, so the same representation
covers n > 64 without a separate code path.  The dimension travels
alongside the point wherever it matters.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

# Natural log by default; switch to math.log2 for base-sensitivity runs.
LOG = math.log

DESCENDING = "descending"
ASCENDING = "ascending"

Point = int


def level(p: Point) -> int:
    return p.bit_count()


def precedes(p: Point, q: Point) -> bool:
    """Coordinatewise order: p <= q iff every set bit of p is set in q."""
    return p & q == p


def full(n: int) -> Point:
    return (1 << n) - 1


def ones(p: Point) -> list[int]:
    """Indices of the set coordinates, ascending."""
    out = []
    i = 0
    while p:
        if p & 1:
            out.append(i)
        p >>= 1
        i += 1
    return out


def zeros(p: Point, n: int) -> list[int]:
    return ones(full(n) & ~p)


def from_bits(bits: Sequence[int]) -> Point:
    p = 0
    for i, b in enumerate(bits):
        if b not in (0, 1, True, False):
            raise ValueError(f"bit {i} is {b!r}, expected 0 or 1")
        if b:
            p |= 1 << i
    return p


def to_bits(p: Point, n: int) -> list[int]:
    return [(p >> i) & 1 for i in range(n)]


def from_string(s: str) -> Point:
    """Parse a bit string written coordinate 0 first, e.g. ``"10110"``."""
    return from_bits([int(c) for c in s])


@dataclass(frozen=True)
class Edge:
    """Hypercube edge given by its lower endpoint and the flipped coordinate."""

    lower: Point
    coord: int

    def __post_init__(self):
        if self.lower >> self.coord & 1:
            raise ValueError(f"coordinate {self.coord} is already set in the lower endpoint")

    @property
    def upper(self) -> Point:
        return self.lower | (1 << self.coord)

    @property
    def lower_level(self) -> int:
        return level(self.lower)

    @property
    def upper_level(self) -> int:
        return level(self.lower) + 1

    def same_layer(self, other: Edge) -> bool:
        return self.lower_level == other.lower_level


@dataclass(frozen=True)
class Path:
    """A walk recorded as its start point and the ordered coordinate flips."""

    start: Point
    flips: tuple[int, ...]
    direction: str = DESCENDING

    def __len__(self):
        return len(self.flips)

    @property
    def end(self) -> Point:
        p = self.start
        for i in self.flips:
            p ^= 1 << i
        return p

    def vertices(self) -> list[Point]:
        out = [self.start]
        p = self.start
        for i in self.flips:
            p ^= 1 << i
            out.append(p)
        return out

    def edges(self) -> list[Edge]:
        out = []
        p = self.start
        for i in self.flips:
            q = p ^ (1 << i)
            out.append(Edge(min(p, q), i))
            p = q
        return out

    def is_valid(self) -> bool:
        p = self.start
        want = 1 if self.direction == DESCENDING else 0
        for i in self.flips:
            if (p >> i) & 1 != want:
                return False
            p ^= 1 << i
        return True

    def reversed(self) -> Path:
        other = ASCENDING if self.direction == DESCENDING else DESCENDING
        return Path(self.end, tuple(reversed(self.flips)), other)


def random_point(n: int, rng: random.Random) -> Point:
    if n < 1:
        raise ValueError("n must be >= 1")
    return rng.getrandbits(n)


def random_point_at_level(n: int, l: int, rng: random.Random) -> Point:
    if not 0 <= l <= n:
        raise ValueError(f"level {l} outside [0, {n}]")
    p = 0
    for i in rng.sample(range(n), l):
        p |= 1 << i
    return p


def descending_walk(x: Point, steps: int, rng: random.Random) -> Path:
    """Clear a uniformly random set coordinate per step; stops early at all-zeros."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    avail = ones(x)
    k = min(steps, len(avail))
    return Path(x, tuple(rng.sample(avail, k)), DESCENDING)


def ascending_walk(v: Point, n: int, steps: int, rng: random.Random) -> Path:
    avail = zeros(v, n)
    if steps < 0 or steps > len(avail):
        raise ValueError(f"cannot ascend {steps} steps from level {level(v)} in dimension {n}")
    return Path(v, tuple(rng.sample(avail, steps)), ASCENDING)


def _noisy_pass(start: Point, coords: list[int], delta: float, rng: random.Random,
                direction: str) -> Path:
    order = coords[:]
    rng.shuffle(order)
    flips = tuple(i for i in order if rng.random() < delta)
    return Path(start, flips, direction)


def phase1_walk(x: Point, delta: float, rng: random.Random) -> Path:
    """Visit the set coordinates of x in random order, clearing each w.p. delta."""
    if not 0 < delta <= 1:
        raise ValueError("delta must be in (0, 1]")
    return _noisy_pass(x, ones(x), delta, rng, DESCENDING)


def phase2_walk(y: Point, zero_set: Sequence[int], delta: float,
                rng: random.Random) -> Path:
    """Visit ``zero_set`` in random order, setting each coordinate w.p. delta."""
    if not 0 < delta <= 1:
        raise ValueError("delta must be in (0, 1]")
    coords = sorted(zero_set)
    for i in coords:
        if (y >> i) & 1:
            raise ValueError(f"coordinate {i} of zero_set is set in the start point")
    return _noisy_pass(y, coords, delta, rng, ASCENDING)


# -- binomial utilities --------------------------------------------------

def log_binom(n: int, k: int) -> float:
    if k < 0 or k > n:
        return -math.inf
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def binom_pmf(k: int, l: int, delta: float) -> float:
    if k < 0 or k > l:
        return 0.0
    if delta == 0.0:
        return 1.0 if k == 0 else 0.0
    if delta == 1.0:
        return 1.0 if k == l else 0.0
    return math.exp(log_binom(l, k) + k * math.log(delta) + (l - k) * math.log1p(-delta))


def phase1_length_tail(l: int, w: int, delta: float) -> float:
    """Pr[Binomial(l, delta) >= w]: chance a Phase-1 walk from level l takes >= w steps."""
    if w <= 0:
        return 1.0
    if w > l:
        return 0.0
    # sum the shorter side to limit cancellation
    if w > l * delta:
        return min(1.0, math.fsum(binom_pmf(k, l, delta) for k in range(w, l + 1)))
    return max(0.0, 1.0 - math.fsum(binom_pmf(k, l, delta) for k in range(w)))


def binom_ratio(n: int, l1: int, l2: int) -> float:
    return math.exp(log_binom(n, l1) - log_binom(n, l2))


def exact_binom_ratio(n: int, l1: int, l2: int) -> Fraction:
    return Fraction(math.comb(n, l1), math.comb(n, l2))


def continuity_check(n: int, l1: int, l2: int, xi: float) -> tuple[float, bool]:
    """Ratio C(n,l1)/C(n,l2) and whether it lies in [1 - xi, 1 + xi]."""
    if not 0 <= l1 <= l2 <= n:
        raise ValueError("need 0 <= l1 <= l2 <= n")
    if not 0 <= xi <= 1:
        raise ValueError("xi must be in [0, 1]")
    r = binom_ratio(n, l1, l2)
    return r, 1 - xi <= r <= 1 + xi


def continuity_window(n: int, C1: float, xi: float) -> int:
    """Largest level gap the continuity lemma allows: floor(C2 xi sqrt(n / log n))."""
    C2 = 1 / (10 * math.sqrt(C1))
    return math.floor(C2 * xi * math.sqrt(n / LOG(n)))
