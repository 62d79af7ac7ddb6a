"""Algorithm constants for the noise-sensitivity estimator."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from . import hypercube as hc

PAPER = "paper"
PRACTICAL = "practical"


def success_target(epsilon: float, mode: str = PRACTICAL) -> int:
    """Number of successes a sequential sampler waits for at accuracy epsilon."""
    if mode == PAPER:
        return math.ceil(768 * math.log(200) / epsilon ** 2)
    return math.ceil(48 / epsilon ** 2)


def walk_length(n: int, epsilon: float, eta1: float, mode: str = PRACTICAL) -> int:
    if n < 2:
        return 1
    if mode == PAPER:
        w = round(epsilon / (3100 * eta1) * math.sqrt(n / hc.LOG(n)))
    else:
        w = math.floor(math.sqrt(n) / hc.LOG(n))
    return min(n, max(1, w))


@dataclass(frozen=True)
class NsParams:
    n: int
    delta: float
    epsilon: float
    C: float
    eta1: float
    eta2: float
    t1: float
    t2: int
    w: int
    kappa: int
    mode: str = PRACTICAL
    influence_epsilon: float = 0.0
    w_attempt_cap: int = 10 ** 6
    edge_attempt_cap: int = 10 ** 8
    loop_cap: int = 10 ** 7
    influence_trial_cap: int = 0

    @classmethod
    def build(cls, n: int, delta: float, epsilon: float, C: float = 1.0,
              mode: str = PRACTICAL, **overrides) -> NsParams:
        """Derive every constant from (n, delta, epsilon, C, mode).

        Any field may be overridden by keyword, e.g. ``t1=0.5`` to narrow the
        middle band in distribution tests.
        """
        if mode not in (PAPER, PRACTICAL):
            raise ValueError(f"unknown mode {mode!r}")
        if not 0 < delta <= 0.5:
            raise ValueError("delta must be in (0, 1/2]")
        if not 0 < epsilon < 1:
            raise ValueError("epsilon must be in (0, 1)")
        eta1 = overrides.pop("eta1", math.sqrt(C) + 4)
        eta2 = overrides.pop("eta2", C + 2)
        ln = hc.LOG(n) if n > 1 else 0.0
        t1 = min(eta1 * math.sqrt(n * ln), n / 2)
        t2 = min(n, max(1, math.ceil(n * delta * (1 + 3 * eta2 * ln))))
        infl_eps = epsilon / 33 if mode == PAPER else epsilon / 4
        kw = dict(
            n=n, delta=delta, epsilon=epsilon, C=C, eta1=eta1, eta2=eta2,
            t1=t1, t2=t2, w=walk_length(n, epsilon, eta1, mode),
            kappa=success_target(epsilon, mode), mode=mode,
            influence_epsilon=infl_eps,
        )
        kw.update(overrides)
        p = cls(**kw)
        p.check()
        return p

    def replace(self, **changes) -> NsParams:
        return dataclasses.replace(self, **changes)

    def check(self) -> None:
        if not 1 <= self.w <= self.n:
            raise ValueError(f"walk length {self.w} outside [1, {self.n}]")
        if not 1 <= self.t2 <= self.n:
            raise ValueError(f"t2={self.t2} outside [1, {self.n}]")
        if self.t1 < 0:
            raise ValueError("t1 must be >= 0")
        lo, hi = self.band
        if lo > hi:
            raise ValueError(f"middle band [{lo}, {hi}] is empty for t1={self.t1}")

    @property
    def band(self) -> tuple[int, int]:
        """Integer levels [lo, hi] inside the middle band; may be empty (lo > hi)."""
        return math.ceil(self.n / 2 - self.t1 - 1e-12), math.floor(self.n / 2 + self.t1 + 1e-12)

    def in_middle(self, e: hc.Edge) -> bool:
        lo, hi = self.band
        return lo <= e.lower_level and e.upper_level <= hi

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)
