"""Standard-sampling baselines and the descending-walk influence estimator.

All estimators stop sequentially: they sample until ``kappa`` successes
have been seen (or a trial cap is hit), which needs no prior knowledge of
the target's magnitude.  Passing ``trials=N`` instead fixes the sample size.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass, field

from . import hypercube as hc
from .oracle import OracleSession, table_is_monotone, truth_table
from .params import PRACTICAL, success_target, walk_length


class CapExceeded(RuntimeError):
    """A sampling loop hit its cap before reaching its success target."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class NotMonotone(ValueError):
    pass


@dataclass
class EstimateReport:
    method: str
    value: float
    queries: int
    trials: int
    successes: int
    seed: object = None
    mode: str = PRACTICAL
    cap_reached: bool = False
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def make_rng(rng=None, seed=None) -> random.Random:
    if rng is not None:
        return rng
    return random.Random(seed)


def require_monotone(session: OracleSession, force: bool = False) -> None:
    """Refuse functions that are not monotone (checked exhaustively for n <= 20)."""
    if force or session.spec.monotone_by_construction:
        return
    if session.n <= 20:
        if table_is_monotone(truth_table(session.spec), session.n):
            return
        raise NotMonotone("function is not monotone; pass force=True to run anyway")
    raise NotMonotone("cannot certify monotonicity for n > 20; pass force=True")


def _run(trial, kappa: int, max_trials: int | None, trials: int | None):
    """Drive ``trial()`` sequentially; returns (trials, successes, cap_reached)."""
    t = s = 0
    if trials is not None:
        for _ in range(trials):
            s += trial()
        return trials, s, False
    while s < kappa:
        if max_trials is not None and t >= max_trials:
            return t, s, True
        s += trial()
        t += 1
    return t, s, False


def noise_mask(n: int, delta: float, rng: random.Random) -> int:
    m = 0
    rand = rng.random
    for i in range(n):
        if rand() < delta:
            m |= 1 << i
    return m


def std_ns_estimate(session: OracleSession, delta: float, epsilon: float = 0.1, *,
                    kappa: int | None = None, mode: str = PRACTICAL,
                    max_trials: int | None = None, trials: int | None = None,
                    rng: random.Random | None = None, seed=None) -> EstimateReport:
    """Fraction of noisy pairs (x, z) with f(x) != f(z); 2 queries per pair."""
    if not 0 < delta <= 0.5:
        raise ValueError("delta must be in (0, 1/2]")
    rng = make_rng(rng, seed)
    kappa = kappa or success_target(epsilon, mode)
    n, q = session.n, session._query
    start = session.query_count

    def trial():
        x = rng.getrandbits(n)
        z = x ^ noise_mask(n, delta, rng)
        return int(q(x) != q(z))

    t, s, capped = _run(trial, kappa, max_trials, trials)
    return EstimateReport("ns-std", s / t if t else 0.0, session.query_count - start, t, s,
                          seed, mode, capped,
                          {"delta": delta, "epsilon": epsilon, "kappa": kappa, "n": n})


def std_bias_estimate(session: OracleSession, epsilon: float = 0.1, *,
                      kappa: int | None = None, mode: str = PRACTICAL,
                      max_trials: int | None = None, trials: int | None = None,
                      rng: random.Random | None = None, seed=None) -> EstimateReport:
    rng = make_rng(rng, seed)
    kappa = kappa or success_target(epsilon, mode)
    n, q = session.n, session._query
    start = session.query_count

    def trial():
        return q(rng.getrandbits(n))

    t, s, capped = _run(trial, kappa, max_trials, trials)
    return EstimateReport("bias", s / t if t else 0.0, session.query_count - start, t, s,
                          seed, mode, capped, {"epsilon": epsilon, "kappa": kappa, "n": n})


def default_influence_cap(n: int, kappa: int, w: int, C: float) -> int:
    """Trials after which I[f] < n^-C is the likely explanation (4x the expected count)."""
    return math.ceil(4 * kappa * n ** (C + 1) / w)


def influence_estimate(session: OracleSession, epsilon: float = 0.1, C: float = 1.0, *,
                       w: int | None = None, kappa: int | None = None,
                       mode: str = PRACTICAL, max_trials: int | None = None,
                       trials: int | None = None, rng: random.Random | None = None,
                       seed=None, force: bool = False) -> EstimateReport:
    """Walk-based influence estimate n * successes / (w * trials).

    Each trial descends ``w`` steps from a uniform point and succeeds when
    the endpoints disagree, which happens with probability about I[f] w / n.
    """
    require_monotone(session, force)
    rng = make_rng(rng, seed)
    n, q = session.n, session._query
    if w is None:
        w = walk_length(n, epsilon, math.sqrt(C) + 4, mode)
    kappa = kappa or success_target(epsilon, mode)
    if max_trials is None:
        max_trials = default_influence_cap(n, kappa, w, C)
    start = session.query_count

    def trial():
        x = rng.getrandbits(n)
        y = x
        for i in rng.sample(hc.ones(x), min(w, x.bit_count())):
            y &= ~(1 << i)
        return int(q(x) != q(y))

    t, s, capped = _run(trial, kappa, max_trials, trials)
    value = n * s / (w * t) if t else 0.0
    return EstimateReport("influence", value, session.query_count - start, t, s, seed, mode,
                          capped, {"epsilon": epsilon, "C": C, "w": w, "kappa": kappa,
                                   "n": n, "max_trials": max_trials})
