import math
import random

import pytest

from nsprobe import exact
from nsprobe import oracle as orc
from nsprobe.estimators import (NotMonotone, influence_estimate, std_bias_estimate,
                                std_ns_estimate)
from nsprobe.oracle import OracleSession
from nsprobe.params import PAPER, success_target, walk_length


def within(values, lo, hi):
    return sum(lo <= v <= hi for v in values)


def test_success_targets():
    assert success_target(0.1) == 4800
    assert success_target(0.25) == 768
    assert success_target(0.1, PAPER) == math.ceil(768 * math.log(200) / 0.01)


def test_walk_length_modes():
    assert walk_length(20, 0.25, 5.0) == 1
    assert walk_length(100, 0.25, 5.0) == 2
    assert walk_length(10 ** 4, 0.25, 5.0, PAPER) == 1


def test_std_ns_constant_hits_cap():
    s = OracleSession(orc.constant(8, 0))
    r = std_ns_estimate(s, 0.2, max_trials=10 ** 4, seed=1)
    assert r.cap_reached and r.successes == 0 and r.value == 0.0
    assert r.queries == 2 * r.trials == s.query_count


def test_std_ns_dictator():
    vals = [std_ns_estimate(OracleSession(orc.dictator(10, 3)), 0.2, 0.1, seed=k).value
            for k in range(50)]
    assert within(vals, 0.18, 0.22) >= 45


def test_std_ns_majority15():
    f = orc.majority(15)
    ns = exact.exact_ns(f, 0.1)
    vals = [std_ns_estimate(OracleSession(f), 0.1, 0.1, seed=k).value for k in range(50)]
    assert within(vals, 0.9 * ns, 1.1 * ns) >= 45


def test_std_bias():
    r = std_bias_estimate(OracleSession(orc.constant(5, 1)), 0.1, seed=0)
    assert r.value == 1.0 and r.trials == 4800
    vals = [std_bias_estimate(OracleSession(orc.majority(9)), 0.1, seed=k).value
            for k in range(50)]
    assert within(vals, 0.45, 0.55) >= 45


def test_std_bias_f0():
    f = orc.make_f0(20, 2)
    b = exact.exact_bias(f)
    vals = [std_bias_estimate(OracleSession(f), 0.25, seed=k).value for k in range(30)]
    assert within(vals, 0.75 * b, 1.25 * b) >= 20


def test_influence_constant_caps():
    r = influence_estimate(OracleSession(orc.constant(10, 0)), 0.3, seed=0, max_trials=20000)
    assert r.cap_reached and r.value == 0.0


def test_influence_refuses_non_monotone():
    with pytest.raises(NotMonotone):
        influence_estimate(OracleSession(orc.parity(5)), 0.3, seed=0)
    r = influence_estimate(OracleSession(orc.parity(5)), 0.3, seed=0, force=True, trials=100)
    assert r.trials == 100


def test_influence_dictator16():
    vals = [influence_estimate(OracleSession(orc.dictator(16, 5)), 0.3, seed=k).value
            for k in range(30)]
    assert within(vals, 0.7, 1.3) >= 20


def test_query_accounting():
    s = OracleSession(orc.majority(11))
    r = influence_estimate(s, 0.3, seed=4, trials=500)
    assert r.queries == 2 * r.trials == s.query_count
    s = OracleSession(orc.majority(11))
    r = std_ns_estimate(s, 0.1, seed=4, trials=321)
    assert r.queries == 642 == s.query_count
    s = OracleSession(orc.majority(11))
    r = std_bias_estimate(s, seed=4, trials=77)
    assert r.queries == 77
    assert r.successes <= r.trials


def mean_and_se(xs):
    m = sum(xs) / len(xs)
    v = sum((x - m) ** 2 for x in xs) / (len(xs) - 1)
    return m, math.sqrt(v / len(xs))


def test_fixed_n_unbiased():
    f = orc.dnf(10, [(0, 1), (2, 3, 4), (5, 6), (1, 7, 8, 9)])
    rng = random.Random(99)
    ns = exact.exact_ns(f, 0.1)
    m, se = mean_and_se([std_ns_estimate(OracleSession(f), 0.1, trials=400, rng=rng).value
                         for _ in range(200)])
    assert abs(m - ns) <= 4 * se
    b = exact.exact_bias(f)
    m, se = mean_and_se([std_bias_estimate(OracleSession(f), trials=400, rng=rng).value
                         for _ in range(200)])
    assert abs(m - b) <= 4 * se
    w = 2
    target = f.n * exact.influence_walk_success(f, w) / w
    m, se = mean_and_se([influence_estimate(OracleSession(f), w=w, trials=400, rng=rng).value
                         for _ in range(200)])
    assert abs(m - target) <= 4 * se


@pytest.mark.parametrize("w", [1, 2])
def test_influence_hit_rate_matches_layer_counting(w):
    f = orc.majority(10)
    p = exact.influence_walk_success(f, w)
    N = 10 ** 5
    r = influence_estimate(OracleSession(f), w=w, trials=N, seed=8)
    assert abs(r.successes / N - p) <= 3 * math.sqrt(p * (1 - p) / N)


def test_same_seed_same_report():
    a = std_ns_estimate(OracleSession(orc.majority(9)), 0.1, 0.3, seed=5)
    b = std_ns_estimate(OracleSession(orc.majority(9)), 0.1, 0.3, seed=5)
    assert a.to_json() == b.to_json()
