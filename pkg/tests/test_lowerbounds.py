import math
import random

import numpy as np
import pytest

from nsprobe import exact
from nsprobe import lowerbounds as lb
from nsprobe import oracle as orc

PAPER16 = lb.FamilySpec("D2_bias", 16, 2.0, 0.0)
THIN16 = lb.FamilySpec("D2_bias", 16, 2.0, 0.0, num_clauses=1, clause_width=10)


def test_family_spec_validation():
    with pytest.raises(ValueError):
        lb.FamilySpec("D3", 10)
    with pytest.raises(ValueError):
        lb.FamilySpec("D2_ns", 10)
    assert PAPER16.dnf_shape == (16, 4)
    assert PAPER16.threshold == 13
    assert lb.FamilySpec.from_dict(THIN16.to_dict()) == THIN16


def test_d1_draw_is_f0():
    f = lb.draw_family(lb.FamilySpec("D1", 12), random.Random(0))
    assert f == orc.make_f0(12, 2.0)
    assert orc.OracleSession(f).evaluate((1 << 12) - 1) == 1


def test_d2_draws_monotone_and_dominate_f0():
    rng = random.Random(5)
    spec = lb.FamilySpec("D2_influence", 10, 2.0, 0.0)
    f0 = orc.truth_table(orc.make_f0(10, 2.0))
    for _ in range(10):
        f = lb.draw_family(spec, rng)
        tab = orc.truth_table(f)
        assert orc.table_is_monotone(tab, 10)
        assert np.all(tab >= f0)


def test_d2_draws_seeded():
    a = lb.draw_family(PAPER16, random.Random(3))
    b = lb.draw_family(PAPER16, random.Random(3))
    c = lb.draw_family(PAPER16, random.Random(4))
    assert a == b and a != c


def test_thinness_constants():
    rng = random.Random(0)
    assert lb.measure_thinness(orc.constant(16, 0), 13, 10, rng).estimate == 0.0
    assert lb.measure_thinness(orc.constant(16, 1), 13, 10, rng).estimate == 1.0
    with pytest.raises(ValueError):
        lb.measure_thinness(orc.constant(16, 1), 13, 0, rng)


def test_thinness_sampled_vs_exact():
    rng = random.Random(9)
    base = lb.draw_base(PAPER16, rng)
    exact_rep = lb.measure_thinness(base, 8, 10, rng)
    assert exact_rep.exact
    n, T = 30, 16  # C(30, 16) > 10^6 forces sampling
    f = orc.make_random_dnf(n, 40, 5, rng)
    rep = lb.measure_thinness(f, T, 20000, rng)
    assert not rep.exact and 0 <= rep.estimate <= 1
    pts = [sum(1 << i for i in rng.sample(range(n), T)) for _ in range(200000)]
    ref = orc.evaluate_batch(f, np.array(pts, dtype=np.uint64)).mean()
    assert abs(rep.estimate - ref) <= 3 * rep.stderr + 3 * math.sqrt(ref * (1 - ref) / 200000)


def test_distinguisher_no_queries_is_coin_flip():
    r = lb.distinguisher_experiment(THIN16, 0, 4000, random.Random(1))
    assert abs(r.success_rate - 0.5) <= 3 * math.sqrt(0.25 / 4000)
    assert r.bound == 0.5 and r.queries == 0


@pytest.mark.parametrize("spec", [PAPER16, THIN16])
def test_distinguisher_within_union_bound(spec):
    rng = random.Random(17)
    base = lb.draw_base(spec, rng)
    for q in (1, 2, 4, 8):
        r = lb.distinguisher_experiment(spec, q, 2000, rng, base)
        assert 0 <= r.success_rate <= 1 and r.bound >= 0.5
        assert r.success_rate <= r.bound + 3 * r.stderr
        assert r.vacuous == (r.bound >= 1)


def test_preset_shape_bound_is_vacuous_at_n16():
    # every level-13 point satisfies some width-4 clause of the preset-shape DNF
    r = lb.distinguisher_experiment(PAPER16, 1, 200, random.Random(2))
    assert r.thinness == 1.0 and r.vacuous


def test_h_alpha_exact_count():
    rng = random.Random(0)
    assert not orc.truth_table(lb.draw_h_alpha(8, 0.0, rng)).any()
    assert orc.truth_table(lb.draw_h_alpha(8, 1.0, rng)).all()
    f = lb.draw_h_alpha(16, 2 ** -6, rng)
    assert exact.exact_bias(f) == 1024 / 65536
    with pytest.raises(orc.DimensionError):
        lb.draw_h_alpha(25, 0.5, rng)


def test_h_alpha_concentration_small():
    frac = lb.h_alpha_concentration(16, 2 ** -6, (1 / 16, 0.25), 20, random.Random(4))
    assert all(v >= 0.95 for v in frac.values())


def test_verify_family_properties_reference_seed():
    # exact values of the first draw at seed 2024, pinned when the thresholds were set
    for kind in lb.D2_KINDS:
        spec = lb.FamilySpec(kind, 16, 2.0, 0.0, delta=0.25 if kind == "D2_ns" else None)
        rep = lb.verify_family_properties(spec, random.Random(2024))
        d = rep["draws"][0]
        assert d["exact"]
        assert d["bias"] == pytest.approx(0.46954345703125, abs=1e-12)
        assert d["influence"] == pytest.approx(2.3221435546875, abs=1e-12)
        assert d["bias"] >= 0.05 and d["influence"] >= 0.5
        if kind == "D2_ns":
            assert d["ns"] >= 0.01
            assert d["ns"] == pytest.approx(0.3500016401666244, abs=1e-9)
        assert rep["targets"]["bias"] == 1.0 and rep["targets"]["influence"] == 4.0


def test_verify_family_properties_sampled_branch():
    spec = lb.FamilySpec("D2_bias", 24, 2.0, 0.0, num_clauses=8, clause_width=5)
    rep = lb.verify_family_properties(spec, random.Random(1), epsilon=0.3)
    d = rep["draws"][0]
    assert not d["exact"] and 0 < d["bias"] < 1 and 0 <= d["ns"] <= 1


def test_sandwich_n12():
    rng = random.Random(33)
    for _ in range(20):
        F = orc.make_random_dnf(12, rng.randint(1, 12), rng.randint(2, 6), rng)
        s = lb.sandwich(F, 2.0, deltas=(1 / 12, 0.25))
        b, b2 = s["bias"]
        assert b <= b2 <= b + s["b0"] + 1e-15
        i, i2 = s["influence"]
        assert abs(i - i2) <= s["influence_allowance"] + 1e-12
        for ns, ns2 in s["ns"].values():
            assert abs(ns - ns2) <= s["ns_allowance"] + 1e-12


@pytest.mark.parametrize("n", [12, 16, 20, 24])
def test_f0_properties(n):
    p = lb.f0_properties(n, 2.0)
    assert p["bias"] <= p["bound"]
    assert 3 * p["bias"] * p["slack"] >= p["bound"]
    ns = [p["ns"][d] for d in sorted(p["ns"])]
    assert all(b >= a for a, b in zip(ns, ns[1:]))
    for d, v in p["ns"].items():
        assert v <= d * p["influence"] + 1e-15
