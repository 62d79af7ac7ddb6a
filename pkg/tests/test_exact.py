import itertools

import numpy as np
import pytest

from nsprobe import exact
from nsprobe import hypercube as hc
from nsprobe import oracle as orc
from nsprobe.params import NsParams

from conftest import oracle_suite, small_monotone_suite


def test_truth_table_examples():
    assert orc.truth_table(orc.constant(3, 1)).tolist() == [1] * 8
    # point index order: bit i of the index is coordinate i
    assert orc.truth_table(orc.dictator(2, 0)).tolist() == [0, 1, 0, 1]
    assert orc.truth_table(orc.majority(3)).sum() == 4


def test_bias_examples():
    assert exact.exact_bias(orc.constant(4, 1)) == 1.0
    assert exact.exact_bias(orc.majority(3)) == 0.5
    assert exact.exact_bias(orc.make_f0(20, 2)) <= 1 / 400


def test_influence_examples():
    assert exact.exact_influence(orc.dictator(5, 2)) == (1.0, pytest.approx(1.0))
    for n in (3, 4, 7):
        e, f = exact.exact_influence(orc.parity(n))
        assert e == n and f == pytest.approx(n, abs=1e-9)
    assert exact.influence_edge_scan(orc.majority(3)) == 1.5


def test_ns_examples():
    for d in (0.05, 0.3, 0.5):
        assert exact.exact_ns(orc.constant(5, 1), d) == pytest.approx(0.0, abs=1e-15)
    assert exact.exact_ns(orc.parity(3), 0.1) == pytest.approx(0.244, abs=1e-12)
    assert exact.exact_ns(orc.dictator(4, 1), 0.3) == pytest.approx(0.3, abs=1e-12)
    with pytest.raises(ValueError):
        exact.exact_ns(orc.parity(3), 0.6)


def test_stability_examples():
    assert exact.exact_stability(orc.majority(5), 1.0) == pytest.approx(1.0, abs=1e-12)
    assert exact.exact_stability(orc.parity(3), 0.8) == pytest.approx(0.512, abs=1e-12)
    assert exact.exact_stability(orc.constant(4, 0), 0.3) == pytest.approx(1.0, abs=1e-12)


def test_walsh_hadamard_matches_matrix():
    rng = np.random.default_rng(0)
    v = rng.normal(size=16)
    H = np.array([[(-1) ** (bin(s & x).count("1")) for x in range(16)] for s in range(16)])
    assert np.allclose(exact.walsh_hadamard(v), H @ v)


@pytest.mark.parametrize("name,f", list(oracle_suite().items()))
def test_parseval_and_dual_routes(name, f):
    tab = orc.truth_table(f)
    assert exact.spectral_weights(tab).sum() == pytest.approx(1.0, abs=1e-9)
    e, fo = exact.exact_influence(tab)
    assert abs(e - fo) <= 1e-9
    if f.n <= 10:
        for d in (0.05, 0.2, 0.5):
            assert abs(exact.exact_ns(tab, d) - exact.exact_ns_direct(tab, d)) <= 1e-9


@pytest.mark.parametrize("name,f", list(oracle_suite().items()))
def test_ns_bounded_by_delta_influence_and_increasing(name, f):
    tab = orc.truth_table(f)
    w = exact.spectral_weights(tab)
    infl = exact.influence_edge_scan(tab)
    for d in (1 / f.n, 0.1, 0.5):
        assert exact.ns_from_weights(w, d) <= d * infl + 1e-12
    grid = [exact.ns_from_weights(w, d) for d in np.arange(0.05, 0.5001, 0.05)]
    assert all(b >= a - 1e-12 for a, b in zip(grid, grid[1:]))


def test_stability_identity():
    for f in oracle_suite().values():
        for d in (0.1, 0.35):
            assert exact.exact_ns(f, d) == pytest.approx(
                0.5 * (1 - exact.exact_stability(f, 1 - 2 * d)), abs=1e-9)


def brute_walk_success(f, w):
    """Pr[f(x) != f(end)] for a w-step descending walk, over every x and order."""
    tab = orc.truth_table(f)
    n = f.n
    tot = 0.0
    for x in range(1 << n):
        s1 = hc.ones(x)
        k = min(w, len(s1))
        seqs = list(itertools.permutations(s1, k))
        for seq in seqs:
            y = x
            for i in seq:
                y &= ~(1 << i)
            tot += (tab[x] != tab[y]) / len(seqs)
    return tot / 2 ** n


@pytest.mark.parametrize("w", [1, 2, 3])
def test_layer_counting_matches_walk_enumeration(w):
    for f in (orc.majority(5), orc.dnf(6, [(0, 1), (2, 3, 4), (1, 5)]), orc.dictator(4, 0)):
        assert exact.influence_walk_success(f, w) == pytest.approx(brute_walk_success(f, w),
                                                                    abs=1e-12)


def test_edge_sampler_law_sums_to_one():
    f = orc.dnf(6, [(0, 1), (2, 3, 4), (1, 5)])
    law = exact.edge_sampler_law(f, NsParams.build(6, 0.2, 0.25))
    assert sum(law.values()) == pytest.approx(1.0)
    assert set(law) == set(exact.influential_edges(orc.truth_table(f)))


def test_length_sampler_law_support():
    p = NsParams.build(6, 0.2, 0.25)
    e = hc.Edge(0b000011, 2)
    law = exact.length_sampler_law(e, p)
    assert sum(law.values()) == pytest.approx(1.0)
    assert all(0 <= w1 <= p.t2 - 1 and w2 >= 0 for w1, w2 in law)


def test_path_sampler_law_sums_to_one():
    p = NsParams.build(5, 0.2, 0.25)
    law = exact.path_sampler_law(hc.Edge(0b00011, 2), p)
    assert sum(law.values()) == pytest.approx(1.0)


# -- Process D ---------------------------------------------------------------

def test_process_d_constant():
    r = exact.process_d_exact(orc.constant(4, 0), NsParams.build(4, 0.2, 0.25))
    assert r.p_A == 0 and r.ns == 0


@pytest.mark.parametrize("name,f", list(small_monotone_suite().items()))
@pytest.mark.parametrize("delta", [0.05, 0.2, 0.5])
def test_process_d_identities(name, f, delta):
    p = NsParams.build(f.n, delta, 0.25)
    r = exact.process_d_exact(f, p)
    ns = exact.exact_ns(f, delta)
    assert abs(r.ns - ns) <= 1e-9
    assert abs(r.p_A - r.sum_p_e) <= 1e-12
    assert abs(r.p_A * r.p_B - r.sum_p_e_q_e) <= 1e-12
    assert r.p_A * r.p_B <= ns / 2 + 1e-12
    assert r.p_A * r.p_B >= ns / 2 - r.pr_E1 - r.pr_E2 - 1e-12


@pytest.mark.parametrize("name,f", list(small_monotone_suite().items()))
def test_process_d_with_bad_events(name, f):
    # narrow band and short t2 so E1 and E2 actually occur
    p = NsParams.build(f.n, 0.3, 0.25, t1=0.5, t2=1)
    r = exact.process_d_exact(f, p)
    ns = exact.exact_ns(f, 0.3)
    assert abs(r.ns - ns) <= 1e-9
    assert abs(r.p_A - r.sum_p_e) <= 1e-12
    assert abs(r.p_A * r.p_B - r.sum_p_e_q_e) <= 1e-12
    assert ns / 2 - r.pr_E1 - r.pr_E2 - 1e-12 <= r.p_A * r.p_B <= ns / 2 + 1e-12


def test_bad_events_occur_somewhere():
    f = orc.dnf(6, [(0, 1), (2, 3, 4), (1, 5)])
    r = exact.process_d_exact(f, NsParams.build(6, 0.3, 0.25, t1=0.5, t2=1))
    assert r.pr_E1 > 0 and r.pr_E2 > 0


@pytest.mark.parametrize("f", [orc.majority(3), orc.dnf(4, [(0, 1), (2, 3)]), orc.dictator(4, 1),
                               orc.threshold(4, 1)])
@pytest.mark.parametrize("kw", [{}, {"t1": 0.5, "t2": 1}])
def test_process_d_matches_brute_force(f, kw):
    p = NsParams.build(f.n, 0.3, 0.25, **kw)
    a, b = exact.process_d_exact(f, p), exact.process_d_brute_force(f, p)
    for k in ("ns", "p_A", "p_B", "pr_E1", "pr_E2"):
        assert getattr(a, k) == pytest.approx(getattr(b, k), abs=1e-12)
    assert a.p_e.keys() == b.p_e.keys()
    for e in a.p_e:
        assert a.p_e[e] == pytest.approx(b.p_e[e], abs=1e-12)


def test_process_d_refuses_non_monotone_and_large():
    with pytest.raises(ValueError):
        exact.process_d_exact(orc.parity(3), NsParams.build(3, 0.2, 0.25))
    with pytest.raises(orc.DimensionError):
        exact.process_d_exact(orc.majority(7), NsParams.build(7, 0.2, 0.25))


@pytest.mark.parametrize("name,f", list(small_monotone_suite().items()))
def test_composition_with_exact_stages(name, f):
    # with p_A exact the composition reproduces NS/2 up to the bad events;
    # swapping in delta I / 2 for p_A is accurate only for small delta
    delta = 0.05
    r = exact.process_d_exact(f, NsParams.build(f.n, delta, 0.25))
    infl = exact.influence_edge_scan(f)
    err = 2 * (r.pr_E1 + r.pr_E2) / r.ns
    assert r.ns * (1 - err) - 1e-12 <= 2 * r.p_A * r.p_B <= r.ns + 1e-12
    assert abs(delta * infl * r.p_B / r.ns - 1) <= 0.03


@pytest.mark.parametrize("name,f", list(small_monotone_suite().items()))
@pytest.mark.parametrize("delta", [0.01, 0.05])
def test_edge_crossing_probabilities_flat(name, f, delta):
    r = exact.process_d_exact(f, NsParams.build(f.n, delta, 0.25))
    pe = list(r.p_e.values())
    assert max(pe) / min(pe) <= 1.5


def test_conditional_path_law_properties():
    f = orc.dnf(5, [(0, 1, 2), (2, 3), (1, 4)])
    p = NsParams.build(5, 0.2, 0.25)
    e = exact.influential_edges(orc.truth_table(f))[0]
    law = exact.conditional_path_law(f, p, e)
    assert sum(law.values()) == pytest.approx(1.0)
    for (x, p1, p2) in law:
        path = hc.Path(x, p1, hc.DESCENDING)
        assert path.is_valid() and e in path.edges()
        assert hc.Path(path.end, p2, hc.ASCENDING).is_valid()
        assert not any((x >> i) & 1 for i in p2)


def test_total_variation():
    assert exact.total_variation({1: 0.5, 2: 0.5}, {1: 0.5, 2: 0.5}) == 0
    assert exact.total_variation({1: 1.0}, {2: 1.0}) == 1.0
