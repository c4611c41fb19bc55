import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from qlll.ensembles import (Hypergraph, RejectionBudgetExceeded, _unrank_combination,
                            degree_stats, dumps_hypergraph, edge_count, hypergraph_of,
                            loads_hypergraph, make_rng, poisson_conditional_mean_check,
                            random_instance, sample_gknm, sample_gknp, sample_regular,
                            trial_seed)
from qlll.qsat import brute_force_sat_dim, dumps_instance, loads_instance

# E[X | X >= t] for Poisson(lam), evaluated at 30 digits with mpmath
EXACT_CONDITIONAL_MEAN = {(10, 20): 20.80426504984875, (10.5, 21): 21.81078051028332}


def test_rng_contract():
    a = make_rng(5, 3).integers(0, 2**63, size=4)
    b = make_rng(5 ^ 3).integers(0, 2**63, size=4)
    assert np.array_equal(a, b)
    assert trial_seed(5, 3) == 6
    assert trial_seed(-1, 0) == 2**64 - 1


def test_hypergraph_validation():
    with pytest.raises(ValueError):
        Hypergraph(4, 2, [[0, 0]])
    with pytest.raises(ValueError):
        Hypergraph(4, 2, [[0, 4]])
    with pytest.raises(ValueError):
        Hypergraph(4, 0, [])
    g = Hypergraph(4, 2, [[3, 1]])
    assert g.edge_list() == [(1, 3)]


def test_gknm_examples():
    assert sample_gknm(10, 0, 3, make_rng(0)).m == 0
    g = sample_gknm(4, 7, 4, make_rng(0))
    assert g.edge_list() == [(0, 1, 2, 3)] * 7
    with pytest.raises(ValueError):
        sample_gknm(2, 1, 3, make_rng(0))


def test_gknm_determinism():
    a = sample_gknm(1000, 500, 5, make_rng(42))
    b = sample_gknm(1000, 500, 5, make_rng(42))
    assert np.array_equal(a.edges, b.edges)
    assert not np.array_equal(a.edges, sample_gknm(1000, 500, 5, make_rng(43)).edges)


def test_gknm_uniform_chi_square():
    g = sample_gknm(6, 100_000, 3, make_rng(2024))
    triples = {t: i for i, t in enumerate(itertools.combinations(range(6), 3))}
    counts = np.bincount([triples[e] for e in g.edge_list()], minlength=20)
    assert stats.chisquare(counts).pvalue > 0.001


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 200), st.integers(0, 300))
def test_mean_degree_identity(seed, n, m):
    rng = make_rng(seed)
    k = int(rng.integers(1, min(n, 8) + 1))
    g = sample_gknm(n, m, k, rng)
    s = degree_stats(g)
    assert s.mean == Fraction(k * m, n) == Fraction(int(s.degrees.sum()), n)
    assert s.histogram.sum() == n


def test_unrank_matches_colex_order():
    for n, k in [(6, 3), (7, 1), (5, 5), (8, 4)]:
        colex = sorted(itertools.combinations(range(n), k), key=lambda c: c[::-1])
        assert [tuple(_unrank_combination(r, k)) for r in range(math.comb(n, k))] == colex


def test_gknp_examples():
    assert sample_gknp(10, 0.0, 3, make_rng(0)).m == 0
    g = sample_gknp(7, 1.0, 3, make_rng(0))
    assert g.edge_list() == list(itertools.combinations(range(7), 3))
    with pytest.raises(ValueError):
        sample_gknp(7, 1.5, 3, make_rng(0))


def test_gknp_count_mean_and_variance():
    n, k, m = 30, 3, 60
    total = math.comb(n, k)
    p = m / total
    rng = make_rng(77)
    counts = np.array([sample_gknp(n, p, k, rng).m for _ in range(10_000)])
    var = total * p * (1 - p)
    assert abs(counts.mean() - m) < 3 * math.sqrt(var / counts.size)
    # sample variance of a near-normal count: sd(s^2) ~ var * sqrt(2/(N-1))
    assert abs(counts.var(ddof=1) - var) < 3 * var * math.sqrt(2 / (counts.size - 1))


def test_gknp_edges_distinct():
    g = sample_gknp(12, 0.3, 3, make_rng(4))
    assert len(set(g.edge_list())) == g.m


def test_gknp_huge_total():
    g = sample_gknp(100_000, 1e-33, 8, make_rng(5))
    assert len(set(g.edge_list())) == g.m > 0


def test_regular_examples():
    g = sample_regular(3, 1, 3, make_rng(0))
    assert g.edge_list() == [(0, 1, 2)]
    g = sample_regular(6, 2, 3, make_rng(1))
    assert g.m == 4 and np.all(g.degrees() == 2)
    s = degree_stats(g)
    assert s.max == s.mean == 2
    with pytest.raises(ValueError):
        sample_regular(5, 1, 3, make_rng(0))


def test_regular_budget():
    # 2 vertices, D=2, k=2: the only valid pairing keeps the two vertices apart
    with pytest.raises(RejectionBudgetExceeded) as info:
        sample_regular(1, 2, 2, make_rng(0), max_attempts=5)
    assert info.value.attempts == 5


def test_regular_degree_audit():
    rng = make_rng(99)
    for _ in range(1000):
        g = sample_regular(60, 6, 3, rng)
        assert g.m == 120
        assert np.all(g.degrees() == 6)
        assert np.all(np.diff(g.edges, axis=1) > 0)


def test_degree_histogram_poisson_fit():
    g = sample_gknm(10_000, 20_000, 3, make_rng(31))
    hist = degree_stats(g).histogram
    lam = 6
    # pool tails so every expected count is at least 5
    lo, hi = 1, 13
    obs = np.array([hist[:lo + 1].sum(), *hist[lo + 1:hi], hist[hi:].sum()])
    pmf = stats.poisson(lam)
    exp = np.array([pmf.cdf(lo), *pmf.pmf(np.arange(lo + 1, hi)), pmf.sf(hi - 1)]) * 10_000
    assert exp.min() >= 5
    assert stats.chisquare(obs, exp).pvalue > 0.01


def test_edge_count_rounding():
    assert edge_count(8, 0.5) == 4
    assert edge_count(5, 0.3) == 2  # 1.5 rounds up
    assert edge_count(10, 0) == 0
    assert edge_count(5, Fraction(3, 10)) == 2
    assert edge_count(100_000, 2**15 / (12 * math.e * 225)) == 446469
    with pytest.raises(ValueError):
        edge_count(10, -1)


def test_random_instance_examples():
    assert random_instance(5, 0, 3, make_rng(0)).m == 0
    inst = random_instance(8, 0.5, 3, make_rng(1))
    assert inst.m == 4 and all(p.rank == 1 for p in inst.projectors)
    back = loads_instance(dumps_instance(inst))
    assert all(np.array_equal(a.vectors, b.vectors)
               for a, b in zip(inst.projectors, back.projectors))
    inst = random_instance(10, 0.3, 3, make_rng(2))
    assert 0 <= brute_force_sat_dim(inst) <= 2 ** 10
    assert hypergraph_of(inst).m == 3


def test_degree_stats_empty():
    s = degree_stats(Hypergraph(5, 2, np.zeros((0, 2))))
    assert s.max == 0 and s.mean == 0 and np.all(s.degrees == 0)


def test_poisson_fact_examples():
    rep = poisson_conditional_mean_check(10, 2, 1_000_000, make_rng(8))
    assert rep.threshold == 20 and rep.verdict == "pass" and rep.upper <= 30
    half_width = rep.upper - rep.mean
    assert abs(rep.mean - EXACT_CONDITIONAL_MEAN[(10, 20)]) < 2 * half_width
    rep = poisson_conditional_mean_check(10, 0, 100_000, make_rng(8))
    assert rep.threshold == 0 and rep.n_conditioned == 100_000
    assert abs(rep.mean - 10) < 4 * math.sqrt(10 / 100_000)
    rep = poisson_conditional_mean_check(10.5, 2, 1_000_000, make_rng(9))
    assert rep.threshold == 21
    assert abs(rep.mean - EXACT_CONDITIONAL_MEAN[(10.5, 21)]) < 2 * (rep.upper - rep.mean)


def test_poisson_fact_inconclusive():
    rep = poisson_conditional_mean_check(1, 50, 1000, make_rng(0))
    assert rep.verdict == "inconclusive" and rep.mean is None


def test_text_format_round_trip():
    g = sample_gknm(50, 30, 4, make_rng(6))
    text = dumps_hypergraph(g)
    assert text.splitlines()[0] == "4 50 30"
    back = loads_hypergraph(text)
    assert np.array_equal(back.edges, g.edges) and back.n_vertices == 50


@pytest.mark.parametrize("text, msg", [
    ("3 5\n", "header"),
    ("2 5 2\n0 1\n", "declares 2"),
    ("2 5 1\n0 1 2\n", "line 2"),
    ("2 5 1\n0 x\n", "non-integer"),
])
def test_text_format_errors(text, msg):
    with pytest.raises(ValueError, match=msg):
        loads_hypergraph(text)
