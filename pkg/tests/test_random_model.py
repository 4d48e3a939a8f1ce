import math
import threading
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from scdigraphs.asymptotics import model_params
from scdigraphs.errors import GuardError, RegimeError, RejectionBudgetExceeded
from scdigraphs.exact import g_by_degrees_brute, p_no_isolated_cycle_exact
from scdigraphs.graph_core import DegreeSequencePair, MultiDigraph, simple_ss_cycle_length
from scdigraphs.random_model import (
    DegreeSampler,
    degree_marginal_exact,
    estimate,
    make_rng,
    pair_batch,
    sample_g11_arrays,
    sample_g11_uniform,
    sample_mg11,
    sample_pairing,
    sample_truncated_poisson_degrees,
    sample_ztp,
    simple_mask,
    simple_ss_lengths,
)


def within(mean, target, se, k=3.0):
    return abs(mean - target) <= k * se


# --- degree sequences ---------------------------------------------------------


def test_ztp_moments():
    lam = 0.8
    y = sample_ztp(lam, 200_000, make_rng(1))
    assert y.min() >= 1
    p1 = lam * math.exp(-lam) / -math.expm1(-lam)
    se = math.sqrt(p1 * (1 - p1) / y.size)
    assert within(np.mean(y == 1), p1, se)
    mean = lam / -math.expm1(-lam)
    assert within(y.mean(), mean, y.std() / math.sqrt(y.size))


def test_all_ones_when_m_equals_n():
    d = sample_truncated_poisson_degrees(7, 7, make_rng(0))
    assert d.delta == d.Delta == (1,) * 7


@pytest.mark.parametrize("method", ["rejection", "sequential"])
def test_degree_marginals_at_100_130(method):
    n, m = 100, 130
    d = DegreeSampler(n, m, method=method).sample(100_000 if method == "sequential" else 40_000, make_rng(3))
    assert (d.sum(axis=1) == m).all() and d.min() >= 1
    x = d[:, 0]
    assert within(x.mean(), m / n, x.std(ddof=1) / math.sqrt(x.size))
    p2 = float(degree_marginal_exact(n, m, 2))
    assert within(np.mean(x == 2), p2, math.sqrt(p2 * (1 - p2) / x.size))


@pytest.mark.parametrize("method", ["rejection", "sequential"])
def test_degree_law_is_exact_on_small_case(method):
    # P(i) proportional to prod 1/i_s! over positive i with |i| = m
    n, m = 3, 7
    support = [c for c in product(range(1, m + 1), repeat=n) if sum(c) == m]
    w = np.array([1 / math.prod(math.factorial(c) for c in s) for s in support])
    w /= w.sum()
    d = DegreeSampler(n, m, method=method).sample(60_000, make_rng(11))
    index = {s: k for k, s in enumerate(support)}
    counts = np.bincount([index[tuple(row)] for row in d.tolist()], minlength=len(support))
    assert chisquare(counts, w * counts.sum()).pvalue > 1e-3


def test_rejection_budget():
    with pytest.raises(RejectionBudgetExceeded):
        sample_truncated_poisson_degrees(400, 500, make_rng(0), budget=0)


def test_acceptance_rate_reported():
    s = DegreeSampler(50, 70, method="rejection")
    s.sample(100, make_rng(0))
    assert 0 < s.acceptance_rate < 1


def test_degree_regime():
    with pytest.raises(RegimeError):
        DegreeSampler(5, 4)


# --- pairings ---------------------------------------------------------------------


@settings(max_examples=40)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=6), st.randoms(), st.integers(0, 2**32))
def test_pairing_preserves_degrees(delta, rnd, seed):
    Delta = list(delta)
    rnd.shuffle(Delta)
    dsp = DegreeSequencePair(tuple(delta), tuple(Delta))
    out = sample_pairing(dsp, make_rng(seed))
    assert tuple(out.graph.in_degrees()) == dsp.delta
    assert tuple(out.graph.out_degrees()) == dsp.Delta
    assert out.simple == out.graph.is_simple()


def test_pair_batch_preserves_degrees_and_simple_mask():
    rng = make_rng(5)
    d = DegreeSampler(30, 45).sample(200, rng)
    delta, Delta = d[:100], d[100:]
    t, h = pair_batch(delta, Delta, rng)
    mask = simple_mask(t, h, 30)
    for b in range(100):
        g = MultiDigraph(30, tuple(zip(t[b].tolist(), h[b].tolist())))
        assert g.in_degrees() == delta[b].tolist()
        assert g.out_degrees() == Delta[b].tolist()
        assert mask[b] == g.is_simple()


def test_batch_cycle_lengths_match_graph_routine():
    rng = make_rng(9)
    for n, m in [(5, 6), (20, 24), (60, 70)]:
        d = DegreeSampler(n, m).sample(400, rng)
        t, h = pair_batch(d[:200], d[200:], rng)
        fast = simple_ss_lengths(t, h, n)
        slow = [simple_ss_cycle_length(MultiDigraph(n, tuple(zip(a, b)))) for a, b in zip(t.tolist(), h.tolist())]
        assert fast.tolist() == slow


def test_simple_rate_conditional_uniformity():
    # conditioned on simple, each realiser of the degree pair is equally likely
    dsp = DegreeSequencePair((1, 1, 1, 2), (2, 1, 1, 1))
    assert g_by_degrees_brute(dsp) == 7
    rng = make_rng(4)
    seen = {}
    for _ in range(30_000):
        out = sample_pairing(dsp, rng)
        if out.simple:
            seen[out.graph.arcs] = seen.get(out.graph.arcs, 0) + 1
    assert len(seen) == 7
    assert chisquare(list(seen.values())).pvalue > 1e-3


# --- uniform digraphs ---------------------------------------------------------


def test_uniform_sampler_returns_valid_digraph():
    g = sample_g11_uniform(30, 45, make_rng(2))
    assert g.m == 45 and min(g.in_degrees()) >= 1 and min(g.out_degrees()) >= 1
    mg = sample_mg11(30, 45, make_rng(2))
    assert mg.m == 45 and min(mg.in_degrees()) >= 1


def test_uniform_over_4_4():
    t, h = sample_g11_arrays(4, 4, 45_000, make_rng(6))
    _, counts = np.unique(np.sort(t * 4 + h, axis=1), axis=0, return_counts=True)
    assert len(counts) == 9  # fixed-point-free permutations of 4 points
    assert chisquare(counts).pvalue > 1e-3


def test_simple_fraction_tracks_exp_minus_eta():
    e = estimate("simple_pairing", 100, 120, 40_000, seed=1)
    assert within(e.mean, math.exp(-model_params(100, 120).eta), e.stderr)


def test_acceptance_rate_order_of_magnitude():
    e = estimate("simple_pairing", 200, 300, 20_000, seed=2)
    pred = math.exp(-model_params(200, 300).eta)
    assert 0.5 * pred <= e.mean <= 2 * pred


# --- estimators ------------------------------------------------------------------


def test_estimate_sc_3_4_is_one():
    e = estimate("strongly_connected", 3, 4, 10_000, seed=0)
    assert e.mean == 1.0 and e.stderr == 0.0


def test_estimate_sc_4_4():
    e = estimate("strongly_connected", 4, 4, 100_000, seed=1)
    assert within(e.mean, 2 / 3, e.stderr)


def test_estimate_no_isolated_cycle_4_5():
    e = estimate("no_isolated_cycle", 4, 5, 100_000, seed=2)
    assert p_no_isolated_cycle_exact(4, 4, 5) == 1
    assert e.mean == 1.0
    e = estimate("no_isolated_cycle", 5, 6, 50_000, seed=2)
    assert within(e.mean, 12 / 13, e.stderr)


def test_event_A_trend_bounded():
    vals = [estimate("event_A", n, n + 4, 10_000, seed=n).mean * n for n in (8, 10, 12, 14)]
    assert max(vals) <= 5


def test_event_A_guard_and_model_checks():
    with pytest.raises(GuardError):
        estimate("event_A", 25, 30, 10)
    with pytest.raises(ValueError):
        estimate("event_A", 10, 12, 10, model="multigraph")
    with pytest.raises(ValueError):
        estimate("nonsense", 10, 12, 10)
    with pytest.raises(RegimeError):
        estimate("strongly_connected", 10, 9, 10)


def test_multigraph_strongly_connected():
    e = estimate("strongly_connected", 3, 3, 20_000, seed=3, model="multigraph")
    assert 0 < e.mean < 1


def test_reproducible_and_stderr_formula():
    a = estimate("no_simple_ss", 40, 50, 3000, seed=17, workers=2)
    b = estimate("no_simple_ss", 40, 50, 3000, seed=17, workers=2)
    assert a == b
    assert a.n_workers == 2 and a.n_samples == 3000
    p = a.mean
    assert a.stderr == pytest.approx(math.sqrt(p * (1 - p) / (a.n_samples - 1)))
    c = estimate("no_simple_ss", 40, 50, 3000, seed=18, workers=2)
    assert c != a


def test_safe_from_multiple_threads():
    seeds = [1, 2, 3, 4]
    serial = {s: estimate("no_simple_ss", 30, 40, 2000, seed=s) for s in seeds}
    threaded = {}

    def run(s):
        threaded[s] = estimate("no_simple_ss", 30, 40, 2000, seed=s)

    ts = [threading.Thread(target=run, args=(s,)) for s in seeds]
    for t in ts:
        t.start()
    for t in ts:
        t.join()
    assert threaded == serial


def test_exact_degree_marginal_is_a_distribution():
    total = sum(degree_marginal_exact(10, 14, j) for j in range(1, 6))
    assert total == 1
    assert isinstance(total, Fraction)
