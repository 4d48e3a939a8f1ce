from fractions import Fraction
from itertools import combinations
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scdigraphs import golden
from scdigraphs.errors import GuardError, RegimeError
from scdigraphs.exact import (
    all_arcs,
    c11_brute,
    c11_ie,
    c110_brute,
    fudge_exact,
    g_brute,
    g_by_degrees_brute,
    h11_brute,
    h11_exact,
    h_by_degrees,
    mean_fudge_exact,
    mg_X_distribution,
    p_no_isolated_cycle_exact,
    p_no_simple_ss_mg_exact,
    p_no_simple_ss_mg_oracle,
    pgf_X_mg_exact,
)
from scdigraphs.graph_core import DegreeSequencePair


def c11_general_brute(n1, n, m):
    """All in-degrees positive, out-degree positive exactly on ``[n1]``."""
    arcs = [(i, j) for i, j in all_arcs(n) if i < n1]
    count = 0
    for idx in combinations(arcs, m):
        tails = {i for i, _ in idx}
        heads = {j for _, j in idx}
        count += len(tails) == n1 and len(heads) == n
    return count


# --- small counts -------------------------------------------------------------


def test_known_small_counts():
    assert (c11_brute(3, 3), c11_brute(3, 4)) == (2, 9)
    assert (g_brute(3, 4), g_brute(4, 4), g_brute(5, 5)) == (9, 6, 24)
    assert c110_brute(3, 3) == 0 and c110_brute(3, 4) == 9


@pytest.mark.parametrize("n", [3, 4, 5])
def test_cycles_count(n):
    assert g_brute(n, n) == factorial(n - 1)


def test_brute_guard():
    with pytest.raises(GuardError):
        c11_brute(6, 8)


def test_ie_guard():
    with pytest.raises(GuardError):
        c11_ie(501, 501, 600)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_ie_matches_brute_for_every_m(n):
    for m in range(0, n * (n - 1) + 2):
        assert c11_ie(n, n, m) == c11_brute(n, m) if m >= n else c11_ie(n, n, m) == 0


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(st.integers(0, n), st.just(n), st.integers(0, n * (n - 1)))))
def test_ie_matches_general_brute(args):
    n1, n, m = args
    assert c11_ie(n1, n, m) == c11_general_brute(n1, n, m)


@settings(max_examples=60)
@given(st.integers(1, 30).flatmap(lambda n: st.tuples(st.integers(0, n), st.just(n), st.integers(n, 3 * n))))
def test_ie_routes_agree(args):
    n1, n, m = args
    assert c11_ie(n1, n, m, method="four_index") == c11_ie(n1, n, m, method="row_ie")


def test_ie_zero_when_infeasible():
    assert c11_ie(3, 3, 2) == 0
    assert c11_ie(3, 3, 7) == 0  # only 6 arcs exist


# --- insertion sequences and fudge factors -----------------------------------


@pytest.mark.parametrize("n,m", [(2, 2), (2, 3), (3, 3), (3, 4)])
def test_h11_closed_form(n, m):
    assert h11_exact(n, m) == h11_brute(n, m)


def test_h11_golden_records():
    assert golden.check("h11_brute", {"n": 3, "m": 4}, Fraction(h11_exact(3, 4)))
    assert golden.check("h11_brute", {"n": 3, "m": 5}, Fraction(h11_exact(3, 5)))


def test_fudge_examples():
    assert fudge_exact(DegreeSequencePair((1, 1), (1, 1))) == Fraction(1, 2)
    assert fudge_exact(DegreeSequencePair((1, 1, 2), (2, 1, 1))) == Fraction(1, 6)
    assert fudge_exact(DegreeSequencePair((2, 0), (0, 2))) == 0


@given(st.integers(2, 4).flatmap(lambda n: st.lists(st.integers(0, n - 1), min_size=n, max_size=n)), st.randoms())
def test_fudge_is_probability(delta, rnd):
    Delta = list(delta)
    rnd.shuffle(Delta)
    dsp = DegreeSequencePair(tuple(delta), tuple(Delta))
    f = fudge_exact(dsp)
    assert 0 <= f <= 1
    # each simple realisation absorbs prod(delta_i! Delta_i!) of the m! bijections
    w = 1
    for d in dsp.delta + dsp.Delta:
        w *= factorial(d)
    assert g_by_degrees_brute(dsp) * w <= factorial(dsp.m)
    assert f == Fraction(g_by_degrees_brute(dsp) * w, factorial(dsp.m))


def test_degree_sequence_counts_partition_c11():
    # summing g(delta, Delta) over positive sequences recovers C_11
    n, m = 3, 5
    total = 0
    comps = [c for c in _compositions(m, n)]
    for d in comps:
        for D in comps:
            total += g_by_degrees_brute(DegreeSequencePair(d, D))
    assert total == c11_brute(n, m)


def _compositions(m, n):
    if n == 1:
        yield (m,)
        return
    for first in range(1, m - n + 2):
        for rest in _compositions(m - first, n - 1):
            yield (first,) + rest


def test_mean_fudge_values():
    assert mean_fudge_exact(2, 2) == Fraction(1, 2)
    assert mean_fudge_exact(3, 3) == Fraction(1, 3)
    assert mean_fudge_exact(3, 4) == Fraction(1, 6)


# --- isolated cycles ---------------------------------------------------------


@pytest.mark.parametrize("n,m", [(3, 3), (3, 4), (4, 4), (4, 5), (4, 6), (5, 6), (5, 7)])
def test_isolated_cycle_inversion_matches_brute(n, m):
    assert p_no_isolated_cycle_exact(n, n, m) == Fraction(c110_brute(n, m), c11_brute(n, m))


def test_isolated_cycle_values():
    assert p_no_isolated_cycle_exact(5, 5, 6) == Fraction(12, 13)
    assert p_no_isolated_cycle_exact(3, 3, 3) == 0


def test_isolated_cycle_probability_decays_like_r_over_n():
    vals = [float(p_no_isolated_cycle_exact(n, n, n + 8)) * n / 8 for n in (40, 80, 160)]
    assert max(vals) < 10


# --- simple sink/source-sets in the multigraph -------------------------------


@pytest.mark.parametrize("n,m", [(2, 3), (2, 4), (3, 4), (3, 5)])
def test_formula_matches_exhaustive(n, m):
    assert p_no_simple_ss_mg_exact(n, m) == p_no_simple_ss_mg_oracle(n, m)


def test_upper_limit_fixed_by_oracle():
    assert p_no_simple_ss_mg_oracle(3, 4) == Fraction(1, 3)
    assert p_no_simple_ss_mg_exact(3, 4) == Fraction(1, 3)
    assert p_no_simple_ss_mg_exact(3, 4, upper="a<n") == Fraction(2, 9)


def test_four_six_against_golden():
    params = {"n": 4, "m": 6, "method": "sequences", "sequences": 16**6}
    assert golden.check("p_no_simple_ss_mg_oracle", params, p_no_simple_ss_mg_exact(4, 6))


def test_oracle_methods_agree():
    assert mg_X_distribution(3, 4, "sequences") == mg_X_distribution(3, 4, "multisets")
    assert mg_X_distribution(2, 3) == {0: Fraction(1, 2), 1: Fraction(1, 6), 2: Fraction(1, 3)}


@pytest.mark.parametrize("n,m", [(2, 3), (3, 4), (3, 5)])
def test_pgf_equals_oracle_distribution(n, m):
    pgf = pgf_X_mg_exact(n, m)
    dist = mg_X_distribution(n, m)
    assert {k: pgf[k] for k in range(n + 1) if pgf[k]} == dist
    assert sum(pgf[k] for k in range(n + 1)) == 1


def test_regime_errors():
    with pytest.raises(RegimeError):
        p_no_simple_ss_mg_exact(3, 3)
    with pytest.raises(RegimeError):
        h11_exact(3, 2)
    with pytest.raises(GuardError):
        pgf_X_mg_exact(7, 9)


def test_probability_tends_to_one_as_density_grows():
    assert p_no_simple_ss_mg_exact(20, 200) > p_no_simple_ss_mg_exact(20, 40) > p_no_simple_ss_mg_exact(20, 22)
    assert 0 < p_no_simple_ss_mg_exact(20, 22) < 1
