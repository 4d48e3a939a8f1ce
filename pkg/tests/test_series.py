import threading
from fractions import Fraction
from math import comb, factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from scdigraphs.errors import GuardError, RegimeError
from scdigraphs.series import (
    Q,
    TruncSeries,
    cycle_egf_coeff,
    egf_coeff,
    falling,
    multinomial,
    sink_source_H,
    stirling2,
    surjections,
    univariate,
)


def stirling_alternating(m, b):
    return sum((-1) ** (b - j) * comb(b, j) * j**m for j in range(b + 1)) // factorial(b)


# --- Stirling numbers and egf coefficients -----------------------------------


def test_small_stirling_values():
    assert [stirling2(4, b) for b in range(5)] == [0, 1, 7, 6, 1]
    assert stirling2(0, 0) == 1 and stirling2(3, 0) == 0 and stirling2(2, 3) == 0


@given(st.integers(0, 60), st.integers(0, 60))
def test_stirling_matches_alternating_sum(m, b):
    assert stirling2(m, b) == (stirling_alternating(m, b) if b <= m else 0)


@given(st.integers(1, 50), st.integers(1, 50))
def test_egf_coeff_definition(m, b):
    expected = Fraction(surjections(m, b), factorial(m))
    assert egf_coeff(m, b) == expected
    assert surjections(m, b) == factorial(b) * stirling2(m, b)


def test_stirling_table_is_thread_safe():
    results = {}

    def work(k):
        results[k] = [stirling2(300 + k, 150 + k) for _ in range(3)]

    threads = [threading.Thread(target=work, args=(k,)) for k in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for k, vals in results.items():
        assert len(set(vals)) == 1
        assert vals[0] == stirling_alternating(300 + k, 150 + k)


@given(st.integers(2, 40).flatmap(lambda n: st.tuples(st.just(n), st.integers(n + 1, 60))))
def test_derivative_identity(nm):
    n, m = nm
    assert Q(1, 1, n, m) + Q(1, 0, n, m) == Fraction(m, n)


def test_Q_regime():
    with pytest.raises(RegimeError):
        Q(0, 0, 5, 4)


def test_cycle_egf_is_one_minus_x_times_exp():
    f = (1 - TruncSeries.variable(0, (12,))) * TruncSeries.exp_of_variable(0, (12,))
    assert [cycle_egf_coeff(a) for a in range(12)] == [f[a] for a in range(12)]
    assert cycle_egf_coeff(1) == 0


def test_falling_and_multinomial():
    assert falling(5, 2) == 20 and falling(3, 4) == 0 and falling(7, 0) == 1
    assert multinomial((2, 1, 1)) == 12


# --- truncated series --------------------------------------------------------

coeff = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def series(draw, orders=(4, 3)):
    terms = {}
    for i in range(orders[0]):
        for j in range(orders[1]):
            if draw(st.booleans()):
                terms[(i, j)] = draw(coeff)
    return TruncSeries(orders, terms)


@given(series(), series(), series())
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == TruncSeries(a.orders)


@given(series())
def test_exp_log_inverse(a):
    f = a - a.constant_term()
    assert (f.log1p()).exp() == f + 1
    g = f + 2
    assert g * g.inverse() == TruncSeries.constant(1, g.orders)
    assert (g / g) == TruncSeries.constant(1, g.orders)


@given(series(), st.integers(0, 5))
def test_power_is_repeated_product(a, k):
    p = TruncSeries.constant(1, a.orders)
    for _ in range(k):
        p = p * a
    assert a**k == p


def test_univariate_exp_matches_factorials():
    e = univariate([0, 1], order=8).exp()
    assert [e[k] for k in range(8)] == [Fraction(1, factorial(k)) for k in range(8)]


def test_coefficient_substitute_evaluate():
    s = TruncSeries((3, 3), {(0, 0): 1, (1, 2): Fraction(1, 2), (2, 1): 3})
    assert s.coefficient_in(0, 1) == TruncSeries((3,), {(2,): Fraction(1, 2)})
    assert s.substitute(1, 2) == TruncSeries((3,), {(0,): 1, (1,): 2, (2,): 6})
    assert s.evaluate((1, 1)) == Fraction(9, 2)


def test_term_budget_guard():
    with pytest.raises(GuardError):
        TruncSeries((10**4, 10**4))


def test_H_is_one_at_z_equal_one():
    H = sink_source_H(4, 5, 5)
    assert H.substitute(3, 1) == TruncSeries.constant(1, (4, 4, 5))


def test_H_at_y_zero_is_one():
    H = sink_source_H(3, 4, 4)
    assert H.coefficient_in(2, 0) == TruncSeries.constant(1, (3, 3, 4))
