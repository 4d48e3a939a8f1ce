"""Exact counts and probabilities: brute-force oracles, inclusion-exclusion
counts of degree-constrained digraphs, fudge factors, and the exact
no-isolated-cycle / no-simple-sink-or-source probabilities.

Counts are Python ``int``; probabilities are ``Fraction``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product
from math import comb, factorial, prod

import numpy as np

from .errors import GuardError, RegimeError
from .graph_core import (
    DegreeSequencePair,
    Digraph,
    MultiDigraph,
    has_isolated_cycle,
    is_strongly_connected,
    simple_ss_cycle_length,
)
from .series import (
    TruncSeries,
    cycle_egf_coeff,
    egf_coeff,
    falling,
    multinomial,
    sink_source_H,
    stirling2,
)

BRUTE_MAX_N = 5
IE_MAX_N = 500


@dataclass(frozen=True)
class CountResult:
    value: object
    method: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("counts and probabilities are non-negative")
        if isinstance(self.value, Fraction) and self.value > 1:
            raise ValueError("probability exceeds 1")


def _brute_guard(n: int) -> None:
    if n > BRUTE_MAX_N:
        raise GuardError(f"brute-force enumeration refuses n={n} > {BRUTE_MAX_N}")
    if n < 1:
        raise ValueError("n must be positive")


def all_arcs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(n) if i != j]


# ---------------------------------------------------------------------------
# brute-force digraph oracles (n <= 5)
# ---------------------------------------------------------------------------


def iter_c11_digraphs(n: int, m: int):
    """Arc tuples of all digraphs on ``n`` vertices with ``m`` arcs whose in-
    and out-degrees are all positive."""
    _brute_guard(n)
    arcs = all_arcs(n)
    full = (1 << n) - 1
    tails = [1 << i for i, _ in arcs]
    heads = [1 << j for _, j in arcs]
    for idx in combinations(range(len(arcs)), m):
        t = h = 0
        for k in idx:
            t |= tails[k]
            h |= heads[k]
        if t == full and h == full:
            yield tuple(arcs[k] for k in idx)


def c11_brute(n: int, m: int) -> int:
    return sum(1 for _ in iter_c11_digraphs(n, m))


def c110_brute(n: int, m: int) -> int:
    """Digraphs with positive in/out-degrees and no isolated cycle."""
    return sum(1 for a in iter_c11_digraphs(n, m) if not has_isolated_cycle(Digraph(n, frozenset(a))))


def g_brute(n: int, m: int) -> int:
    """Strongly connected digraphs on ``[n]`` with ``m`` arcs."""
    if n == 1:
        return 1 if m == 0 else 0
    return sum(1 for a in iter_c11_digraphs(n, m) if is_strongly_connected(Digraph(n, frozenset(a))))


def g_by_degrees_brute(dsp: DegreeSequencePair) -> int:
    """Number of simple digraphs with in-degrees ``delta`` and out-degrees ``Delta``."""
    n = dsp.n
    _brute_guard(n)
    delta, Delta = dsp.delta, dsp.Delta
    if any(d > n - 1 for d in delta + Delta):
        return 0
    # choose out-neighbourhoods vertex by vertex, tracking residual in-degrees
    options = [
        [c for c in combinations([j for j in range(n) if j != i], Delta[i])] for i in range(n)
    ]
    count = 0

    def rec(i, resid):
        nonlocal count
        if i == n:
            if not any(resid):
                count += 1
            return
        for c in options[i]:
            if all(resid[j] > 0 for j in c):
                nxt = list(resid)
                for j in c:
                    nxt[j] -= 1
                rec(i + 1, nxt)

    rec(0, list(delta))
    return count


# ---------------------------------------------------------------------------
# inclusion-exclusion for C_{1,1}((n1, n), m)
# ---------------------------------------------------------------------------


def _c11_four_index(n1: int, n: int, m: int) -> int:
    """Sum over the in-degree-zero set ``A`` and out-degree-zero set ``B``,
    grouped by ``|A & [n1]|``, ``|A - [n1]|``, ``|B|`` and ``|A & B|``."""
    total = 0
    for a1 in range(n1 + 1):
        for a2 in range(n - n1 + 1):
            wa = comb(n1, a1) * comb(n - n1, a2)
            for b in range(n1 + 1):
                for c in range(max(0, a1 + b - n1), min(a1, b) + 1):
                    ways = wa * comb(a1, c) * comb(n1 - a1, b - c)
                    allowed = (n1 - b) * (n - a1 - a2) - (n1 - a1 - b + c)
                    term = ways * comb(allowed, m)
                    total += -term if (a1 + a2 + b) & 1 else term
    return total


def _g_power(k: int, e: int, r: int) -> list[int]:
    """Coefficients ``t^0..t^r`` of ``g_k(t)^e`` with ``g_k = ((1+t)^k - 1)/t``.

    Uses the power recurrence ``P_l = sum_i ((e+1) i - l) g_i P_{l-i} / (l g_0)``,
    whose divisions are exact because ``P`` has integer coefficients.
    """
    out = [0] * (r + 1)
    if e == 0:
        out[0] = 1
        return out
    if k <= 0:
        return out
    g = [comb(k, i + 1) for i in range(min(k, r + 1))]
    g0 = g[0]
    out[0] = g0**e
    for l in range(1, r + 1):
        acc = 0
        for i in range(1, min(l, len(g) - 1) + 1):
            acc += ((e + 1) * i - l) * g[i] * out[l - i]
        q, rem = divmod(acc, l * g0)
        assert rem == 0
        out[l] = q
    return out


def _c11_row_ie(n1: int, n: int, m: int) -> int:
    """Inclusion-exclusion over empty rows only; columns are then independent.

    With ``s`` non-empty-allowed rows, ``s`` columns have ``s - 1`` usable cells
    (no loops) and ``n - s`` have ``s``. Every column needs at least one arc, so
    only the excess ``r = m - n`` over that minimum has to be tracked.
    """
    r = m - n
    if r < 0:
        return 0
    if n == 0:
        return 1 if m == 0 else 0
    total = 0
    for b in range(n1 + 1):
        s = n1 - b
        p = _g_power(s - 1, s, r)
        q = _g_power(s, n - s, r)
        coef = sum(p[i] * q[r - i] for i in range(r + 1))
        term = comb(n1, b) * coef
        total += -term if b & 1 else term
    return total


def c11_ie(n1: int, n: int, m: int, method: str = "auto", max_n: int = IE_MAX_N) -> int:
    """Number of digraphs on ``[n]`` with ``m`` arcs, every in-degree positive,
    out-degree positive on ``[n1]`` and zero beyond ``n1``.

    ``method="four_index"`` is the direct inclusion-exclusion over both the
    in- and out-degree-zero sets; ``"row_ie"`` excludes empty rows only and
    handles columns by a truncated product (fast for large ``n``); ``"auto"``
    picks the former for ``n <= 12``.
    """
    if not 0 <= n1 <= n:
        raise ValueError(f"need 0 <= n1 <= n, got n1={n1}, n={n}")
    if n > max_n:
        raise GuardError(f"inclusion-exclusion refuses n={n} > {max_n}")
    if m < 0:
        return 0
    if method == "auto":
        method = "four_index" if n <= 12 else "row_ie"
    if method == "four_index":
        return _c11_four_index(n1, n, m)
    if method == "row_ie":
        return _c11_row_ie(n1, n, m)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# insertion sequences and fudge factors
# ---------------------------------------------------------------------------


def h11_exact(n: int, m: int) -> int:
    """Number of ``m``-long arc-insertion sequences on ``[n]`` (loops allowed)
    producing a multigraph with all in- and out-degrees positive."""
    if n < 1 or m < n:
        raise RegimeError(f"need m >= n >= 1, got n={n}, m={m}")
    return (factorial(n) * stirling2(m, n)) ** 2


def h11_brute(n: int, m: int) -> int:
    """Exhaustive count over all ``(n^2)^m`` insertion sequences."""
    _brute_guard(n)
    full = (1 << n) - 1
    k = n * n
    count = 0
    for seq in product(range(k), repeat=m):
        t = h = 0
        for a in seq:
            t |= 1 << (a // n)
            h |= 1 << (a % n)
        count += t == full and h == full
    return count


def multiseq_count(mu) -> int:
    """Insertion sequences producing exactly the arc multiplicities ``mu``
    (an ``n x n`` matrix, ``mu[j][i]`` arcs ``j -> i``): a multinomial."""
    flat = [int(x) for row in mu for x in row]
    return multinomial(flat)


def h_by_degrees(dsp: DegreeSequencePair) -> int:
    """Insertion sequences producing a multigraph with degrees ``dsp``."""
    return multinomial(dsp.delta) * multinomial(dsp.Delta)


def fudge_exact(dsp: DegreeSequencePair) -> Fraction:
    """``g(delta, Delta) * prod(delta_i! Delta_i!) / m!``: the chance a uniform
    stub bijection produces a simple digraph."""
    if any(d > dsp.n - 1 for d in dsp.delta + dsp.Delta):
        return Fraction(0)
    g = g_by_degrees_brute(dsp)
    w = prod(factorial(d) for d in dsp.delta) * prod(factorial(d) for d in dsp.Delta)
    return Fraction(g * w, factorial(dsp.m))


def mean_fudge_exact(n: int, m: int) -> Fraction:
    """``m! C_{1,1}(n, m) / h_{1,1}(n, m)``."""
    _brute_guard(n)
    return Fraction(factorial(m) * c11_brute(n, m), h11_exact(n, m))


# ---------------------------------------------------------------------------
# no isolated cycles
# ---------------------------------------------------------------------------


def p_no_isolated_cycle_exact(n1: int, n: int, m: int, method: str = "auto") -> Fraction:
    """Probability that a uniform digraph counted by ``C_{1,1}((n1, n), m)`` has
    no isolated cycle, via binomial-moment inversion:

        sum_a (n1)_a C_{1,1}((n1-a, n-a), m-a) [x^a](1-x)e^x / C_{1,1}((n1, n), m)
    """
    base = c11_ie(n1, n, m, method=method)
    if base == 0:
        raise RegimeError(f"C_11((n1={n1}, n={n}), m={m}) = 0")
    total = Fraction(0)
    for a in range(0, n1 + 1):
        if m - a < 0:
            break
        sub = c11_ie(n1 - a, n - a, m - a, method=method)
        if sub:
            total += falling(n1, a) * sub * cycle_egf_coeff(a)
    return total / base


# ---------------------------------------------------------------------------
# no simple sink/source-sets in the insertion-sequence multigraph
# ---------------------------------------------------------------------------


def p_no_simple_ss_mg_exact(n: int, m: int, upper: str = "a<=n") -> Fraction:
    """Exact probability that the uniform insertion-sequence multigraph with
    positive degrees has no simple sink-set and no simple source-set:

        1 + sum_a (n)_a/(m)_a Q(a, a-1)^2 - (n/m) (Q(1,1) + Q(1,0))^2

    ``upper="a<=n"`` sums ``1 <= a <= n``; ``"a<n"`` drops the ``a = n`` term
    (kept only for comparison: the exhaustive oracle rules it out).
    """
    if not (m > n >= 2):
        raise RegimeError(f"need m > n >= 2, got n={n}, m={m}")
    if upper not in ("a<=n", "a<n"):
        raise ValueError(f"unknown upper limit {upper!r}")
    top = n if upper == "a<=n" else n - 1
    D = egf_coeff(m, n)
    D2 = D * D
    total = Fraction(1)
    for a in range(1, top + 1):
        num = egf_coeff(m - a, n - a + 1)
        total += Fraction(falling(n, a), falling(m, a)) * num * num / D2
    q = (egf_coeff(m - 1, n - 1) + egf_coeff(m - 1, n)) / D
    total -= Fraction(n, m) * q * q
    return total


def pgf_X_mg_exact(n: int, m: int, z_order: int | None = None) -> TruncSeries:
    """Probability generating function (in ``z``) of the total length ``X`` of
    cycles in simple sink/source-sets of the uniform insertion-sequence
    multigraph with positive degrees:

        E[z^X] = (m!)^2/h_11 sum_a (n)_a/(m)_a [(x1 x2)^(m-a) y^a] H(x,y,z) prod_i (e^{x_i}-1)^(n-a)

    ``X <= n``, so the default ``z_order = n + 1`` keeps the full distribution.
    """
    if n < 1 or m < n:
        raise RegimeError(f"need m >= n >= 1, got n={n}, m={m}")
    if n > 6 or m > 8:
        raise GuardError(f"generating-function route limited to n <= 6, m <= 8 (got {n}, {m})")
    z_order = n + 1 if z_order is None else int(z_order)
    y_order = n + 1
    H = sink_source_H((m + 1, m + 1), y_order, max(z_order, y_order))
    D = egf_coeff(m, n)
    out = [Fraction(0)] * z_order
    for a in range(0, n + 1):
        w = Fraction(falling(n, a), falling(m, a))
        Ha = H.coefficient_in(2, a)  # (x1, x2, z)
        ea = [egf_coeff(j, n - a) for j in range(m - a + 1)]
        for (i, j, k), c in Ha.coeffs.items():
            if k >= z_order or i > m - a or j > m - a:
                continue
            out[k] += w * c * ea[m - a - i] * ea[m - a - j]
    return TruncSeries((z_order,), {(k,): v / (D * D) for k, v in enumerate(out)})


def _mg_X(n: int, arcs) -> int | None:
    """``X`` for a multigraph given by its arc list, or ``None`` if some in- or
    out-degree vanishes."""
    g = MultiDigraph(n, tuple(arcs))
    if 0 in g.in_degrees() or 0 in g.out_degrees():
        return None
    return simple_ss_cycle_length(g)


def mg_X_distribution(n: int, m: int, method: str = "multisets", chunk: int = 1 << 20) -> dict[int, Fraction]:
    """Exhaustive law of ``X`` under the uniform insertion-sequence multigraph.

    ``method="sequences"`` walks all ``(n^2)^m`` sequences (numpy, chunked),
    tallying how many land on each arc multiset; ``"multisets"`` walks arc
    multisets and weights each by its multinomial sequence count.
    """
    _brute_guard(n)
    k = n * n
    weights: Counter = Counter()
    if method == "multisets":
        for ms in combinations_with_replacement(range(k), m):
            mult = Counter(ms)
            weights[ms] = multinomial(mult.values())
    elif method == "sequences":
        total = k**m
        base = m + 1
        pw = np.array([base**i for i in range(k)], dtype=np.int64)
        if base**k >= 2**62:
            raise GuardError("multiset key does not fit in 64 bits")
        keys: Counter = Counter()
        for start in range(0, total, chunk):
            idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
            counts = np.zeros((idx.size, k), dtype=np.int64)
            rows = np.arange(idx.size)
            rem = idx.copy()
            for _ in range(m):
                np.add.at(counts, (rows, rem % k), 1)
                rem //= k
            code = counts @ pw
            uniq, cnt = np.unique(code, return_counts=True)
            for u, c in zip(uniq.tolist(), cnt.tolist()):
                keys[u] += c
        for code, c in keys.items():
            ms = []
            for a in range(k):
                code, d = divmod(code, base)
                ms.extend([a] * d)
            weights[tuple(ms)] = c
    else:
        raise ValueError(f"unknown method {method!r}")
    dist: Counter = Counter()
    valid = 0
    for ms, w in weights.items():
        x = _mg_X(n, [(a // n, a % n) for a in ms])
        if x is None:
            continue
        dist[x] += w
        valid += w
    if valid == 0:
        raise RegimeError(f"no multigraph with positive degrees at n={n}, m={m}")
    return {x: Fraction(c, valid) for x, c in sorted(dist.items())}


def p_no_simple_ss_mg_oracle(n: int, m: int, method: str = "multisets") -> Fraction:
    return mg_X_distribution(n, m, method=method).get(0, Fraction(0))
