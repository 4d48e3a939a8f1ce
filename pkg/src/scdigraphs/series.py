"""Exact truncated power series and the coefficient extractions built on them.

Everything here is exact (``int`` / ``fractions.Fraction``); there is no
floating point in this module.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from itertools import product
from math import comb, factorial, prod
from typing import Iterable, Mapping

from .errors import GuardError, RegimeError

SERIES_TERM_BUDGET = 10**7


# ---------------------------------------------------------------------------
# Stirling numbers of the second kind
# ---------------------------------------------------------------------------


class _StirlingTable:
    """Memo table ``rows[b][e] = S(b + e, b)``, indexed by excess ``e = m - b``.

    Filled by the triangular recurrence ``S(m, b) = b S(m-1, b) + S(m-1, b-1)``,
    which in excess coordinates reads ``T[b][e] = b T[b][e-1] + T[b-1][e]``.
    Rows only ever grow by appending, so readers never see a torn entry; any
    extension happens under the lock.
    """

    def __init__(self):
        self._rows: list[list[int]] = [[1]]
        self._lock = threading.Lock()

    def _extend(self, b: int, e: int) -> None:
        with self._lock:
            rows = self._rows
            # row 0: S(e, 0) = [e == 0]
            while len(rows[0]) <= e:
                rows[0].append(0)
            while len(rows) <= b:
                rows.append([1])
            for k in range(1, b + 1):
                row, prev = rows[k], rows[k - 1]
                while len(row) <= e:
                    j = len(row)
                    row.append(k * row[j - 1] + prev[j])

    def get(self, m: int, b: int) -> int:
        if m < 0 or b < 0 or b > m:
            return 0
        if b == 0:
            return 1 if m == 0 else 0
        e = m - b
        rows = self._rows
        if b >= len(rows) or e >= len(rows[b]):
            self._extend(b, e)
        return self._rows[b][e]


_STIRLING = _StirlingTable()


def stirling2(m: int, b: int) -> int:
    """Stirling number of the second kind ``S(m, b)``."""
    return _STIRLING.get(m, b)


def egf_coeff(m: int, b: int) -> Fraction:
    """``[x^m] (e^x - 1)^b``, i.e. ``b! S(m, b) / m!``."""
    if m < 0 or b < 0:
        raise ValueError("m and b must be non-negative")
    s = stirling2(m, b)
    if s == 0:
        return Fraction(0)
    return Fraction(factorial(b) * s, factorial(m))


def surjections(m: int, b: int) -> int:
    """``m! [x^m] (e^x - 1)^b``: number of surjections ``[m] -> [b]``."""
    return factorial(b) * stirling2(m, b)


def Q(a: int, b: int, n: int, m: int) -> Fraction:
    """``[x^(m-a)] (e^x-1)^(n-b) / [x^m] (e^x-1)^n``."""
    if m < n:
        raise RegimeError(f"[x^m](e^x-1)^n vanishes for m={m} < n={n}")
    if not (0 <= a <= m and 0 <= b <= n):
        raise ValueError(f"need 0 <= a <= m and 0 <= b <= n, got a={a}, b={b}")
    return egf_coeff(m - a, n - b) / egf_coeff(m, n)


def cycle_egf_coeff(a: int) -> Fraction:
    """``[x^a] (1 - x) e^x``: exponential of minus the cycle EGF (length >= 2)."""
    if a < 0:
        raise ValueError("a must be non-negative")
    if a == 0:
        return Fraction(1)
    return Fraction(1, factorial(a)) - Fraction(1, factorial(a - 1))


# ---------------------------------------------------------------------------
# truncated multivariate series
# ---------------------------------------------------------------------------


class TruncSeries:
    """Power series in ``len(orders)`` variables, truncated so that only
    exponents ``e`` with ``e[i] < orders[i]`` are kept. Coefficients are stored
    sparsely as ``Fraction`` values and zero entries are dropped.

    Instances are treated as immutable.
    """

    __slots__ = ("orders", "coeffs")

    def __init__(self, orders: Iterable[int], coeffs: Mapping[tuple, object] | None = None):
        orders = tuple(int(o) for o in orders)
        if not orders or any(o < 1 for o in orders):
            raise ValueError("need at least one variable and positive truncation orders")
        if prod(orders) > SERIES_TERM_BUDGET:
            raise GuardError(f"truncation box {orders} exceeds {SERIES_TERM_BUDGET} terms")
        self.orders = orders
        clean: dict[tuple, Fraction] = {}
        for exps, c in (coeffs or {}).items():
            exps = tuple(exps)
            if len(exps) != len(orders):
                raise ValueError(f"exponent {exps} does not match {len(orders)} variables")
            if any(e < 0 for e in exps):
                raise ValueError("negative exponent")
            if any(e >= o for e, o in zip(exps, orders)):
                continue
            c = Fraction(c)
            if c:
                clean[exps] = clean.get(exps, Fraction(0)) + c
        self.coeffs = {k: v for k, v in clean.items() if v}

    # construction -----------------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.orders)

    @classmethod
    def constant(cls, c, orders) -> "TruncSeries":
        orders = tuple(orders)
        return cls(orders, {(0,) * len(orders): c})

    @classmethod
    def variable(cls, i: int, orders) -> "TruncSeries":
        orders = tuple(orders)
        exps = [0] * len(orders)
        exps[i] = 1
        return cls(orders, {tuple(exps): 1})

    @classmethod
    def exp_of_variable(cls, i: int, orders, scale=1) -> "TruncSeries":
        """``exp(scale * x_i)`` truncated."""
        orders = tuple(orders)
        scale = Fraction(scale)
        out = {}
        for k in range(orders[i]):
            exps = [0] * len(orders)
            exps[i] = k
            out[tuple(exps)] = scale**k / factorial(k)
        return cls(orders, out)

    # access -----------------------------------------------------------------

    def __getitem__(self, exps) -> Fraction:
        if isinstance(exps, int):
            exps = (exps,)
        return self.coeffs.get(tuple(exps), Fraction(0))

    def constant_term(self) -> Fraction:
        return self[(0,) * self.nvars]

    def __repr__(self) -> str:
        return f"TruncSeries(orders={self.orders}, terms={len(self.coeffs)})"

    def __eq__(self, other) -> bool:
        if isinstance(other, TruncSeries):
            return self.orders == other.orders and self.coeffs == other.coeffs
        return NotImplemented

    __hash__ = None

    def _coerce(self, other) -> "TruncSeries":
        if isinstance(other, TruncSeries):
            if other.orders != self.orders:
                raise ValueError(f"truncation orders differ: {self.orders} vs {other.orders}")
            return other
        return TruncSeries.constant(other, self.orders)

    # ring operations --------------------------------------------------------

    def __add__(self, other) -> "TruncSeries":
        other = self._coerce(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + v
        return TruncSeries(self.orders, out)

    __radd__ = __add__

    def __neg__(self) -> "TruncSeries":
        return TruncSeries(self.orders, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other) -> "TruncSeries":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "TruncSeries":
        return self._coerce(other) - self

    def __mul__(self, other) -> "TruncSeries":
        if not isinstance(other, TruncSeries):
            c = Fraction(other)
            return TruncSeries(self.orders, {k: v * c for k, v in self.coeffs.items()})
        other = self._coerce(other)
        orders = self.orders
        out: dict[tuple, Fraction] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if any(x >= o for x, o in zip(e, orders)):
                    continue
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return TruncSeries(orders, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "TruncSeries":
        if k < 0:
            return self.inverse() ** (-k)
        result = TruncSeries.constant(1, self.orders)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def _max_total_degree(self) -> int:
        return sum(o - 1 for o in self.orders)

    def _nilpotent_sum(self, weights) -> "TruncSeries":
        """``sum_k weights(k) f^k`` for ``f`` with zero constant term."""
        if self.constant_term() != 0:
            raise ValueError("series must have zero constant term")
        total = TruncSeries.constant(weights(0), self.orders)
        power = TruncSeries.constant(1, self.orders)
        for k in range(1, self._max_total_degree() + 1):
            power = power * self
            if not power.coeffs:
                break
            w = weights(k)
            if w:
                total = total + power * w
        return total

    def inverse(self) -> "TruncSeries":
        c = self.constant_term()
        if c == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        g = self * (1 / c) - 1
        return g._nilpotent_sum(lambda k: (-1) ** k) * (1 / c)

    def __truediv__(self, other) -> "TruncSeries":
        if isinstance(other, TruncSeries):
            return self * other.inverse()
        return self * (1 / Fraction(other))

    def exp(self) -> "TruncSeries":
        """``exp(f)`` for ``f`` with zero constant term."""
        return self._nilpotent_sum(lambda k: Fraction(1, factorial(k)))

    def log1p(self) -> "TruncSeries":
        """``log(1 + f)`` for ``f`` with zero constant term."""
        return self._nilpotent_sum(lambda k: Fraction((-1) ** (k + 1), k) if k else Fraction(0))

    # slicing and substitution ----------------------------------------------

    def coefficient_in(self, var: int, k: int) -> "TruncSeries":
        """``[x_var^k] f`` as a series in the remaining variables."""
        if self.nvars == 1:
            raise ValueError("cannot drop the only variable; index directly")
        orders = self.orders[:var] + self.orders[var + 1:]
        out = {}
        for e, c in self.coeffs.items():
            if e[var] == k:
                out[e[:var] + e[var + 1:]] = c
        return TruncSeries(orders, out)

    def substitute(self, var: int, value) -> "TruncSeries":
        """Set ``x_var = value`` (summing the kept powers) and drop the variable."""
        value = Fraction(value)
        if self.nvars == 1:
            raise ValueError("cannot drop the only variable; use evaluate()")
        orders = self.orders[:var] + self.orders[var + 1:]
        out: dict[tuple, Fraction] = {}
        for e, c in self.coeffs.items():
            k = e[:var] + e[var + 1:]
            out[k] = out.get(k, Fraction(0)) + c * value ** e[var]
        return TruncSeries(orders, out)

    def evaluate(self, values) -> Fraction:
        values = [Fraction(v) for v in values]
        total = Fraction(0)
        for e, c in self.coeffs.items():
            total += c * prod(v**x for v, x in zip(values, e))
        return total


def univariate(coeffs, order: int | None = None) -> TruncSeries:
    coeffs = list(coeffs)
    order = order if order is not None else max(len(coeffs), 1)
    return TruncSeries((order,), {(i,): c for i, c in enumerate(coeffs)})


# ---------------------------------------------------------------------------
# the sink/source cycle generating function
# ---------------------------------------------------------------------------


def _cycle_factor(i: int, orders) -> TruncSeries:
    """``(1 - y e^{x_i}) / (1 - y z e^{x_i})`` over variables ``(x1, x2, y, z)``."""
    ox = orders[i]
    oy, oz = orders[2], orders[3]
    # 1/(1 - y z e^x) = sum_k y^k z^k e^{k x}
    expand = {}
    for k in range(min(oy, oz)):
        for p in range(ox):
            exps = [0, 0, k, k]
            exps[i] = p
            expand[tuple(exps)] = Fraction(k**p, factorial(p))
    num = {(0, 0, 0, 0): Fraction(1)}
    for p in range(ox):
        exps = [0, 0, 1, 0]
        exps[i] = p
        num[tuple(exps)] = Fraction(-1, factorial(p))
    return TruncSeries(orders, num) * TruncSeries(orders, expand)


def sink_source_H(x_orders, y_order: int, z_order: int) -> TruncSeries:
    """Truncated expansion of

        H(x1, x2, y, z) = (1 - y z)/(1 - y) * prod_i (1 - y e^{x_i})/(1 - y z e^{x_i})

    as a 4-variable series ordered ``(x1, x2, y, z)``; ``x_orders`` is a pair
    or a single order used for both. ``z = 1`` gives 1 identically provided
    ``z_order >= y_order`` (every power of ``z`` comes with at least as high a
    power of ``y``).
    """
    if isinstance(x_orders, int):
        x_orders = (x_orders, x_orders)
    orders = (int(x_orders[0]), int(x_orders[1]), int(y_order), int(z_order))
    if prod(orders) > SERIES_TERM_BUDGET:
        raise GuardError(f"truncation box {orders} exceeds {SERIES_TERM_BUDGET} terms")
    oy, oz = orders[2], orders[3]
    lead = {}
    for k in range(oy):
        lead[(0, 0, k, 0)] = Fraction(1)
        if k + 1 < oy:
            lead[(0, 0, k + 1, 1)] = Fraction(-1)
    return TruncSeries(orders, lead) * _cycle_factor(0, orders) * _cycle_factor(1, orders)


def falling(n: int, k: int) -> int:
    """Falling factorial ``(n)_k``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k > n >= 0:
        return 0
    return prod(range(n - k + 1, n + 1))


def multinomial(parts) -> int:
    parts = [int(p) for p in parts]
    if any(p < 0 for p in parts):
        raise ValueError("negative multinomial part")
    total, out = 0, 1
    for p in parts:
        total += p
        out *= comb(total, p)
    return out


def box(orders) -> Iterable[tuple]:
    return product(*(range(o) for o in orders))
