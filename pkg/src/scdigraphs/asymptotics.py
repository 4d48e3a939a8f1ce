"""Floating-point evaluators for the closed-form asymptotics.

Every evaluator works in log space (factorials through ``lgamma``) so values
stay finite for ``n`` up to ``1e8`` and beyond; ``value`` is ``exp(log_value)``
and may overflow to ``inf`` while ``log_value`` stays finite.

The root ``lam`` of ``lam e^lam / (e^lam - 1) = m/n`` tends to 0 as
``r/n -> 0``, so the small-``lam`` expressions are evaluated with ``expm1``
and short Taylor series instead of naive differences.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

from .errors import RegimeError
from .graph_core import DegreeSequencePair
from .series import egf_coeff

TRUSTED_MIN_R = 30


@dataclass(frozen=True)
class AsymValue:
    log_value: float
    regime_flag: str  # "trusted" | "untrusted"

    @property
    def value(self) -> float:
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf

    def to_dict(self) -> dict:
        # value is omitted once exp overflows; log_value stays exact enough
        v = self.value
        return {"log_value": self.log_value, "value": v if math.isfinite(v) else None, "regime_flag": self.regime_flag}


def regime_flag(n: int, m: int) -> str:
    return "trusted" if m - n >= TRUSTED_MIN_R else "untrusted"


# ---------------------------------------------------------------------------
# small-argument safe pieces
# ---------------------------------------------------------------------------


def _phi_minus_one(x: float) -> float:
    """``x e^x/(e^x - 1) - 1`` without cancellation near 0."""
    if x < 1e-3:
        # x/2 + x^2/12 - x^4/720 + x^6/30240
        x2 = x * x
        return x / 2 + x2 / 12 - x2 * x2 / 720 + x2 * x2 * x2 / 30240
    return x / -math.expm1(-x) - 1.0


def _phi_prime(x: float) -> float:
    if x < 1e-3:
        return 0.5 + x / 6 - x**3 / 180
    em = -math.expm1(-x)  # 1 - e^{-x}
    return (em - x * math.exp(-x)) / (em * em)


def _expm1_minus_x(x: float) -> float:
    """``e^x - 1 - x``."""
    if abs(x) < 1e-2:
        return x * x * (0.5 + x * (1 / 6 + x * (1 / 24 + x * (1 / 120 + x / 720))))
    return math.expm1(x) - x


def solve_lambda(mu: float, tol: float = 1e-13) -> float:
    """Positive root of ``x e^x / (e^x - 1) = mu`` for ``mu > 1``.

    Bisection on ``[0, mu]`` brackets the root, Newton polishes it.
    """
    mu = float(mu)
    if not mu > 1.0:
        raise RegimeError(f"mu must exceed 1 (root degenerates to 0), got {mu}")
    target = mu - 1.0
    lo, hi = 0.0, mu
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _phi_minus_one(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-3 * hi:
            break
    x = 0.5 * (lo + hi)
    for _ in range(50):
        step = (_phi_minus_one(x) - target) / _phi_prime(x)
        x_new = min(max(x - step, lo), hi)
        if abs(x_new - x) <= tol * x:
            x = x_new
            break
        x = x_new
    return x


def _lambda_for(n: int, m: int) -> float:
    if not m > n:
        raise RegimeError(f"need m > n, got n={n}, m={m}")
    return solve_lambda(m / n)


@dataclass(frozen=True)
class ModelParams:
    n: int
    n1: int
    m: int
    r: int
    r1: int
    lam: float
    lam1: float
    mu: float
    varY: float
    varY1: float
    eta: float
    sigma: float

    def to_dict(self) -> dict:
        return asdict(self)


def _var_trunc_poisson(n: int, m: int, lam: float) -> float:
    # mean mu = m/n; variance mu (lam - (mu - 1)) with mu - 1 = r/n
    return (m / n) * (lam - (m - n) / n)


def model_params(n: int, m: int, n1: int | None = None) -> ModelParams:
    n1 = n if n1 is None else n1
    if not (1 <= n1 <= n):
        raise ValueError(f"need 1 <= n1 <= n, got n1={n1}, n={n}")
    lam = _lambda_for(n, m)
    lam1 = lam if n1 == n else _lambda_for(n1, m)
    return ModelParams(
        n=n,
        n1=n1,
        m=m,
        r=m - n,
        r1=m - n1,
        lam=lam,
        lam1=lam1,
        mu=m / n,
        varY=_var_trunc_poisson(n, m, lam),
        varY1=_var_trunc_poisson(n1, m, lam1),
        eta=m / n + lam * lam1 / 2,
        sigma=lam * math.exp(-lam1) / math.expm1(lam),
    )


# ---------------------------------------------------------------------------
# counts of digraphs with positive in/out-degrees
# ---------------------------------------------------------------------------


def log_c11_asym2(n1: int, n: int, m: int) -> float:
    p = model_params(n, m, n1)
    return (
        math.lgamma(m + 1)
        + n * math.log(math.expm1(p.lam))
        + n1 * math.log(math.expm1(p.lam1))
        - m * (math.log(p.lam) + math.log(p.lam1))
        - p.eta
        - math.log(2 * math.pi)
        - 0.5 * math.log(n * p.varY)
        - 0.5 * math.log(n1 * p.varY1)
    )


def c11_asym2(n1: int, n: int, m: int) -> AsymValue:
    return AsymValue(log_c11_asym2(n1, n, m), regime_flag(n, m))


def log_c11_asym(n: int, m: int) -> float:
    p = model_params(n, m)
    return (
        math.lgamma(m + 1)
        + 2 * n * math.log(math.expm1(p.lam))
        - 2 * m * math.log(p.lam)
        - p.eta
        - math.log(2 * math.pi * n * p.varY)
    )


def c11_asym(n: int, m: int) -> AsymValue:
    return AsymValue(log_c11_asym(n, m), regime_flag(n, m))


# ---------------------------------------------------------------------------
# no simple sink/source-sets, strongly connected counts
# ---------------------------------------------------------------------------


def _log_noss_ratio(lam: float) -> float:
    """log of (1 - lam/(e^lam-1))^2 / (1 - lam/(e^lam (e^lam-1)))."""
    f = math.expm1(lam)
    a = _expm1_minus_x(lam)  # e^lam - 1 - lam
    b = a - lam * math.expm1(-lam)  # e^lam - 1 - lam e^{-lam}, both terms >= 0
    return 2 * (math.log(a) - math.log(f)) - (math.log(b) - math.log(f))


def p_noss_mg_asym(n: int, m: int) -> AsymValue:
    lam = _lambda_for(n, m)
    return AsymValue(_log_noss_ratio(lam), regime_flag(n, m))


def p_noss_digraph_asym(n: int, m: int) -> AsymValue:
    """The multigraph ratio times ``exp(-m/n - lam^2/2)``, as printed for the
    digraph model. Compare with ``p_noss_mg_asym`` before trusting either."""
    lam = _lambda_for(n, m)
    return AsymValue(_log_noss_ratio(lam) - m / n - lam * lam / 2, regime_flag(n, m))


def log_g_asym(n: int, m: int) -> float:
    p = model_params(n, m)
    return (
        math.lgamma(m + 1)
        - math.log(2 * math.pi * n * p.varY)
        + 2 * n * math.log(math.expm1(p.lam))
        - 2 * m * math.log(p.lam)
        + _log_noss_ratio(p.lam)
        - m / n
        - p.lam * p.lam / 2
    )


def g_asym(n: int, m: int) -> AsymValue:
    """Leading term for the number of strongly connected digraphs."""
    return AsymValue(log_g_asym(n, m), regime_flag(n, m))


def g_asym_small_r(n: int, m: int, variant: str = "limit") -> AsymValue:
    """Closed form for ``r = o(sqrt n)``: ``m!/(6 pi e n) (c n/(2r))^(2r)``.

    ``variant="limit"`` uses ``c = e``, the small-``lam`` limit of ``g_asym``
    (``(e^lam-1)^(2n)/lam^(2m)`` contributes ``e^(2r) (n/2r)^(2r)``).
    ``variant="printed"`` uses ``c = 1`` and sits a factor ``e^(-2r)`` below.
    """
    r = m - n
    if r <= 0:
        raise RegimeError(f"need m > n, got n={n}, m={m}")
    if variant not in ("limit", "printed"):
        raise ValueError(f"unknown variant {variant!r}")
    log_v = math.lgamma(m + 1) - math.log(6 * math.pi * math.e * n) + 2 * r * math.log(n / (2 * r))
    if variant == "limit":
        log_v += 2 * r
    return AsymValue(log_v, regime_flag(n, m))


# ---------------------------------------------------------------------------
# local limit theorem for sums of positive Poissons
# ---------------------------------------------------------------------------


def lclt_gaussian(n: int, m: int) -> float:
    """Gaussian prediction ``1/sqrt(2 pi n Var Y)`` for ``P(Y_1+...+Y_n = m)``."""
    if m == n:
        return math.inf
    p = model_params(n, m)
    return 1.0 / math.sqrt(2 * math.pi * n * p.varY)


def _log_fraction(q: Fraction) -> float:
    return math.log(q.numerator) - math.log(q.denominator)


def lclt_exact(n: int, m: int) -> float:
    """``P(Y_1 + ... + Y_n = m) = lam^m [x^m](e^x-1)^n / (e^lam - 1)^n`` from the
    exact rational coefficient. For ``m == n`` the limit ``lam -> 0`` forces
    every ``Y_i = 1`` and the value is 1."""
    if m < n:
        return 0.0
    if m == n:
        return 1.0
    lam = _lambda_for(n, m)
    log_p = m * math.log(lam) + _log_fraction(egf_coeff(m, n)) - n * math.log(math.expm1(lam))
    return math.exp(log_p)


def egf_coeff_asym(m: int, n: int, lam_power: int = 1) -> float:
    """Saddle-point estimate ``(e^lam-1)^n / lam^(k m) / sqrt(2 pi n Var Y)`` of
    ``[x^m](e^x-1)^n`` in log space; ``lam_power=k`` selects the exponent."""
    p = model_params(n, m)
    return n * math.log(math.expm1(p.lam)) - lam_power * m * math.log(p.lam) - 0.5 * math.log(2 * math.pi * n * p.varY)


# ---------------------------------------------------------------------------
# fudge factor estimate
# ---------------------------------------------------------------------------


def fudge_asym(dsp: DegreeSequencePair) -> float:
    """``exp(-(1/m) sum d_i D_i - (1/2m^2) sum (d_i)_2 sum (D_j)_2)``; its accuracy
    needs the maximum degree to be ``o(m^{1/4})``."""
    m = dsp.m
    if m == 0:
        return 1.0
    s1 = sum(d * D for d, D in zip(dsp.delta, dsp.Delta))
    s_in = sum(d * (d - 1) for d in dsp.delta)
    s_out = sum(d * (d - 1) for d in dsp.Delta)
    return math.exp(-s1 / m - s_in * s_out / (2 * m * m))


def fudge_asym_regime(dsp: DegreeSequencePair) -> str:
    D = max(dsp.delta + dsp.Delta, default=0)
    return "trusted" if 10 * D**4 <= dsp.m else "untrusted"


# ---------------------------------------------------------------------------
# the auxiliary function G(z)
# ---------------------------------------------------------------------------


def G_of_z(z: float) -> float:
    w = 1 + 0.5 * z * z
    return math.log1p(0.5 * z * z) - z**3 / w + z * z / w


def G_root() -> float:
    """Positive zero of ``G``, by bisection (``G > 0`` on ``(0, z0)``)."""
    lo, hi = 1.0, 3.0
    assert G_of_z(lo) > 0 > G_of_z(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if G_of_z(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
