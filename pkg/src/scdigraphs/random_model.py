"""Samplers for the stub-pairing model and Monte Carlo estimators.

Degree sequences follow the conditioned occupancy law: ``n`` iid positive
Poissons conditioned on summing to ``m`` (``lam`` cancels, so any ``lam > 0``
gives the same law; the matched root keeps rejection cheap). A uniform stub
bijection then yields

* the insertion-sequence multigraph ``MG_{1,1}(n, m)`` directly, and
* the uniform digraph ``G_{1,1}(n, m)`` after rejecting non-simple outcomes:
  a fixed simple digraph ``G`` is hit with probability proportional to
  ``prod 1/delta_i! prod 1/Delta_i! * prod delta_i! Delta_i! / m!``, which does
  not depend on ``G``.

Randomness: ``numpy`` PCG64 streams keyed by ``(seed, worker_index)`` through
``SeedSequence``; estimates combine worker tallies in worker order, so a given
``(seed, workers, n_samples)`` always reproduces the same numbers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from .asymptotics import solve_lambda
from .errors import GuardError, RegimeError, RejectionBudgetExceeded
from .graph_core import (
    MAX_EXHAUSTIVE_N,
    DegreeSequencePair,
    Digraph,
    MultiDigraph,
    check_event_A,
    has_isolated_cycle,
    is_strongly_connected,
)

DEFAULT_BUDGET = 10**6
EVENTS = ("strongly_connected", "no_simple_ss", "no_isolated_cycle", "event_A", "simple_pairing")
MODELS = ("digraph", "multigraph")


@dataclass(frozen=True)
class McEstimate:
    event: str
    n: int
    m: int
    model: str
    mean: float
    stderr: float
    n_samples: int
    n_workers: int
    seed: int
    hits: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["workers"] = d.pop("n_workers")
        return d


@dataclass(frozen=True)
class PairingOutcome:
    dsp: DegreeSequencePair
    graph: MultiDigraph
    simple: bool


def make_rng(seed: int, worker: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(int(worker),))))


# ---------------------------------------------------------------------------
# degree sequences
# ---------------------------------------------------------------------------


def sample_ztp(lam: float, size, rng: np.random.Generator) -> np.ndarray:
    """Zero-truncated Poisson: ``1 + Poisson(lam - T)`` with ``T`` the first
    arrival of a rate-1 process on ``[0, lam]`` given that one occurs."""
    u = rng.random(size)
    t = -np.log1p(-u * -math.expm1(-lam))
    return 1 + rng.poisson(lam - t)


@lru_cache(maxsize=32)
def _log_coeff_table(n: int, r: int) -> np.ndarray:
    """``L[k, e] = log [x^(k+e)] (e^x - 1)^k`` for ``k <= n``, ``e <= r``.

    From ``(k+e) c[k,e] = k (c[k,e-1] + c[k-1,e])``: every term is positive, so
    the log-space recursion is stable.
    """
    L = np.full((n + 1, r + 1), -np.inf)
    L[0, 0] = 0.0
    for k in range(1, n + 1):
        L[k, 0] = 0.0
        for e in range(1, r + 1):
            L[k, e] = math.log(k / (k + e)) + np.logaddexp(L[k, e - 1], L[k - 1, e])
    return L


class DegreeSampler:
    """Batches of in- or out-degree vectors with law
    ``P(i) ~ prod 1/i_s!`` over positive ``i`` with ``|i| = m``.

    ``method="rejection"`` draws iid positive Poissons at the matched ``lam``
    and keeps vectors whose sum is ``m``. ``method="sequential"`` draws the
    coordinates one by one from their exact conditional laws
    ``P(Y = 1 + w | k left, excess e) = c[k-1, e-w] / ((1+w)! c[k, e])``.
    """

    def __init__(self, n: int, m: int, method: str = "sequential", budget: int = DEFAULT_BUDGET):
        if n < 1 or m < n:
            raise RegimeError(f"need m >= n >= 1, got n={n}, m={m}")
        if method not in ("rejection", "sequential"):
            raise ValueError(f"unknown degree method {method!r}")
        self.n, self.m, self.r = n, m, m - n
        self.method = method
        self.budget = budget
        self.drawn = 0
        self.accepted = 0
        if self.r > 0:
            self.lam = solve_lambda(m / n)
            if method == "sequential":
                self._L = _log_coeff_table(n, self.r)
                self._lg = np.array([math.lgamma(w + 2) for w in range(self.r + 1)])

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.drawn if self.drawn else float("nan")

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        if self.r == 0:
            self.drawn += size
            self.accepted += size
            return np.ones((size, self.n), dtype=np.int64)
        if self.method == "rejection":
            return self._rejection(size, rng)
        return self._sequential(size, rng)

    def _rejection(self, size: int, rng) -> np.ndarray:
        n, m = self.n, self.m
        out = np.empty((size, n), dtype=np.int64)
        got = 0
        since_last = 0
        chunk = max(16, min(4096, 4 * size))
        while got < size:
            y = sample_ztp(self.lam, (chunk, n), rng)
            ok = np.flatnonzero(y.sum(axis=1) == m)
            self.drawn += chunk
            take = ok[: size - got]
            if take.size:
                self.accepted += take.size
                out[got:got + take.size] = y[take]
                got += take.size
                since_last = chunk - 1 - int(take[-1])
            else:
                since_last += chunk
            if since_last > self.budget:
                raise RejectionBudgetExceeded(
                    f"degree rejection at n={n}, m={m}: no acceptance in {since_last} draws"
                )
        return out

    def _sequential(self, size: int, rng) -> np.ndarray:
        n, L, lg = self.n, self._L, self._lg
        out = np.empty((size, n), dtype=np.int64)
        e = np.full(size, self.r, dtype=np.int64)
        rows = np.arange(size)
        for i in range(n):
            k = n - i
            u = rng.random(size)
            w = np.full(size, -1, dtype=np.int64)
            cdf = np.zeros(size)
            base = L[k, e]
            step = 0
            pending = rows
            while pending.size:
                ep = e[pending]
                p = np.exp(L[k - 1, ep - step] - lg[step] - base[pending])
                cdf[pending] += p
                done = (u[pending] < cdf[pending]) | (ep == step)
                w[pending[done]] = step
                pending = pending[~done]
                step += 1
            out[:, i] = 1 + w
            e -= w
        self.drawn += size
        self.accepted += size
        return out


def sample_truncated_poisson_degrees(
    n: int,
    m: int,
    rng: np.random.Generator,
    method: str = "rejection",
    budget: int = DEFAULT_BUDGET,
) -> DegreeSequencePair:
    """One ``(delta, Delta)`` pair; the two sequences are independent."""
    s = DegreeSampler(n, m, method=method, budget=budget)
    d = s.sample(2, rng)
    return DegreeSequencePair(tuple(d[0].tolist()), tuple(d[1].tolist()))


# ---------------------------------------------------------------------------
# pairing
# ---------------------------------------------------------------------------


def sample_pairing(dsp: DegreeSequencePair, rng: np.random.Generator) -> PairingOutcome:
    """Uniform bijection from out-stubs to in-stubs; arc ``j -> i`` whenever an
    out-stub of ``j`` is matched to an in-stub of ``i``."""
    n = dsp.n
    in_stubs = np.repeat(np.arange(n), dsp.delta)
    out_stubs = np.repeat(np.arange(n), dsp.Delta)
    heads = in_stubs[rng.permutation(dsp.m)]
    g = MultiDigraph(n, tuple(zip(out_stubs.tolist(), heads.tolist())))
    return PairingOutcome(dsp, g, g.is_simple())


def pair_batch(delta: np.ndarray, Delta: np.ndarray, rng: np.random.Generator):
    """Vectorised pairing of ``B`` degree pairs; returns ``(tails, heads)``, each
    ``(B, m)``."""
    B, n = delta.shape
    m = int(delta[0].sum())
    verts = np.tile(np.arange(n), B)
    tails = np.repeat(verts, Delta.ravel()).reshape(B, m)
    in_stubs = np.repeat(verts, delta.ravel()).reshape(B, m)
    heads = rng.permuted(in_stubs, axis=1)
    return tails, heads


def simple_mask(tails: np.ndarray, heads: np.ndarray, n: int) -> np.ndarray:
    codes = np.sort(tails * n + heads, axis=1)
    dup = (np.diff(codes, axis=1) == 0).any(axis=1) if codes.shape[1] > 1 else np.zeros(len(codes), bool)
    return ~((tails == heads).any(axis=1) | dup)


def _cycle_members(nxt: np.ndarray) -> np.ndarray:
    """Vertices on cycles of the partial maps ``nxt`` (one per row, ``-1`` =
    undefined), by pointer doubling."""
    B, n = nxt.shape
    sink = B * n
    offs = (np.arange(B) * n)[:, None]
    flat = np.where(nxt >= 0, nxt + offs, sink).ravel()
    s = np.append(flat, sink)
    for _ in range(max(1, math.ceil(math.log2(n))) + 1):
        s = s[s]
    img = s[:sink]
    on = np.zeros(sink + 1, dtype=bool)
    on[img[img != sink]] = True
    return on[:sink].reshape(B, n)


def simple_ss_lengths(tails: np.ndarray, heads: np.ndarray, n: int) -> np.ndarray:
    """Per row: number of vertices on cycles of simple sink- or source-sets."""
    B, m = tails.shape
    rows = np.repeat(np.arange(B), m)
    t, h = tails.ravel(), heads.ravel()
    outdeg = np.zeros((B, n), dtype=np.int64)
    indeg = np.zeros((B, n), dtype=np.int64)
    np.add.at(outdeg, (rows, t), 1)
    np.add.at(indeg, (rows, h), 1)
    nxt = np.full((B, n), -1, dtype=np.int64)
    sel = outdeg[rows, t] == 1
    nxt[rows[sel], t[sel]] = h[sel]
    prv = np.full((B, n), -1, dtype=np.int64)
    sel = indeg[rows, h] == 1
    prv[rows[sel], h[sel]] = t[sel]
    return (_cycle_members(nxt) | _cycle_members(prv)).sum(axis=1)


class _Source:
    """Stream of degree pairs and pairings for one worker."""

    def __init__(self, n, m, rng, degree_method, budget):
        self.n, self.m, self.rng = n, m, rng
        self.deg = DegreeSampler(n, m, method=degree_method, budget=budget)
        self.budget = budget

    def pairings(self, size):
        d = self.deg.sample(2 * size, self.rng)
        delta, Delta = d[0::2], d[1::2]
        tails, heads = pair_batch(delta, Delta, self.rng)
        return tails, heads

    def uniform_digraphs(self, size, batch=None):
        """``size`` accepted simple outcomes, as ``(tails, heads)`` arrays."""
        batch = batch or max(64, min(8192, 2 * size))
        keep_t, keep_h = [], []
        got = 0
        since_last = 0
        while got < size:
            tails, heads = self.pairings(batch)
            ok = np.flatnonzero(simple_mask(tails, heads, self.n))[: size - got]
            if ok.size:
                keep_t.append(tails[ok])
                keep_h.append(heads[ok])
                got += ok.size
                since_last = 0
            else:
                since_last += batch
                if since_last > self.budget:
                    raise RejectionBudgetExceeded(
                        f"no simple pairing in {since_last} attempts at n={self.n}, m={self.m}"
                    )
        return np.concatenate(keep_t), np.concatenate(keep_h)


def sample_g11_uniform(
    n: int,
    m: int,
    rng: np.random.Generator,
    budget: int = DEFAULT_BUDGET,
    degree_method: str = "sequential",
) -> Digraph:
    """Uniform digraph on ``[n]`` with ``m`` arcs and all in/out-degrees >= 1."""
    t, h = _Source(n, m, rng, degree_method, budget).uniform_digraphs(1, batch=64)
    return Digraph(n, frozenset(zip(t[0].tolist(), h[0].tolist())))


def sample_mg11(n: int, m: int, rng: np.random.Generator, degree_method: str = "sequential") -> MultiDigraph:
    """The multigraph of a uniform insertion sequence with positive degrees."""
    t, h = _Source(n, m, rng, degree_method, DEFAULT_BUDGET).pairings(1)
    return MultiDigraph(n, tuple(zip(t[0].tolist(), h[0].tolist())))


def sample_g11_arrays(
    n: int,
    m: int,
    size: int,
    rng: np.random.Generator,
    budget: int = DEFAULT_BUDGET,
    degree_method: str = "sequential",
):
    """``size`` uniform ``G_{1,1}(n, m)`` draws as ``(tails, heads)`` arrays."""
    return _Source(n, m, rng, degree_method, budget).uniform_digraphs(size)


def pairing_simple_rate(
    dsp: DegreeSequencePair,
    n_samples: int,
    rng: np.random.Generator,
    batch: int = 8192,
) -> McEstimate:
    """Frequency of simple outcomes over uniform pairings of a fixed ``dsp``."""
    delta = np.asarray(dsp.delta, dtype=np.int64)
    Delta = np.asarray(dsp.Delta, dtype=np.int64)
    hits = 0
    left = n_samples
    while left > 0:
        size = min(batch, left)
        left -= size
        t, h = pair_batch(np.tile(delta, (size, 1)), np.tile(Delta, (size, 1)), rng)
        hits += int(simple_mask(t, h, dsp.n).sum())
    mean = hits / n_samples
    stderr = math.sqrt(mean * (1 - mean) / (n_samples - 1))
    return McEstimate("simple_pairing", dsp.n, dsp.m, "fixed_degrees", mean, stderr, n_samples, 1, -1, hits)


# ---------------------------------------------------------------------------
# estimation
# ---------------------------------------------------------------------------


def _digraph_events(event, n, tails, heads, strict, include_full):
    hits = 0
    for t, h in zip(tails.tolist(), heads.tolist()):
        g = Digraph(n, frozenset(zip(t, h)))
        if event == "strongly_connected":
            hits += is_strongly_connected(g)
        elif event == "no_isolated_cycle":
            hits += not has_isolated_cycle(g)
        else:
            hits += check_event_A(g, include_full=include_full, strict=strict)
    return hits


def _worker(args) -> int:
    event, n, m, count, seed, worker, model, degree_method, budget, strict, include_full, batch = args
    rng = make_rng(seed, worker)
    src = _Source(n, m, rng, degree_method, budget)
    hits = 0
    left = count
    while left > 0:
        size = min(batch, left)
        left -= size
        if event == "simple_pairing":
            t, h = src.pairings(size)
            hits += int(simple_mask(t, h, n).sum())
            continue
        if model == "digraph":
            t, h = src.uniform_digraphs(size)
        else:
            t, h = src.pairings(size)
        if event == "no_simple_ss":
            hits += int((simple_ss_lengths(t, h, n) == 0).sum())
        elif event == "strongly_connected" and model == "multigraph":
            hits += sum(
                is_strongly_connected(MultiDigraph(n, tuple(zip(a, b))))
                for a, b in zip(t.tolist(), h.tolist())
            )
        else:
            hits += _digraph_events(event, n, t, h, strict, include_full)
    return hits


def estimate(
    event: str,
    n: int,
    m: int,
    n_samples: int,
    seed: int = 0,
    workers: int = 1,
    model: str = "digraph",
    degree_method: str = "sequential",
    budget: int = DEFAULT_BUDGET,
    strict: bool = False,
    include_full: bool = False,
    batch: int = 4096,
) -> McEstimate:
    """Monte Carlo frequency of ``event`` over ``n_samples`` draws.

    ``model="digraph"`` samples the uniform ``G_{1,1}(n, m)``;
    ``model="multigraph"`` samples ``MG_{1,1}(n, m)``. ``simple_pairing`` counts
    simple outcomes among raw pairings (the rejection sampler's acceptance).
    ``strict`` and ``include_full`` are forwarded to ``check_event_A``.
    """
    if event not in EVENTS:
        raise ValueError(f"unknown event {event!r}; choose from {EVENTS}")
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}")
    if n < 1 or m < n:
        raise RegimeError(f"need m >= n >= 1, got n={n}, m={m}")
    if model == "multigraph" and event in ("no_isolated_cycle", "event_A"):
        raise ValueError(f"event {event!r} is defined for simple digraphs only")
    if event == "event_A" and n > MAX_EXHAUSTIVE_N:
        raise GuardError(f"event_A estimation limited to n <= {MAX_EXHAUSTIVE_N}")
    if n_samples < 2 or workers < 1:
        raise ValueError("need n_samples >= 2 and workers >= 1")
    shares = [n_samples // workers + (w < n_samples % workers) for w in range(workers)]
    jobs = [
        (event, n, m, shares[w], seed, w, model, degree_method, budget, strict, include_full, batch)
        for w in range(workers)
    ]
    if workers == 1:
        tallies = [_worker(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            tallies = list(ex.map(_worker, jobs))
    hits = 0
    for t in tallies:
        hits += t
    mean = hits / n_samples
    var = mean * (1 - mean) * n_samples / (n_samples - 1)
    return McEstimate(
        event=event,
        n=n,
        m=m,
        model=model,
        mean=mean,
        stderr=math.sqrt(var / n_samples),
        n_samples=n_samples,
        n_workers=workers,
        seed=seed,
        hits=hits,
    )


def degree_marginal_exact(n: int, m: int, j: int):
    """Exact ``P(delta_1 = j)`` under the degree law:
    ``(1/j!) [x^(m-j)](e^x-1)^(n-1) / [x^m](e^x-1)^n``."""
    from fractions import Fraction

    from .series import egf_coeff

    return Fraction(1, math.factorial(j)) * egf_coeff(m - j, n - 1) / egf_coeff(m, n)
