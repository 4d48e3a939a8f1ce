"""Command-line entry point.

Every record is a JSON object carrying a ``config`` echo; passing that echo
back through ``--replay`` re-executes the same run. Exit codes: 0 ok,
1 golden mismatch or failed verification, 2 usage, 3 guard or regime
violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import asymptotics as asy
from . import exact as ex
from . import golden
from . import graph_core as gc
from . import random_model as rm
from .errors import GuardError, RegimeError, RejectionBudgetExceeded
from .series import Q, egf_coeff, stirling2

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_REGIME = 0, 1, 2, 3


@dataclass
class RunConfig:
    subcommand: str
    argv: list[str]
    params: dict = field(default_factory=dict)
    seed: int | None = None
    workers: int = 1
    output_format: str = "json"
    golden_store_path: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        return cls(**d)


class UsageError(Exception):
    pass


def to_jsonable(v, exact: bool = False):
    """``exact`` renders integers as decimal strings (counts overflow JSON
    doubles); rationals are always ``"p/q"`` strings."""
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, int):
        return str(v) if exact else v
    if isinstance(v, float):
        return v if math.isfinite(v) else None
    if isinstance(v, asy.AsymValue):
        return v.to_dict()
    if isinstance(v, dict):
        return {str(k): to_jsonable(x, exact) for k, x in v.items()}
    if isinstance(v, (list, tuple, frozenset, set)):
        items = sorted(v) if isinstance(v, (set, frozenset)) else v
        return [to_jsonable(x, exact) for x in items]
    if hasattr(v, "to_dict"):
        return to_jsonable(v.to_dict(), exact)
    return v


def parse_grid(spec: str) -> list[int]:
    """``start:stop:step`` inclusive, or a single integer."""
    parts = spec.split(":")
    try:
        nums = [int(p) for p in parts]
    except ValueError:
        raise UsageError(f"bad grid {spec!r}") from None
    if len(nums) == 1:
        return nums
    if len(nums) not in (2, 3):
        raise UsageError(f"bad grid {spec!r}")
    start, stop = nums[0], nums[1]
    step = nums[2] if len(nums) == 3 else 1
    if step <= 0 or stop < start:
        raise UsageError(f"bad grid {spec!r}")
    return list(range(start, stop + 1, step))


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(","))


# ---------------------------------------------------------------------------
# subcommand handlers: each returns a JSON-able result payload
# ---------------------------------------------------------------------------

EXACT_OPS = (
    "c11", "c11-brute", "g", "c110", "h11", "h11-brute", "fudge", "mean-fudge",
    "p-no-isolated", "p-noss-mg", "x-distribution", "stirling", "egf", "Q",
    "strongly-connected", "sink-sets", "source-sets", "simple-sink-sets",
    "simple-source-sets", "isolated-cycles", "event-A",
)
PREDICATES = EXACT_OPS[-7:]


def _need(args, *names):
    miss = [n for n in names if getattr(args, n) is None]
    if miss:
        raise UsageError(f"{args.op} needs --{' --'.join(miss)}")


def run_exact(args):
    op = args.op
    if op in PREDICATES:
        if not args.from_file:
            raise UsageError(f"{op} needs --from-file")
        g = gc.read_digraph(args.from_file, multi=args.multi)
        one_based = lambda sets: [sorted(v + 1 for v in s) for s in sets]  # noqa: E731
        if op == "strongly-connected":
            return gc.is_strongly_connected(g)
        if op == "sink-sets":
            return one_based(gc.find_sink_sets(g))
        if op == "source-sets":
            return one_based(gc.find_source_sets(g))
        if op == "simple-sink-sets":
            return one_based(gc.find_simple_sink_sets(g))
        if op == "simple-source-sets":
            return one_based(gc.find_simple_source_sets(g))
        if op == "isolated-cycles":
            return one_based(gc.isolated_cycles(g))
        return gc.check_event_A(g, include_full=args.include_full, strict=args.strict)
    if op == "fudge":
        _need(args, "delta", "Delta")
        return ex.fudge_exact(gc.DegreeSequencePair(_ints(args.delta), _ints(args.Delta)))
    if op == "stirling":
        _need(args, "m", "b")
        return stirling2(args.m, args.b)
    if op == "egf":
        _need(args, "m", "b")
        return egf_coeff(args.m, args.b)
    if op == "Q":
        _need(args, "a", "b", "n", "m")
        return Q(args.a, args.b, args.n, args.m)
    _need(args, "n", "m")
    n, m = args.n, args.m
    n1 = n if args.n1 is None else args.n1
    if op == "c11":
        return ex.c11_ie(n1, n, m, method=args.method)
    if op == "c11-brute":
        return ex.c11_brute(n, m)
    if op == "g":
        return ex.g_brute(n, m)
    if op == "c110":
        return ex.c110_brute(n, m)
    if op == "h11":
        return ex.h11_exact(n, m)
    if op == "h11-brute":
        return ex.h11_brute(n, m)
    if op == "mean-fudge":
        return ex.mean_fudge_exact(n, m)
    if op == "p-no-isolated":
        return ex.p_no_isolated_cycle_exact(n1, n, m)
    if op == "p-noss-mg":
        return ex.p_no_simple_ss_mg_exact(n, m, upper=args.upper)
    if op == "x-distribution":
        return ex.mg_X_distribution(n, m, method=args.oracle)
    raise UsageError(f"unknown exact op {op!r}")


ASYM_OPS = (
    "lambda", "params", "c11", "g", "g-small-r", "p-noss-mg", "p-noss-digraph",
    "lclt", "fudge", "G", "G-root",
)


def run_asym(args):
    op = args.op
    if op == "lambda":
        _need(args, "mu")
        return asy.solve_lambda(args.mu)
    if op == "G":
        _need(args, "z")
        return asy.G_of_z(args.z)
    if op == "G-root":
        return asy.G_root()
    if op == "fudge":
        _need(args, "delta", "Delta")
        dsp = gc.DegreeSequencePair(_ints(args.delta), _ints(args.Delta))
        return {"value": asy.fudge_asym(dsp), "regime_flag": asy.fudge_asym_regime(dsp)}
    _need(args, "n", "m")
    n, m = args.n, args.m
    if op == "params":
        return asy.model_params(n, m, args.n1)
    if op == "c11":
        return asy.c11_asym(n, m) if args.n1 in (None, n) else asy.c11_asym2(args.n1, n, m)
    if op == "g":
        return asy.g_asym(n, m)
    if op == "g-small-r":
        return asy.g_asym_small_r(n, m, variant=args.variant)
    if op == "p-noss-mg":
        return asy.p_noss_mg_asym(n, m)
    if op == "p-noss-digraph":
        return asy.p_noss_digraph_asym(n, m)
    if op == "lclt":
        return {"gaussian": asy.lclt_gaussian(n, m), "exact": asy.lclt_exact(n, m)}
    raise UsageError(f"unknown asym op {op!r}")


SAMPLE_KINDS = ("degrees", "pairing", "g11", "mg11")


def run_sample(args):
    rng = rm.make_rng(args.seed)
    n, m = args.n, args.m
    out = []
    for _ in range(args.count):
        if args.kind == "degrees":
            d = rm.sample_truncated_poisson_degrees(n, m, rng, method=args.degree_method, budget=args.budget)
            out.append({"delta": list(d.delta), "Delta": list(d.Delta)})
        elif args.kind == "pairing":
            d = rm.sample_truncated_poisson_degrees(n, m, rng, method=args.degree_method, budget=args.budget)
            p = rm.sample_pairing(d, rng)
            out.append({"delta": list(d.delta), "Delta": list(d.Delta), "simple": p.simple, "graph": gc.format_digraph(p.graph)})
        elif args.kind == "g11":
            g = rm.sample_g11_uniform(n, m, rng, budget=args.budget, degree_method=args.degree_method)
            out.append({"graph": gc.format_digraph(g)})
        else:
            g = rm.sample_mg11(n, m, rng, degree_method=args.degree_method)
            out.append({"graph": gc.format_digraph(g)})
    return out


def run_estimate(args):
    return rm.estimate(
        args.event,
        args.n,
        args.m,
        args.samples,
        seed=args.seed,
        workers=args.workers,
        model=args.model,
        degree_method=args.degree_method,
        budget=args.budget,
        strict=args.strict,
        include_full=args.include_full,
    )


TABLE_COLUMNS = (
    "n", "r", "m", "log_c11_exact", "log_c11_asym", "c11_ratio",
    "p_noss_mg_exact", "p_noss_mg_asym", "p_noss_ratio", "regime_flag",
)


def run_table(args):
    rows = []
    for n in parse_grid(args.n_grid):
        for r in parse_grid(args.r_grid):
            m = n + r
            if r <= 0:
                raise RegimeError(f"table needs r >= 1, got r={r}")
            exact = ex.c11_ie(n, n, m)
            le = math.log(exact)
            la = asy.log_c11_asym(n, m)
            pe = float(ex.p_no_simple_ss_mg_exact(n, m)) if n >= 2 else float("nan")
            pa = asy.p_noss_mg_asym(n, m).value
            rows.append({
                "n": n, "r": r, "m": m,
                "log_c11_exact": le, "log_c11_asym": la, "c11_ratio": math.exp(la - le),
                "p_noss_mg_exact": pe, "p_noss_mg_asym": pa, "p_noss_ratio": pa / pe,
                "regime_flag": asy.regime_flag(n, m),
            })
    return rows


def run_verify(args, emit_line):
    from .verify import VerifyConfig, run_suite

    cfg = VerifyConfig(
        level=args.level,
        seed=args.seed,
        workers=args.workers,
        golden_path=args.golden,
        mc_samples=args.samples,
    )
    only = [int(x) for x in args.only.split(",")] if args.only else None
    results = run_suite(cfg, only=only, echo=emit_line)
    return results


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scdigraphs", description="Exact, asymptotic and sampled counts of strongly connected sparse digraphs.")
    p.add_argument("--replay", help="JSON RunConfig echo (or @file) to re-run")
    sub = p.add_subparsers(dest="subcommand")

    def common(sp, seed_default=None):
        sp.add_argument("--seed", type=int, default=seed_default)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--format", dest="output_format", choices=("json", "csv"), default="json")
        sp.add_argument("--golden", default=None, help=f"golden store (default ${golden.ENV_VAR} or packaged file)")

    def nm(sp):
        sp.add_argument("--n", type=int)
        sp.add_argument("--m", type=int)
        sp.add_argument("--n1", type=int)

    e = sub.add_parser("exact", help="exact counts, probabilities and predicates")
    e.add_argument("op", choices=EXACT_OPS)
    nm(e)
    for name in ("a", "b"):
        e.add_argument(f"--{name}", type=int)
    e.add_argument("--delta")
    e.add_argument("--Delta")
    e.add_argument("--method", default="auto", choices=("auto", "four_index", "row_ie"))
    e.add_argument("--upper", default="a<=n", choices=("a<=n", "a<n"))
    e.add_argument("--oracle", default="multisets", choices=("multisets", "sequences"))
    e.add_argument("--from-file")
    e.add_argument("--multi", action="store_true")
    e.add_argument("--strict", action="store_true")
    e.add_argument("--include-full", action="store_true")
    common(e)

    a = sub.add_parser("asym", help="asymptotic evaluators")
    a.add_argument("op", choices=ASYM_OPS)
    nm(a)
    a.add_argument("--mu", type=float)
    a.add_argument("--z", type=float)
    a.add_argument("--delta")
    a.add_argument("--Delta")
    a.add_argument("--variant", default="limit", choices=("limit", "printed"))
    common(a)

    s = sub.add_parser("sample", help="draw degree sequences, pairings or digraphs")
    s.add_argument("kind", choices=SAMPLE_KINDS)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--degree-method", default="rejection", choices=("rejection", "sequential"))
    s.add_argument("--budget", type=int, default=rm.DEFAULT_BUDGET)
    common(s, seed_default=0)

    es = sub.add_parser("estimate", help="Monte Carlo event frequencies")
    es.add_argument("--event", required=True, choices=rm.EVENTS)
    es.add_argument("--n", type=int, required=True)
    es.add_argument("--m", type=int, required=True)
    es.add_argument("--samples", type=int, default=10**4)
    es.add_argument("--model", default="digraph", choices=rm.MODELS)
    es.add_argument("--degree-method", default="sequential", choices=("rejection", "sequential"))
    es.add_argument("--budget", type=int, default=rm.DEFAULT_BUDGET)
    es.add_argument("--strict", action="store_true")
    es.add_argument("--include-full", action="store_true")
    common(es, seed_default=0)

    t = sub.add_parser("table", help="exact vs asymptotic sweep over an (n, r) grid")
    t.add_argument("--n", dest="n_grid", required=True, help="start:stop:step")
    t.add_argument("--r", dest="r_grid", required=True, help="start:stop:step, r = m - n")
    common(t)

    v = sub.add_parser("verify", help="run the acceptance suite")
    v.add_argument("--level", default="desk", choices=("desk", "full"))
    v.add_argument("--only", help="comma-separated criterion numbers")
    v.add_argument("--samples", type=int, default=10**5)
    common(v, seed_default=20240611)
    return p


def _config(args, argv) -> RunConfig:
    skip = {"subcommand", "seed", "workers", "output_format", "golden", "replay"}
    params = {k: v for k, v in vars(args).items() if k not in skip}
    return RunConfig(
        subcommand=args.subcommand,
        argv=list(argv),
        params=params,
        seed=getattr(args, "seed", None),
        workers=getattr(args, "workers", 1),
        output_format=getattr(args, "output_format", "json"),
        golden_store_path=getattr(args, "golden", None),
    )


def _rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(TABLE_COLUMNS), lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.replay:
        text = args.replay
        if text.startswith("@"):
            with open(text[1:]) as fh:
                text = fh.read()
        try:
            cfg = RunConfig.from_dict(json.loads(text))
        except (ValueError, TypeError) as exc:
            print(f"error: bad replay config: {exc}", file=sys.stderr)
            return EXIT_USAGE
        return run(cfg.argv, out)
    if not args.subcommand:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    cfg = _config(args, argv)

    def emit(record):
        out.write(json.dumps(record, sort_keys=True) + "\n")

    try:
        if args.subcommand == "verify":
            results = run_verify(args, lambda line: print(line, file=sys.stderr))
            for r in results:
                emit({"config": cfg.to_dict(), "criterion": r.number, "name": r.name, "passed": r.passed, "seconds": r.seconds, "detail": to_jsonable({k: v for k, v in r.detail.items() if k != "mc"})})
            return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL
        if args.subcommand == "table":
            rows = run_table(args)
            if args.output_format == "csv":
                out.write(_rows_to_csv(rows))
            else:
                for row in rows:
                    emit({"config": cfg.to_dict(), "result": to_jsonable(row)})
            return EXIT_OK
        handler = {"exact": run_exact, "asym": run_asym, "sample": run_sample, "estimate": run_estimate}[args.subcommand]
        result = handler(args)
        if args.output_format == "csv":
            raise UsageError("csv output is available for table only")
        emit({"config": cfg.to_dict(), "op": getattr(args, "op", None) or getattr(args, "kind", None) or args.subcommand, "result": to_jsonable(result, exact=args.subcommand == "exact")})
        return EXIT_OK
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GuardError, RegimeError, RejectionBudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except golden.GoldenMismatch as exc:
        print(f"golden mismatch: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
