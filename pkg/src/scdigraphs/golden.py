"""Golden-value store: one record per line, ``op params value``.

``params`` is a comma-separated ``key=value`` list with no spaces (``-`` when
empty); ``value`` is
an exact integer or ``p/q`` rational. Lines starting with ``#`` are comments.
The default location comes from ``SCDIGRAPHS_GOLDEN`` and falls back to the
file shipped inside the package.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

ENV_VAR = "SCDIGRAPHS_GOLDEN"
PACKAGE_STORE = Path(__file__).with_name("data") / "golden.txt"


class GoldenMismatch(Exception):
    """A recomputed value disagrees with the stored one."""


def default_path() -> Path:
    env = os.environ.get(ENV_VAR)
    return Path(env) if env else PACKAGE_STORE


def format_params(params: dict) -> str:
    # "-" keeps the three-field layout when there are no parameters
    return ",".join(f"{k}={params[k]}" for k in sorted(params)) or "-"


def parse_params(text: str) -> dict:
    out = {}
    if text == "-":
        return out
    for item in filter(None, text.split(",")):
        k, v = item.split("=", 1)
        out[k] = int(v) if v.lstrip("-").isdigit() else v
    return out


@dataclass(frozen=True)
class GoldenRecord:
    op: str
    params: dict
    value: Fraction

    def key(self) -> tuple:
        return (self.op, format_params(self.params))

    def line(self) -> str:
        v = self.value
        text = str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
        return f"{self.op} {format_params(self.params)} {text}"


def load(path=None) -> dict[tuple, GoldenRecord]:
    path = Path(path) if path else default_path()
    records = {}
    if not path.exists():
        return records
    for raw in path.read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        op, params, value = line.split()
        rec = GoldenRecord(op, parse_params(params), Fraction(value))
        records[rec.key()] = rec
    return records


def lookup(op: str, params: dict, path=None) -> Fraction | None:
    rec = load(path).get((op, format_params(params)))
    return None if rec is None else rec.value


def store(record: GoldenRecord, path=None, overwrite: bool = False) -> None:
    """Append ``record``; an existing key with a different value raises unless
    ``overwrite`` is set."""
    path = Path(path) if path else default_path()
    records = load(path)
    old = records.get(record.key())
    if old is not None:
        if old.value == record.value:
            return
        if not overwrite:
            raise GoldenMismatch(
                f"{record.key()} stored as {old.value}, new value {record.value}; pass overwrite to replace"
            )
    records[record.key()] = record
    path.parent.mkdir(parents=True, exist_ok=True)
    body = "\n".join(r.line() for r in sorted(records.values(), key=GoldenRecord.key))
    path.write_text("# op params value\n" + body + "\n")


def check(op: str, params: dict, value: Fraction, path=None) -> bool:
    """True if the stored value equals ``value``; missing records raise."""
    stored = lookup(op, params, path)
    if stored is None:
        raise KeyError(f"no golden record for {op} {format_params(params)}")
    return stored == value
