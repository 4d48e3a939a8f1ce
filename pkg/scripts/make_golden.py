"""Regenerate the exhaustive-oracle golden values.

    python3 scripts/make_golden.py [--path FILE] [--overwrite]
"""

import argparse
import time

from scdigraphs import golden
from scdigraphs.exact import h11_brute, mg_X_distribution

CASES = [(3, 4), (4, 6)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--path", default=None)
    ap.add_argument("--overwrite", action="store_true")
    args = ap.parse_args()
    for n, m in CASES:
        t0 = time.perf_counter()
        seq = mg_X_distribution(n, m, method="sequences")
        ms = mg_X_distribution(n, m, method="multisets")
        if seq != ms:
            raise SystemExit(f"oracles disagree at ({n},{m}): {seq} vs {ms}")
        rec = golden.GoldenRecord(
            "p_no_simple_ss_mg_oracle",
            {"n": n, "m": m, "method": "sequences", "sequences": (n * n) ** m},
            seq.get(0, 0),
        )
        golden.store(rec, args.path, overwrite=args.overwrite)
        print(rec.line(), f"({time.perf_counter() - t0:.1f}s)")
    for n, m in [(3, 4), (3, 5)]:
        rec = golden.GoldenRecord("h11_brute", {"n": n, "m": m}, h11_brute(n, m))
        golden.store(rec, args.path, overwrite=args.overwrite)
        print(rec.line())


if __name__ == "__main__":
    main()
