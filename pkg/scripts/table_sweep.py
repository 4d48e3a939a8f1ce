"""Exact versus asymptotic counts over an (n, r) grid, written as CSV.

    python3 scripts/table_sweep.py --n 50:400:50 --r 10:40:10 > sweep.csv
"""

import sys

from scdigraphs.cli import run

if __name__ == "__main__":
    argv = sys.argv[1:] or ["--n", "50:200:50", "--r", "10:40:10"]
    sys.exit(run(["table", *argv, "--format", "csv"]))
