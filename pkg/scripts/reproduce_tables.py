"""Recompute the tabulated success probabilities and ambiguous sets, optionally to CSV.

    python scripts/reproduce_tables.py --n-max 6 --csv table1.csv
"""

import argparse
import csv
import sys
import time

from distinguish.reproduce import table1, table2


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=8)
    ap.add_argument("--csv", default=None, help="write the success cells here")
    args = ap.parse_args()

    t0 = time.perf_counter()
    cells = table1(range(2, args.n_max + 1))
    for c in cells:
        print(c.line())
    checks = table2(range(2, min(args.n_max, 5) + 1))
    for c in checks:
        print(c.line())
    print(f"done in {time.perf_counter() - t0:.1f}s")

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["N", "network", "target", "column", "computed", "expected", "status"])
            for c in cells:
                w.writerow([c.N, c.network, c.target, c.column, f"{c.computed:.15g}", str(c.expected), c.status])

    statuses = [c.status for c in cells] + [c.status for c in checks]
    return 1 if "FAIL" in statuses else 0


if __name__ == "__main__":
    sys.exit(main())
