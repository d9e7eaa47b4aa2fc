"""Timing table for permuted torus pairs (and complete graphs), written as CSV with a log-log slope.

    python scripts/bench_torus.py --sides 3,4,5,6,7 --out bench_torus.csv
"""

import argparse
import csv
import sys

from isoperturb import RunConfig
from isoperturb.cli import BENCH_FIELDS, bench_rows, loglog_slope


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sides", default="3,4,5,6")
    ap.add_argument("--complete", default="4,5,6,7,8", help="orders of complete graphs; empty to skip")
    ap.add_argument("--backend", choices=["exact", "bigfloat"], default="exact")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    config = RunConfig(backend=args.backend, seed=args.seed)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.DictWriter(fh, fieldnames=BENCH_FIELDS, lineterminator="\n")
    writer.writeheader()
    for family, sizes in (("torus", args.sides), ("complete", args.complete)):
        if not sizes:
            continue
        rows = bench_rows(family, [int(s) for s in sizes.split(",")], config)
        writer.writerows(rows)
        fh.flush()
        slope = loglog_slope(rows)
        print(f"{family}: log-log slope of seconds vs n = {slope:.2f}" if slope is not None
              else f"{family}: too few points for a fit", file=sys.stderr)
        if family == "torus":
            for r in rows:
                print(f"  n={r['n']}: n0={r['n0']} (sqrt n = {r['n'] ** 0.5:.2f})", file=sys.stderr)
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
