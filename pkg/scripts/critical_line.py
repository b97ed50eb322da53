#!/usr/bin/env python3
"""The transient/recurrent boundary for 1/x service tails.

With arrivals every r time units and service tail d1/x, the chain is
transient for d1 > r and null recurrent for d1 <= r.  This sweeps d1
across the boundary at r = 1, records the verdict, and fits the growth
exponent of the transience-series partial sums (analytically the series
behaves like sum n^(-d1/r): exponent max(0, 1 - d1/r), log-flat at the
boundary).

    python3 scripts/critical_line.py --d1 0.25 0.5 1.0 1.5 2.0 --n-max 1000000
"""

import argparse
import csv
import sys

from maxdater import ModelSpec, Stream
from maxdater.classify import classify, transience_series
from maxdater.dists import Deterministic, TruncatedParetoOne


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d1", type=float, nargs="+",
                    default=[0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0])
    ap.add_argument("--rate", type=float, default=1.0,
                    help="deterministic inter-arrival time r")
    ap.add_argument("--n-max", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv", default=None)
    args = ap.parse_args(argv)

    rows = []
    print(f"{'d1':>6} {'d1/r':>6} {'verdict':>16} {'fitted':>8} {'analytic':>8}")
    for d1 in args.d1:
        x0 = max(d1, 1.0)
        m = ModelSpec(Deterministic(args.rate), TruncatedParetoOne(d1, x0))
        verdict = classify(m).verdict.value
        diag = transience_series(m, 0.0, args.n_max, 100,
                                 Stream.from_seed(args.seed))
        analytic = max(0.0, 1.0 - d1 / args.rate)
        print(f"{d1:6.2f} {d1 / args.rate:6.2f} {verdict:>16} "
              f"{diag.slope:8.3f} {analytic:8.3f}")
        rows.append((d1, args.rate, verdict, diag.slope, analytic,
                     diag.verdict.value))

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("d1", "r", "verdict", "fitted_exponent",
                        "analytic_exponent", "series_verdict"))
            w.writerows(rows)
        print(f"wrote {args.csv}", file=sys.stderr)


if __name__ == "__main__":
    main()
