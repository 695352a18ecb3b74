#!/usr/bin/env python3
"""Distance-vs-n sweep for the window-exceedance experiment.

Reproduces the O(n^{-1/2}) decay of the centered-binomial approximation
error for the exceedance count: runs the Monte Carlo experiment at a
geometric ladder of n, writes one CSV row per scale plus a fitted-slope
footer.  Expect a few minutes at the default rep count.
"""

import argparse
import sys

from binapprox.cli import main as cli_main


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scales", type=int, nargs="+",
                    default=[400, 1600, 6400, 25600])
    ap.add_argument("--r", type=int, default=2)
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--dist", default="exponential")
    ap.add_argument("--reps", type=int, default=10 ** 6)
    ap.add_argument("--seed", type=int, default=20260825)
    ap.add_argument("--metric", default="tv", choices=["tv", "loc"])
    ap.add_argument("--out", default="rscan_rates.csv")
    return ap.parse_args()


if __name__ == "__main__":
    args = parse_args()
    argv = ["rates", "--app", "rscan",
            "--scales", *[str(s) for s in args.scales],
            "--r", str(args.r), "--a", str(args.a), "--dist", args.dist,
            "--reps", str(args.reps), "--seed", str(args.seed),
            "--metric", args.metric, "--out", args.out]
    sys.exit(cli_main(argv))
