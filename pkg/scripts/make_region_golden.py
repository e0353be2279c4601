"""Write the reference region classification with exact rational arithmetic.

Deliberately self-contained (no package import) so the golden file is an
independent check of the raster produced by ``fracweights region-map``.

    python3 scripts/make_region_golden.py tests/golden/region_n1_m2.csv
"""

import argparse
import csv
import math
from fractions import Fraction as F


def label(gamma, inv_p, delta, n):
    gap = gamma - n * inv_p
    if delta == 1 and gap == 1:
        return "excluded_corner"
    if delta <= min(F(1), gap):
        return "admissible"
    return "trivial"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out")
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--gammas", default="1/2,1,3/2")
    ap.add_argument("--resolution", type=int, default=100)
    args = ap.parse_args()
    n, m, res = args.n, args.m, args.resolution
    gammas = [F(g) for g in args.gammas.split(",")]
    step = F(5, 100) * math.ceil(F(m * n * 100 + 250, 495))
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["gamma", "k", "j", "inv_p", "delta", "region"])
        for g in gammas:
            for j in range(res):
                delta = F(3, 2) - j * step
                for k in range(res):
                    x = F(k * m, res)
                    w.writerow([str(g), k, j, str(x), str(delta), label(g, x, delta, n)])


if __name__ == "__main__":
    main()
