"""Regenerate the parameter-region figure (CSV + SVG), optionally with
empirical verdicts from sup sweeps overlaid.

    python3 scripts/region_figure.py --out results/region
    python3 scripts/region_figure.py --out results/region --overlay 3 --ppd 4 --decades 3
"""

import argparse
import sys

from fracweights.cli import main as cli_main


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/region")
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--gammas", default="0.5,1,1.5")
    ap.add_argument("--resolution", type=int, default=100)
    ap.add_argument("--overlay", type=int, default=0, help="k x k sample points per panel")
    ap.add_argument("--ppd", type=int, default=4, help="sup-grid density for the overlay")
    ap.add_argument("--decades", type=int, default=3)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args(argv)
    return cli_main(["region-map", "--out", args.out, "--n", str(args.n), "--m", str(args.m),
                     "--gammas", args.gammas, "--resolution", str(args.resolution),
                     "--overlay", str(args.overlay), "--ppd", str(args.ppd), "--decades", str(args.decades),
                     "--workers", str(args.workers)])


if __name__ == "__main__":
    sys.exit(main())
