"""Numerical experiments written to results/: triviality slopes, recipe-pair
certificates, rigidity sweeps and the boundedness experiment.

Each experiment leaves a CSV (the record) and an SVG drawn from it.

    python3 scripts/run_experiments.py --out results
    python3 scripts/run_experiments.py --only triviality recipes
"""

import argparse
import sys
import time
from pathlib import Path

from fracweights.cli import main as cli_main
from fracweights.conditions import hcal_value
from fracweights.config import dumps
from fracweights.params import Ball, FracParams
from fracweights.power_weights import construct_example_pair
from fracweights.report import loglog_svg, write_csv
from fracweights.supsearch import certify_membership, rigidity_probe, triviality_probe
from fracweights.weights import PowerWeight, WeightPair

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
ONE = PowerWeight(0.0)


def triviality(out: Path):
    bases = [FracParams(1, 1, 0.75, 0.25, (2.0,)), FracParams(1, 2, 1.0, 0.5, (4.0, 4.0)),
             FracParams(2, 2, 2.0, 0.0, (2.0, 2.0))]
    rows, series = [], {}
    for base in bases:
        pair = WeightPair(ONE, (ONE,) * base.m)
        for s in (0.0, 0.1, 0.2, 0.5):
            params = FracParams(base.n, base.m, base.gamma, base.gap + s, base.p_vec, strict=False)
            rep = triviality_probe(pair, params)
            rows.append({"n": base.n, "m": base.m, "gamma": base.gamma, "shift": s, "delta": params.delta,
                         "fitted": rep.fitted, "predicted": rep.predicted, "case": rep.case})
            if base.m == 2 and base.n == 1:
                series[f"shift {s:g}"] = (rep.radii, rep.values)
    write_csv(out / "triviality.csv", rows, ("n", "m", "gamma", "shift", "delta", "fitted", "predicted", "case"))
    (out / "triviality.svg").write_text(loglog_svg(series, "whole-space functional as R -> 0 (n=1, m=2)",
                                                   "R", "value"), encoding="utf-8")
    return max(abs(r["fitted"] - r["shift"]) for r in rows)


def recipes(out: Path):
    sets = [FracParams(1, 2, 0.5, -2.0, (2.0, 2.0)), FracParams(1, 2, 0.5, -2.0, (1.0, 2.0)),
            FracParams(2, 2, 1.0, -4.0, (2.0, 3.0)), FracParams(1, 3, 1.0, -2.5, (1.0, 2.0, 4.0))]
    rows, series = [], {}
    for params in sets:
        ex = construct_example_pair(params)
        cert = certify_membership(ex.pair, params)
        est = cert.estimate
        rows.append({"n": params.n, "m": params.m, "gamma": params.gamma, "delta": params.delta,
                     "p_vec": ";".join(f"{p:g}" for p in params.p_vec), "alpha": ex.pair.w.exponent,
                     "betas": ";".join(f"{v.exponent:.6g}" for v in ex.pair.v), "sup": est.sup_value,
                     "stability": est.stability, "verdict": est.verdict})
        # value along R at |x_B| = 0 and 1
        Rs = [10.0 ** (k / 4) for k in range(-16, 17)]
        for d in (0.0, 1.0):
            series[f"p={rows[-1]['p_vec']} |x_B|={d:g}"] = (
                Rs, [hcal_value(ex.pair, params, Ball.radial(d, R, params.n)).value for R in Rs])
    write_csv(out / "recipes.csv", rows, ("n", "m", "gamma", "delta", "p_vec", "alpha", "betas", "sup",
                                          "stability", "verdict"))
    (out / "recipes.svg").write_text(loglog_svg(dict(list(series.items())[:6]), "explicit pairs: value vs R",
                                                "R", "value"), encoding="utf-8")
    return [r["verdict"] for r in rows]


def rigidity(out: Path):
    v = (PowerWeight(0.1), PowerWeight(0.2))
    gap = 1.5 - 2 / 1.5
    rows, series = [], {}
    for s in (0.0, 0.1, 0.2):
        rep = rigidity_probe(v, FracParams(1, 2, 1.5, gap + s, (1.5, 1.5), strict=False))
        rows.append({"shift": s, "variation": rep.variation, "fitted": rep.fitted_blowup,
                     "rh_alpha_max_ratio": rep.rh_alpha_max_ratio, "holder_violations": rep.holder_violations})
        series[f"shift {s:g}"] = (rep.lambdas, rep.values)
    write_csv(out / "rigidity.csv", rows, ("shift", "variation", "fitted", "rh_alpha_max_ratio", "holder_violations"))
    (out / "rigidity.svg").write_text(loglog_svg(series, "related weights along dilations", "lambda", "value"),
                                      encoding="utf-8")
    return [r["fitted"] for r in rows]


def boundedness(out: Path):
    codes = {}
    for name in ("boundedness_member", "boundedness_nonmember"):
        codes[name] = cli_main(["boundedness", str(CONFIGS / f"{name}.yaml"), "--out", str(out / name)])
    return codes


EXPERIMENTS = {"triviality": triviality, "recipes": recipes, "rigidity": rigidity, "boundedness": boundedness}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--only", nargs="*", choices=sorted(EXPERIMENTS))
    args = ap.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    summary = {}
    for name in args.only or EXPERIMENTS:
        t0 = time.perf_counter()
        summary[name] = EXPERIMENTS[name](args.out)
        print(f"{name}: {summary[name]} ({time.perf_counter() - t0:.1f} s)")
    (args.out / "summary.json").write_text(dumps(summary), encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
