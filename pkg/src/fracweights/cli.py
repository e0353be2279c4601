"""Command line: ``fracweights <task> [config] [flags]``.

Exit codes: 0 member / pass, 1 non-member / fail, 2 inconclusive,
3 usage or configuration error.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .batteries import BATTERIES, BATTERY_ALIASES, run_battery
from .config import ConfigError, RegionSpec, Scenario, dumps, load_scenario
from .operators import (
    DeskScaleError,
    GridFunction,
    SingularPointError,
    _far_part,
    ball_family,
    boundedness_experiment,
    compute_aB,
    igamma_quadrature,
    j_constant,
    local_part,
)
from .params import Ball, FracParams, INF, Region, classify
from .power_weights import construct_example_pair
from .report import (
    OVERLAY_COLUMNS,
    REGION_COLUMNS,
    loglog_svg,
    read_csv,
    region_rows,
    region_svg,
    write_csv,
)
from .supsearch import GridSpec, Tolerances, certify_membership
from .weights import PowerWeight, WeightPair

EXIT_USAGE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _report(scenario: Scenario, result: dict) -> dict:
    return {"tool": "fracweights", "version": __version__, "config": scenario.resolved(), "result": result}


def _write(out: Path, name: str, text: str) -> Path:
    path = out / name
    path.write_text(text, encoding="utf-8")
    return path


def _apply_overrides(scenario: Scenario, args) -> Scenario:
    grid = scenario.grid
    if args.decades is not None:
        grid = replace(grid, d_range=(-args.decades, args.decades), R_range=(-args.decades, args.decades))
    if args.ppd is not None:
        grid = replace(grid, ppd=args.ppd)
    tol = scenario.tolerances
    tol = Tolerances(
        args.stability_bounded if args.stability_bounded is not None else tol.stability_bounded,
        args.stability_unbounded if args.stability_unbounded is not None else tol.stability_unbounded,
        args.slope_tol if args.slope_tol is not None else tol.slope,
    )
    seed = scenario.seed if args.seed is None else args.seed
    return replace(scenario, grid=grid, tolerances=tol, seed=seed)


def _scenario(args, task: str, default: dict | None = None) -> Scenario:
    if args.config is not None:
        sc = load_scenario(args.config, task)
    elif default is not None:
        sc = Scenario.from_dict(dict(default), task)
    else:
        raise ConfigError(f"task {task} needs a config file")
    return _apply_overrides(sc, args)


# ---------------------------------------------------------------------------
# membership


def cmd_membership(args) -> int:
    sc = _scenario(args, "membership")
    pair, recipe = sc.weight_pair()
    cert = certify_membership(pair, sc.params, sc.condition, sc.grid, tol=sc.tolerances, **sc.evaluator_kwargs())
    result = cert.to_dict()
    if recipe:
        result["recipe"] = recipe
    path = _write(args.out, "membership.json", dumps(_report(sc, result)))
    est = cert.estimate
    print(f"{cert.membership}: sup={est.sup_value:.6g} stability={est.stability:.3g} "
          f"verdict={est.verdict} -> {path}")
    for r in est.reasons:
        print(f"  {r}")
    return cert.exit_code


# ---------------------------------------------------------------------------
# region map


def _overlay_point(job):
    gamma, x, delta, n, m, grid_doc, tol_doc = job
    p = INF if x == 0 else m / x
    params = FracParams(n, m, gamma, delta, (p,) * m)
    if delta < gamma - m * n:
        pair = construct_example_pair(params).pair
    elif classify(gamma, n * x, delta) is Region.TRIVIAL:
        pair = WeightPair(PowerWeight(0.0), tuple(PowerWeight(0.0) for _ in range(m)))
    else:
        return None
    cert = certify_membership(pair, params, "Hcal", GridSpec.from_dict(grid_doc), tol=Tolerances(**tol_doc))
    est = cert.estimate
    return {"gamma": gamma, "inv_p": x, "delta": delta, "verdict": est.verdict,
            "sup_value": est.sup_value, "stability": est.stability}


def overlay_rows(spec: RegionSpec, grid: GridSpec, tol: Tolerances, workers: int = 1) -> list[dict]:
    """Empirical verdicts at a coarse set of interior points: the explicit power
    pair below gamma - m n and constant weights in the trivial region."""
    k = spec.overlay
    h = spec.delta_step
    lo = spec.delta_top - (spec.resolution - 1) * h
    jobs = []
    for g in spec.gammas:
        if not 0 < g < spec.m * spec.n:
            continue
        for a in range(k):
            x = (a + 0.5) * spec.m / k
            for b in range(k):
                d = lo + (b + 0.5) * (spec.delta_top - lo) / k
                jobs.append((g, x, d, spec.n, spec.m, grid.to_dict(), tol.to_dict()))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            res = list(pool.map(_overlay_point, jobs))
    else:
        res = [_overlay_point(j) for j in jobs]
    return [r for r in res if r is not None]


def cmd_region_map(args) -> int:
    default = {"task": "region-map"}
    sc = _scenario(args, "region-map", default)
    spec = sc.region
    upd = {}
    if args.n is not None:
        upd["n"] = args.n
    if args.m is not None:
        upd["m"] = args.m
    if args.gammas is not None:
        upd["gammas"] = tuple(float(g) for g in args.gammas.split(","))
    if args.resolution is not None:
        upd["resolution"] = args.resolution
    if args.overlay is not None:
        upd["overlay"] = args.overlay
    if upd:
        spec = RegionSpec.from_dict({**spec.to_dict(), **upd})
        sc = replace(sc, region=spec)
    rows = region_rows(spec)
    csv_path = write_csv(args.out / "region.csv", rows, REGION_COLUMNS)
    overlay, drawn = [], []
    if spec.overlay:
        overlay = overlay_rows(spec, sc.grid, sc.tolerances, args.workers)
        drawn = read_csv(write_csv(args.out / "region_overlay.csv", overlay, OVERLAY_COLUMNS))
    svg = region_svg(read_csv(csv_path), drawn)
    _write(args.out, "region.svg", svg)
    counts = {}
    for r in rows:
        key = f"gamma={r['gamma']:g}"
        counts.setdefault(key, {}).setdefault(r["region"], 0)
        counts[key][r["region"]] += 1
    result = {"counts": counts, "files": ["region.csv", "region.svg"] + (["region_overlay.csv"] if overlay else []),
              "overlay": [{k: r[k] for k in OVERLAY_COLUMNS} for r in overlay]}
    _write(args.out, "region_report.json", dumps(_report(sc, result)))
    print(f"region map: {len(rows)} cells over gammas {list(spec.gammas)} -> {csv_path}")
    return 0


# ---------------------------------------------------------------------------
# lemma batteries


def cmd_lemma_check(args) -> int:
    sc = _scenario(args, "lemma-check", {"task": "lemma-check"})
    if args.id is not None:
        sc = replace(sc, lemma=replace(sc.lemma, id=args.id))
    key = BATTERY_ALIASES.get(sc.lemma.id, sc.lemma.id)
    if key not in BATTERIES:
        raise ConfigError(f"unknown battery {sc.lemma.id!r}; choose from {sorted(BATTERY_ALIASES)}")
    opts = dict(sc.lemma.options)
    opts.setdefault("seed", sc.seed)
    res = run_battery(sc.lemma.id, **opts)
    path = _write(args.out, f"lemma_{key}.json", dumps(_report(sc, res.to_dict())))
    print(f"{sc.lemma.id} ({key}): {res.status} -> {path}")
    for f in res.failures:
        print(f"  {f}")
    return 0 if res.passed else 1


# ---------------------------------------------------------------------------
# operator evaluation


def cmd_operator_eval(args) -> int:
    sc = _scenario(args, "operator-eval")
    op = sc.operator
    fv = list(op.functions)
    if len(fv) != sc.params.m:
        raise ConfigError(f"operator needs m={sc.params.m} functions, got {len(fv)}")
    kw = {"order": op.order, "levels": op.levels}
    rows = []
    if op.quantity == "aB":
        ball = Ball(op.ball[0], op.ball[1])
        v = compute_aB(fv, ball, sc.params, **kw)
        rows.append({"point": ";".join(repr(c) for c in ball.center), "quantity": "aB", "value": v,
                     "error_estimate": math.nan})
    else:
        c = j_constant(fv, sc.params, **kw) if op.quantity == "J" else 0.0
        far = None
        if op.quantity == "local":
            ball = Ball(op.ball[0], op.ball[1])
            far = _far_part(fv, ball, sc.params, **kw)
        for x in op.points:
            q = igamma_quadrature(fv, np.asarray(x), sc.params, order=op.order, levels=op.levels)
            if op.quantity == "local":
                val = local_part(fv, np.asarray(x), ball, sc.params, far=far, **kw)
            else:
                val = q.value - c
            rows.append({"point": ";".join(repr(v) for v in x), "quantity": op.quantity, "value": val,
                         "error_estimate": q.error})
    write_csv(args.out / "operator.csv", rows, ("point", "quantity", "value", "error_estimate"))
    _write(args.out, "operator_report.json", dumps(_report(sc, {"rows": rows})))
    for r in rows:
        print(f"{r['quantity']}({r['point']}) = {r['value']!r}  (error estimate {r['error_estimate']:.2g})")
    return 0


# ---------------------------------------------------------------------------
# boundedness experiment


def _run_boundedness(job):
    pair_doc, params_doc, fv_docs, balls, b = job
    pair = WeightPair.from_dict(pair_doc)
    params = FracParams.from_dict(params_doc)
    fv = [GridFunction.from_dict(d) for d in fv_docs]
    balls = [Ball(c, R) for c, R in balls]
    return boundedness_experiment(pair, fv, params, balls, b["variant"], b["panels"], b["order"])


def cmd_boundedness(args) -> int:
    sc = _scenario(args, "boundedness")
    b = sc.boundedness
    pair, _ = sc.weight_pair()
    sets = b.function_sets(sc.params.m, sc.seed)
    balls = ball_family(b.centers, b.decades, b.per_decade, sc.params.n)
    jobs = [(pair.to_dict(), sc.params.to_dict(), [f.to_dict() for f in fv],
             [(bl.center, bl.radius) for bl in balls], b.to_dict()) for fv in sets]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            reports = list(pool.map(_run_boundedness, jobs))
    else:
        reports = [_run_boundedness(j) for j in jobs]
    ratios = [r.ratio for r in reports]
    spread = max(ratios) / min(ratios) if min(ratios) > 0 else math.inf
    diverging = [i for i, r in enumerate(reports) if r.slope is not None and r.slope.diverges(sc.tolerances.slope)]
    if diverging:
        verdict, code = "unbounded", 1
    elif all(math.isfinite(r) for r in ratios) and spread < b.spread_tol:
        verdict, code = "bounded", 0
    else:
        verdict, code = "inconclusive", 2
    rows = []
    for i, r in enumerate(reports):
        for row in r.csv_rows():
            rows.append({"sample": i, **row})
    write_csv(args.out / "oscillation.csv", rows, ("sample", "x_B", "R", "quotient", "ratio"))
    series = {}
    for i, r in enumerate(reports):
        radii = sorted({bl.radius for bl in r.balls})
        prof = [max(q for bl, q in zip(r.balls, r.per_ball_ratios) if bl.radius == R) for R in radii]
        series[f"f{i}"] = (radii, prof)
    _write(args.out, "oscillation.svg", loglog_svg(series, "oscillation ratio vs ball radius", "R", "ratio"))
    result = {
        "verdict": verdict,
        "ratios": ratios,
        "spread": spread,
        "slopes": [None if r.slope is None else r.slope.to_dict() for r in reports],
        "norm_products": [r.norm_product for r in reports],
        "note": reports[0].note,
    }
    _write(args.out, "oscillation_report.json", dumps(_report(sc, result)))
    print(f"{verdict}: ratio spread {spread:.3g} over {len(reports)} test tuples")
    return code


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fracweights", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fracweights {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(p, config_required: bool):
        p.add_argument("config", nargs=None if config_required else "?", help="scenario file (JSON/YAML) or report")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--seed", type=int)
        p.add_argument("--decades", type=int, help="grid spans 10^-k .. 10^k in |x_B| and R")
        p.add_argument("--ppd", type=int, help="grid points per decade")
        p.add_argument("--stability-bounded", type=float)
        p.add_argument("--stability-unbounded", type=float)
        p.add_argument("--slope-tol", type=float)
        p.add_argument("--workers", type=int, default=1, help="worker processes for independent evaluations")
        return p

    p = common(sub.add_parser("membership", help="certify a weight pair"), True)
    p.set_defaults(func=cmd_membership)
    p = common(sub.add_parser("region-map", help="parameter-region raster and figure"), False)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--gammas", help="comma-separated list")
    p.add_argument("--resolution", type=int)
    p.add_argument("--overlay", type=int, help="empirical verdicts on a k x k set of points per panel")
    p.set_defaults(func=cmd_region_map)
    p = common(sub.add_parser("lemma-check", help="run a property battery"), False)
    p.add_argument("--id", help=f"one of {sorted(BATTERY_ALIASES)} or {sorted(BATTERIES)}")
    p.set_defaults(func=cmd_lemma_check)
    p = common(sub.add_parser("operator-eval", help="evaluate the operator at points"), True)
    p.set_defaults(func=cmd_operator_eval)
    p = common(sub.add_parser("boundedness", help="oscillation ratios for test functions"), True)
    p.set_defaults(func=cmd_boundedness)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers < 1:
        parser.error("--workers must be >= 1")
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        return args.func(args)
    except (ConfigError, DeskScaleError, SingularPointError) as exc:
        print(f"fracweights: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # invalid parameter combinations surface as ValueError from the constructors
        print(f"fracweights: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
