"""Property batteries behind ``lemma-check``: each returns a BatteryResult
with status pass / fail / skip and the numbers it looked at."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .conditions import global_condition_value, hcal_value, holder_chain
from .corners import build_corner_sets, monte_carlo_fraction
from .operators import kernel_gap_ratios
from .params import Ball, FracParams
from .power_weights import (
    ball_integral_power,
    construct_example_pair,
    equivalence_hypotheses,
    ball_power_bracket,
    ball_power_constants,
)
from .supsearch import GridSpec, estimate_sup
from .weights import PowerWeight, WeightPair

BATTERY_ALIASES = {
    "5.2": "power_ball_bracket",
    "3.2": "kernel_gap",
    "2.1": "hcal_global_equivalence",
    "holder_1.3": "holder_chain",
}


@dataclass
class BatteryResult:
    battery: str
    status: str
    details: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status in ("pass", "skip")

    def to_dict(self) -> dict:
        return {"battery": self.battery, "status": self.status, "details": self.details,
                "failures": self.failures}


def _log_uniform_balls(rng, count, lo=-3, hi=3):
    d = 10.0 ** rng.uniform(lo, hi, count)
    R = 10.0 ** rng.uniform(lo, hi, count)
    d[: count // 10] = 0.0
    return d, R


def power_ball_bracket(n_values=(1, 2), exponents=None, balls: int = 1000, seed: int = 0,
                       scale: float = 7.3, scale_tol: float = 1e-9) -> BatteryResult:
    """Ball integrals of |x|^a against R^n max(R, |x_B|)^a: two-sided bracket and scale invariance."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    details, failures = {}, []
    for n in n_values:
        exps = exponents or (-0.9 * n, -0.5, 0.0, 0.5, 1.0, 2.0)
        d, R = _log_uniform_balls(rng, balls)
        for a in exps:
            c1, c2 = ball_power_constants(a, n)
            ratios = np.array([ball_integral_power(a, (di, Ri), n) / ball_power_bracket(a, (di, Ri), n)
                               for di, Ri in zip(d, R)])
            scaled = np.array([ball_integral_power(a, (scale * di, scale * Ri), n)
                               / ball_power_bracket(a, (scale * di, scale * Ri), n) for di, Ri in zip(d, R)])
            drift = float(np.max(np.abs(scaled / ratios - 1)))
            key = f"n={n},a={a:g}"
            details[key] = {"min": float(ratios.min()), "max": float(ratios.max()),
                            "bracket": [c1, c2], "scale_drift": drift}
            if ratios.min() < c1 * (1 - 1e-12) or ratios.max() > c2 * (1 + 1e-12):
                failures.append(f"{key}: ratio outside [{c1:.4g}, {c2:.4g}]")
            if drift > scale_tol:
                failures.append(f"{key}: scale drift {drift:.3g}")
    return BatteryResult("power_ball_bracket", "fail" if failures else "pass", details, failures,
                         time.perf_counter() - t0)


def kernel_gap(configs=((1, 1), (1, 2), (2, 1), (2, 2)), samples: int = 10_000, seed: int = 0,
               gamma_frac: float = 0.5, scale: float = 13.7, mc_samples: int = 100_000,
               radii_decades: tuple = (-3, 3)) -> BatteryResult:
    """Kernel-difference lower bound on random admissible triples plus the
    volume of the corner sets across radii."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    details, failures = {}, []
    for n, m in configs:
        params = FracParams(n, m, gamma_frac * m * n, 0.0, (2.0,) * m)
        ball = Ball(tuple(rng.uniform(-1, 1, n)), 1.0)
        seed_k = int(rng.integers(2 ** 31))
        r = kernel_gap_ratios(params, ball, samples, np.random.default_rng(seed_k))
        r_scaled = kernel_gap_ratios(params, ball.scaled(scale), samples, np.random.default_rng(seed_k))
        # same draws up to the dilation: samplers are affine in the ball
        drift = float(np.max(np.abs(r_scaled / r - 1)))
        key = f"n={n},m={m}"
        details[key] = {"min_ratio": float(r.min()), "empirical_C": float(r.min()), "scale_drift": drift}
        if not r.min() > 0:
            failures.append(f"{key}: nonpositive lhs/rhs {r.min():.3g}")
        if drift > 1e-9:
            failures.append(f"{key}: scale drift {drift:.3g}")
    lo, hi = radii_decades
    for n in sorted({c[0] for c in configs}):
        fracs = {"C1": [], "C2": []}
        for e in range(lo, hi + 1):
            ball = Ball.radial(0.5, 10.0 ** e, n)
            sets = build_corner_sets(ball)
            fracs["C1"].append(monte_carlo_fraction(ball, sets.C1, mc_samples, rng))
            fracs["C2"].append(monte_carlo_fraction(ball, sets.C2, mc_samples, rng))
        details[f"corner_volume_n={n}"] = {k: [min(v), max(v)] for k, v in fracs.items()}
        for k, v in fracs.items():
            if not min(v) > 0:
                failures.append(f"n={n}: |{k}|/|B| estimate hit 0")
    return BatteryResult("kernel_gap", "fail" if failures else "pass", details, failures,
                         time.perf_counter() - t0)


def default_equivalence_pairs(count: int = 20, seed: int = 0):
    """Power-weight pairs from the explicit recipe at random interval positions."""
    rng = np.random.default_rng(seed)
    bases = [
        FracParams(1, 2, 0.5, -2.0, (2.0, 2.0)),
        FracParams(1, 2, 0.5, -2.0, (1.0, 2.0)),
        FracParams(1, 1, 0.5, -1.0, (3.0,)),
        FracParams(1, 2, 1.0, -1.5, (1.0, 4.0)),
    ]
    out = []
    for k in range(count):
        params = bases[k % len(bases)]
        pos = rng.uniform(0.2, 0.8, params.m)
        ex = construct_example_pair(params, positions=list(pos), position_I1=float(rng.uniform(0.2, 0.8)))
        out.append((ex.pair, params))
    return out


def hcal_global_equivalence(pairs=None, grid: GridSpec | None = None, refine: int = 2,
                            stability_tol: float = 0.05, count: int = 20, seed: int = 0) -> BatteryResult:
    """Whole-space vs complement-of-ball functionals: their sup ratio is finite
    and stable under one grid refinement (pairs failing the hypotheses are skipped).

    ``pairs`` holds (WeightPair, FracParams) tuples or documents
    ``{"pair": {...}, "params": {...}}``.
    """
    t0 = time.perf_counter()
    if pairs is None:
        pairs = default_equivalence_pairs(count, seed)
    else:
        pairs = [(WeightPair.from_dict(p["pair"]), FracParams.from_dict(p["params"])) if isinstance(p, dict) else p
                 for p in pairs]
    if isinstance(grid, dict):
        grid = GridSpec.from_dict(grid)
    grid = grid or GridSpec(d_range=(-3, 3), R_range=(-3, 3), ppd=8)
    fine = GridSpec(grid.d_range, grid.R_range, grid.ppd * refine, grid.refine_passes, grid.include_axis)
    details, failures, skipped = {}, [], []
    for k, (pair, params) in enumerate(pairs):
        ok, why = equivalence_hypotheses(pair, params)
        if not ok:
            skipped.append(f"pair {k}: {why}")
            continue
        ratios = []
        for g in (grid, fine):
            h = estimate_sup(lambda b: hcal_value(pair, params, b), params.n, g, check_stability=False)
            gl = estimate_sup(lambda b: global_condition_value(pair, params, b), params.n, g,
                              check_stability=False)
            ratios.append(h.sup_value / gl.sup_value)
        change = abs(ratios[1] - ratios[0]) / abs(ratios[1]) if math.isfinite(ratios[1]) else math.inf
        details[f"pair {k}"] = {"ratio": float(ratios[0]), "ratio_refined": float(ratios[1]), "change": float(change)}
        if not all(math.isfinite(r) and r > 0 for r in ratios):
            failures.append(f"pair {k}: ratio not finite")
        elif change > stability_tol:
            failures.append(f"pair {k}: ratio moved {change:.3g} under refinement")
    details["skipped"] = skipped
    status = "fail" if failures else ("skip" if skipped and len(skipped) == len(pairs) else "pass")
    return BatteryResult("hcal_global_equivalence", status, details, failures, time.perf_counter() - t0)


def holder_chain_battery(v_sets=None, balls: int = 1000, seed: int = 0) -> BatteryResult:
    """avg_B (prod v_i^{-1})^a)^{1/a} <= product of local factors, a = p/(mp - 1)."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    if v_sets is None:
        v_sets = [
            ((PowerWeight(0.1), PowerWeight(0.2)), FracParams(1, 2, 1.5, 0.0, (1.5, 1.5))),
            ((PowerWeight(-0.2), PowerWeight(0.15)), FracParams(1, 2, 1.5, 0.0, (1.5, 3.0))),
            ((PowerWeight(0.3),), FracParams(1, 1, 0.5, 0.0, (2.0,))),
            ((PowerWeight(0.2), PowerWeight(-0.1)), FracParams(2, 2, 2.0, 0.0, (1.5, 2.0))),
        ]
    details, failures = {}, []
    for k, (v, params) in enumerate(v_sets):
        d, R = _log_uniform_balls(rng, balls)
        worst = 0.0
        for di, Ri in zip(d, R):
            lhs, rhs = holder_chain(v, params, Ball.radial(di, Ri, params.n))
            worst = max(worst, lhs / rhs)
        details[f"set {k}"] = {"max_lhs_over_rhs": worst}
        if not worst <= 1 + 1e-9:
            failures.append(f"set {k}: lhs exceeds rhs by factor {worst:.6g}")
    return BatteryResult("holder_chain", "fail" if failures else "pass", details, failures,
                         time.perf_counter() - t0)


BATTERIES = {
    "power_ball_bracket": power_ball_bracket,
    "kernel_gap": kernel_gap,
    "hcal_global_equivalence": hcal_global_equivalence,
    "holder_chain": holder_chain_battery,
}


def run_battery(battery_id: str, **kw) -> BatteryResult:
    key = BATTERY_ALIASES.get(battery_id, battery_id)
    if key not in BATTERIES:
        raise ValueError(f"unknown battery {battery_id!r}; choose from {sorted(BATTERIES) + sorted(BATTERY_ALIASES)}")
    return BATTERIES[key](**kw)
