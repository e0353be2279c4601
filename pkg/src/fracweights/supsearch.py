"""Supremum of a per-ball functional over all balls, with divergence diagnostics.

For radial weights every functional depends on a ball only through
(|x_B|, R), so the search runs on a log grid in that quarter plane plus the
axis |x_B| = 0.  The verdict combines the grid maximum, its stability under
grid extension and the log-log slopes of the value along the three ways a
ball family can escape (R -> 0, R -> inf, |x_B| -> inf).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy import stats

from .conditions import (
    ConditionValue,
    evaluator,
    hcal_value,
    related_weights_value,
    holder_chain,
)
from .params import Ball, FracParams, Region, region_classify
from .power_weights import (
    default_ball_sweep,
    equivalence_hypotheses,
    pair_prechecks,
    rh_s_holds,
    rh_s_ratio,
)
from .weights import PowerWeight, WeightPair

STABILITY_BOUNDED = 0.05
STABILITY_UNBOUNDED = 0.5
SLOPE_TOL = 0.01
CI_LEVEL = 0.95
REFINE_CANDIDATES = 4


@dataclass(frozen=True)
class Tolerances:
    """Verdict thresholds: relative sup change under grid extension and the
    smallest blow-up rate that counts as divergence."""

    stability_bounded: float = STABILITY_BOUNDED
    stability_unbounded: float = STABILITY_UNBOUNDED
    slope: float = SLOPE_TOL

    def __post_init__(self):
        if not 0 <= self.stability_bounded < self.stability_unbounded:
            raise ValueError("need 0 <= stability_bounded < stability_unbounded")
        if self.slope < 0:
            raise ValueError("slope tolerance must be nonnegative")

    def to_dict(self) -> dict:
        return {"stability_bounded": self.stability_bounded,
                "stability_unbounded": self.stability_unbounded, "slope": self.slope}


@dataclass(frozen=True)
class GridSpec:
    """Log grid in (|x_B|, R); ranges are base-10 exponents."""

    d_range: tuple = (-4, 4)
    R_range: tuple = (-4, 4)
    ppd: int = 16
    refine_passes: int = 2
    include_axis: bool = True

    def __post_init__(self):
        for lo, hi in (self.d_range, self.R_range):
            if int(lo) != lo or int(hi) != hi or not lo < hi:
                raise ValueError("grid ranges must be increasing integer exponents")
        if self.ppd < 2:
            raise ValueError("need at least 2 points per decade")

    @property
    def decades(self) -> tuple[int, int]:
        return (int(self.d_range[1] - self.d_range[0]), int(self.R_range[1] - self.R_range[0]))

    def exponents(self, which: str) -> list[float]:
        lo, hi = self.d_range if which == "d" else self.R_range
        # integer numerators keep nested grids bit-identical
        return [(lo * self.ppd + k) / self.ppd for k in range((hi - lo) * self.ppd + 1)]

    def extended(self, decades: int = 1, refine: int = 2) -> "GridSpec":
        return replace(
            self,
            d_range=(self.d_range[0] - decades, self.d_range[1] + decades),
            R_range=(self.R_range[0] - decades, self.R_range[1] + decades),
            ppd=self.ppd * refine,
        )

    def to_dict(self) -> dict:
        return {
            "d_range": list(self.d_range),
            "R_range": list(self.R_range),
            "points_per_decade": self.ppd,
            "refine_passes": self.refine_passes,
            "include_axis": self.include_axis,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GridSpec":
        return cls(
            d_range=tuple(doc.get("d_range", (-4, 4))),
            R_range=tuple(doc.get("R_range", (-4, 4))),
            ppd=int(doc.get("points_per_decade", doc.get("ppd", 16))),
            refine_passes=int(doc.get("refine_passes", 2)),
            include_axis=bool(doc.get("include_axis", True)),
        )


@dataclass(frozen=True)
class SlopeFit:
    """Log-log slope of the value along one escape direction.

    ``exponent`` is d log(value) / d log(variable); ``blowup`` is the growth
    rate toward the limit (positive means the value diverges there).
    """

    direction: str
    exponent: float
    stderr: float
    ci: tuple
    blowup: float
    npoints: int

    @property
    def diverging(self) -> bool:
        return self.diverges(SLOPE_TOL)

    def diverges(self, tol: float) -> bool:
        return self.blowup > tol and self.blowup_ci[0] > 0

    @property
    def blowup_ci(self) -> tuple[float, float]:
        sign = -1.0 if self.direction == "R->0" else 1.0
        a, b = sign * self.ci[0], sign * self.ci[1]
        return (min(a, b), max(a, b))

    def to_dict(self) -> dict:
        return {
            "direction": self.direction,
            "exponent": self.exponent,
            "stderr": self.stderr,
            "ci": list(self.ci),
            "blowup": self.blowup,
            "npoints": self.npoints,
        }


@dataclass
class SupEstimate:
    sup_value: float
    argmax_ball: Ball | None
    grid_spec: GridSpec
    stability: float
    verdict: str
    slopes: dict = field(default_factory=dict)
    extended_sup: float = math.nan
    reasons: list = field(default_factory=list)
    n_evals: int = 0
    grid_min: float = math.nan

    @property
    def spread(self) -> float:
        """Relative variation (max - min) / max over the base grid."""
        if not math.isfinite(self.sup_value) or self.sup_value == 0:
            return math.nan
        return (self.sup_value - self.grid_min) / self.sup_value

    def to_dict(self) -> dict:
        ball = None
        if self.argmax_ball is not None:
            ball = {"center": list(self.argmax_ball.center), "radius": self.argmax_ball.radius}
        return {
            "sup_value": _num(self.sup_value),
            "argmax_ball": ball,
            "grid_spec": self.grid_spec.to_dict(),
            "stability": _num(self.stability),
            "extended_sup": _num(self.extended_sup),
            "verdict": self.verdict,
            "slopes": {k: v.to_dict() for k, v in self.slopes.items()},
            "reasons": list(self.reasons),
            "evaluations": self.n_evals,
            "grid_min": _num(self.grid_min),
        }


def _num(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def _as_value(out) -> float:
    v = out.value if isinstance(out, ConditionValue) else float(out)
    return math.inf if math.isnan(v) else v


class _Memo:
    """Evaluation cache keyed on exact (|x_B|, R) floats."""

    def __init__(self, functional, n):
        self.functional = functional
        self.n = n
        self.cache: dict = {}

    def __call__(self, d: float, R: float) -> float:
        key = (d, R)
        if key not in self.cache:
            self.cache[key] = _as_value(self.functional(Ball.radial(d, R, self.n)))
        return self.cache[key]


def _fit(direction: str, x, y) -> SlopeFit:
    x = np.log(np.asarray(x, dtype=float))
    y = np.asarray(y, dtype=float)
    ok = np.isfinite(y) & (y > 0)
    if ok.sum() < 3:
        return SlopeFit(direction, math.nan, math.nan, (math.nan, math.nan), math.nan, int(ok.sum()))
    x, ly = x[ok], np.log(y[ok])
    res = stats.linregress(x, ly)
    dof = len(x) - 2
    half = stats.t.ppf(0.5 + CI_LEVEL / 2, dof) * res.stderr if dof > 0 else math.inf
    slope = float(res.slope)
    blowup = -slope if direction == "R->0" else slope
    return SlopeFit(direction, slope, float(res.stderr), (slope - half, slope + half), blowup, len(x))


def _grid_max(memo: _Memo, grid: GridSpec):
    ed = grid.exponents("d")
    eR = grid.exponents("R")
    ds = [10.0 ** e for e in ed]
    Rs = [10.0 ** e for e in eR]
    rows = ([0.0] if grid.include_axis else []) + ds
    V = np.array([[memo(d, R) for R in Rs] for d in rows])
    return rows, Rs, V


def _refine(memo: _Memo, grid: GridSpec, d0: float, R0: float):
    """Two-level zoom around the incumbent in log coordinates."""
    best = (memo(d0, R0), d0, R0)
    h = 1.0 / grid.ppd
    for _ in range(grid.refine_passes):
        _, d0, R0 = best
        ld = math.log10(d0) if d0 > 0 else None
        lR = math.log10(R0)
        offs = np.linspace(-h, h, 5)
        for a in offs:
            for b in (offs if ld is not None else [None]):
                R = 10.0 ** (lR + a)
                d = 0.0 if b is None else 10.0 ** (ld + b)
                v = memo(d, R)
                if v > best[0]:
                    best = (v, d, R)
        h /= 4
    return best


def _scan(memo: _Memo, grid: GridSpec):
    rows, Rs, V = _grid_max(memo, grid)
    if not np.all(np.isfinite(V)):
        i, j = np.argwhere(~np.isfinite(V))[0]
        return math.inf, rows[i], Rs[j], rows, Rs, V
    best = (-math.inf, None, None)
    for i, j in _local_maxima(V, REFINE_CANDIDATES):
        cand = _refine(memo, grid, rows[i], Rs[j])
        if cand[0] > best[0]:
            best = cand
    return (*best, rows, Rs, V)


def _local_maxima(V: np.ndarray, k: int) -> list[tuple[int, int]]:
    """Indices of the k largest grid points that are >= all 8 neighbours.

    A narrow ridge between grid lines can sit below the global grid maximum
    and still carry the true sup, so several incumbents get refined.
    """
    P = np.pad(V, 1, constant_values=-np.inf)
    mask = np.ones(V.shape, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                mask &= V >= P[1 + di:1 + di + V.shape[0], 1 + dj:1 + dj + V.shape[1]]
    idx = np.argwhere(mask)
    vals = V[mask]
    out, seen = [], set()
    for o in np.argsort(-vals, kind="stable"):
        # scale-invariant functionals repeat values along whole lines
        key = float(f"{vals[o]:.9g}")
        if key in seen:
            continue
        seen.add(key)
        out.append(tuple(int(v) for v in idx[o]))
        if len(out) == k:
            break
    return out or [tuple(int(v) for v in np.unravel_index(int(np.argmax(V)), V.shape))]


def _slopes(grid: GridSpec, rows, Rs, V) -> dict:
    off = 1 if grid.include_axis else 0
    ds = np.asarray(rows[off:])
    Rs = np.asarray(Rs)
    prof_R = V.max(axis=0)
    prof_d = V[off:].max(axis=1)
    k = grid.ppd + 1
    return {
        "R->0": _fit("R->0", Rs[:k], prof_R[:k]),
        "R->inf": _fit("R->inf", Rs[-k:], prof_R[-k:]),
        "d->inf": _fit("d->inf", ds[-k:], prof_d[-k:]),
    }


def estimate_sup(functional: Callable, n: int, grid: GridSpec | None = None, radial: bool = True,
                 check_stability: bool = True, tol: Tolerances | None = None) -> SupEstimate:
    """Estimate sup over balls of ``functional`` (Ball -> ConditionValue or float).

    The grid is scanned, the incumbent refined, and the whole procedure
    repeated on the grid extended by one decade per side at twice the
    density; the relative change of the maximum is the stability.
    """
    if not radial:
        raise NotImplementedError("only radial weights are supported; the ball space reduces to (|x_B|, R)")
    grid = grid or GridSpec()
    memo = _Memo(functional, n)
    sup, d, R, rows, Rs, V = _scan(memo, grid)
    reasons = []
    slopes = {}
    if math.isinf(sup):
        reasons.append(f"infinite value at |x_B|={d:.6g}, R={R:.6g}")
        return SupEstimate(sup, Ball.radial(d, R, n), grid, math.inf, "unbounded", slopes,
                           math.inf, reasons, len(memo.cache))
    slopes = _slopes(grid, rows, Rs, V)
    vmin = float(V.min())
    ext = math.nan
    stability = math.nan
    if check_stability:
        ext, de, Re, *_ = _scan(memo, grid.extended())
        if math.isinf(ext):
            stability = math.inf
            reasons.append(f"infinite value on extended grid at |x_B|={de:.6g}, R={Re:.6g}")
        else:
            # the union of evaluated balls only grows, so the sup cannot drop
            ext = max(ext, sup)
            stability = (ext - sup) / ext if ext != 0 else 0.0
    verdict = _verdict(sup, stability, slopes, reasons, tol or Tolerances())
    return SupEstimate(sup, Ball.radial(d, R, n), grid, stability, verdict, slopes, ext, reasons,
                       len(memo.cache), vmin)


def _verdict(sup, stability, slopes, reasons, tol: Tolerances) -> str:
    for s in slopes.values():
        if s.diverges(tol.slope):
            reasons.append(f"value grows as {s.direction} with rate {s.blowup:.4g} "
                           f"(95% CI {s.blowup_ci[0]:.4g}..{s.blowup_ci[1]:.4g})")
    if reasons:
        return "unbounded"
    if math.isnan(stability):
        reasons.append("stability not assessed")
        return "inconclusive"
    if stability <= tol.stability_bounded:
        return "bounded"
    if stability < tol.stability_unbounded:
        reasons.append(f"sup moved by {stability:.3g} under grid extension")
        return "inconclusive"
    reasons.append(f"sup moved by {stability:.3g} under grid extension")
    return "unbounded"


# ---------------------------------------------------------------------------
# certification


def scaling_exponent(pair: WeightPair, params: FracParams, condition_id: str = "Hcal") -> float:
    """e with value(lambda B) = lambda^e value(B), for power weights.

    Every functional in the package has the same homogeneity
    alpha - delta + gamma - n/p - sum beta_i; for related weights
    alpha = sum beta_i and it reduces to gamma - n/p - delta.
    """
    if not all(isinstance(x, PowerWeight) for x in (pair.w, *pair.v)):
        raise TypeError("homogeneity is only exact for power weights")
    if condition_id == "related_weights":
        return params.gap - params.delta
    b = math.fsum(v.exponent for v in pair.v)
    return pair.w.exponent - params.delta - b + params.gap


@dataclass
class Certificate:
    condition_id: str
    params: FracParams
    pair: WeightPair
    estimate: SupEstimate
    region: Region
    hypotheses: dict
    membership: str

    @property
    def exit_code(self) -> int:
        return {"member": 0, "non-member": 1}.get(self.membership, 2)

    def to_dict(self) -> dict:
        return {
            "membership": self.membership,
            "condition_id": self.condition_id,
            "region": self.region.value,
            "params": self.params.to_dict(),
            "pair": self.pair.to_dict(),
            "hypotheses": self.hypotheses,
            "estimate": self.estimate.to_dict(),
            "note": "numerical evidence from a finite ball grid, not a proof",
        }


def certify_membership(pair: WeightPair, params: FracParams, condition_id: str = "Hcal",
                       grid: GridSpec | None = None, tol: Tolerances | None = None, **kw) -> Certificate:
    checks = pair_prechecks(pair, params)
    if checks["winv_locally_integrable"] is False:
        raise ValueError("w^-1 is not locally integrable; the functional is undefined on balls at 0")
    ok, why = equivalence_hypotheses(pair, params)
    hyp = {
        "rh_infty_I1": {str(k + 1): v for k, v in checks["rh_infty_I1"].items()},
        "doubling_I2": {str(k + 1): v for k, v in checks["doubling_I2"].items()},
        "rh_m_I2": {str(k + 1): v for k, v in checks["rh_m_I2"].items()},
        "equivalence_hypotheses": why,
    }
    fn = evaluator(condition_id, pair, params, **kw)
    est = estimate_sup(fn, params.n, grid, tol=tol)
    membership = {"bounded": "member", "unbounded": "non-member"}.get(est.verdict, "inconclusive")
    return Certificate(condition_id, params, pair, est, region_classify(params), hyp, membership)


# ---------------------------------------------------------------------------
# probes


def predicted_blowup(pair: WeightPair, params: FracParams) -> float:
    """Growth rate of the whole-space functional as R -> 0 at a point where
    the weights are continuous and positive.

    The prefactor behaves like R^{1 - delta}; factor i like
    R^{-(theta_i - n/p_i')} when the local part of its integral dominates and
    like a constant otherwise.
    """
    n = params.n
    rate = params.delta - 1.0
    for th, pc in zip(params.exponents().theta, params.conj):
        rate += max(0.0, th - (0.0 if math.isinf(pc) else n / pc))
    return rate


@dataclass
class ProbeReport:
    center: float
    radii: list
    values: list
    fitted: float
    predicted: float
    case: str
    rel_error: float
    flat: bool
    diverges: bool

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("center", "radii", "values", "fitted", "predicted", "case", "rel_error", "flat", "diverges")}


def triviality_probe(pair: WeightPair, params: FracParams, center: float = 1.0,
                     decades: tuple = (-10, -6), ppd: int = 4, flat_tol: float = 0.02,
                     **kw) -> ProbeReport:
    """Fit the growth of the whole-space functional as R -> 0 at a fixed centre."""
    lo, hi = decades
    radii = [10.0 ** ((lo * ppd + k) / ppd) for k in range((hi - lo) * ppd + 1)]
    vals = [hcal_value(pair, params, Ball.radial(center, R, params.n), **kw).value for R in radii]
    fit = _fit("R->0", radii, vals)
    pred = predicted_blowup(pair, params)
    if params.delta > params.gap:
        case = "delta > gamma - n/p"
    elif params.delta > 1:
        case = "delta > 1"
    else:
        case = "admissible"
    if any(math.isinf(v) for v in vals):
        # the functional is already infinite on these balls
        return ProbeReport(center, radii, vals, math.inf, pred, case, math.inf, False, True)
    rel = abs(fit.blowup - pred) / abs(pred) if pred != 0 else abs(fit.blowup)
    return ProbeReport(center, radii, vals, fit.blowup, pred, case, rel,
                       abs(fit.blowup) < flat_tol, fit.diverging)


@dataclass
class RigidityReport:
    lambdas: list
    values: list
    variation: float
    fitted_blowup: float
    flat: bool
    alpha: float
    rh_alpha_max_ratio: float
    rh_alpha_bounded: bool
    holder_violations: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def rigidity_probe(v_vec, params: FracParams, base_balls=((1.0, 1.0), (0.0, 1.0), (3.0, 0.5)),
                   decades: tuple = (-4, 4), ppd: int = 4, n_balls: int = 1000, seed: int = 0,
                   flat_tol: float = 0.02, **kw) -> RigidityReport:
    """Related-weights rigidity: w = prod v_i forces delta = gamma - n/p.

    The related-weights value is swept along the dilations lambda B_0 of a few
    base balls; flat means the relative variation stays under ``flat_tol``.
    The companion reverse Hölder property of prod v_i^{-1} with exponent
    p/(mp - 1) and the Hölder chain are checked on random balls.
    """
    n = params.n
    lo, hi = decades
    lams = [10.0 ** ((lo * ppd + k) / ppd) for k in range((hi - lo) * ppd + 1)]
    rows = []
    for d0, R0 in base_balls:
        rows.append([related_weights_value(v_vec, params, Ball.radial(lam * d0, lam * R0, n), **kw).value
                     for lam in lams])
    V = np.asarray(rows)
    prof = V.max(axis=0)
    variation = float((prof.max() - prof.min()) / prof.max()) if np.all(np.isfinite(prof)) else math.inf
    fit = _fit("R->0", lams, prof)

    alpha = params.p / (params.m * params.p - 1) if math.isfinite(params.p) else 1.0 / params.m
    balls = default_ball_sweep(n_balls, seed=seed)
    a = -math.fsum(v.exponent for v in v_vec)
    rh_max = math.nan
    rh_ok = False
    if alpha > 1:
        rh_max = max(rh_s_ratio(a, alpha, b, n) for b in balls)
        rh_ok = math.isfinite(rh_max) and rh_s_holds(a, alpha, n)
    bad = 0
    for d, R in balls:
        lhs, rhs = holder_chain(v_vec, params, Ball.radial(d, R, n))
        if not lhs <= rhs * (1 + 1e-9):
            bad += 1
    return RigidityReport(lams, prof.tolist(), variation, fit.blowup, variation < flat_tol,
                          alpha, rh_max, rh_ok, bad)
