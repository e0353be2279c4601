"""Per-ball values of the two-weight functionals.

Each evaluator returns a :class:`ConditionValue` whose ``value`` is the
prefactor times the product of the per-index factors.  Infinite factors are
kept as ``inf`` together with a reason string.

Two conventions exist for the length scale in the smoothed kernel
(|B|^{1/n} + |x_B - y|): ``"volume"`` uses |B|^{1/n} literally, ``"radius"``
uses R.  They differ by a dimensional constant and define the same classes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .params import INF, Ball, FracParams, unit_ball_volume
from .power_weights import (
    ball_integral_power,
    power_sup_on_annulus,
    power_sup_on_ball,
    weight_ball_integral,
)
from .radial import DivergentIntegral, kernel_weighted_integral, kernel_weighted_integral_generic
from .weights import PowerWeight, TabulatedWeight, WeightPair

CONDITION_IDS = ("Hcal", "Hbb", "local", "global", "mixed", "related_weights")
# long-form ids accepted on input
CONDITION_ALIASES = {"local_2_4": "local", "global_2_5": "global", "mixed_2_6": "mixed"}

KERNEL_SCALES = ("volume", "radius")


@dataclass(frozen=True)
class ConditionValue:
    condition_id: str
    ball: Ball
    value: float
    prefactor: float
    factors: tuple
    reasons: tuple = ()

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)

    def recompose(self) -> float:
        return _product([self.prefactor, *self.factors])

    def csv_row(self) -> dict:
        blob = ";".join(f"{f:.17g}" for f in self.factors)
        return {
            "condition_id": self.condition_id,
            "x_B_norm": repr(self.ball.center_norm),
            "R": repr(self.ball.radius),
            "value": repr(self.value),
            "factor_breakdown": f"prefactor={self.prefactor:.17g};factors=[{blob}]"
            + (f";reason={'|'.join(self.reasons)}" if self.reasons else ""),
        }


def _product(xs) -> float:
    out = 1.0
    for x in xs:
        if x == 0 and any(math.isinf(y) for y in xs):
            return math.nan
        out *= x
    return out


def _scale_const(n: int, kernel_scale: str) -> float:
    if kernel_scale == "volume":
        return unit_ball_volume(n) ** (1.0 / n)
    if kernel_scale == "radius":
        return 1.0
    raise ValueError(f"kernel_scale must be one of {KERNEL_SCALES}")


def _tkey(t: float) -> float:
    return float(f"{t:.13g}")


# ---------------------------------------------------------------------------
# building blocks


def winv_ball(w, ball: Ball) -> float:
    """w^{-1}(B), the integral of 1/w over the ball."""
    return weight_ball_integral(w, ball, power=-1.0)


def weight_sup(w, ball: Ball, power: float = 1.0) -> float:
    """ess sup of w^power over the ball."""
    d, R = ball.center_norm, ball.radius
    if isinstance(w, PowerWeight):
        return power_sup_on_ball(w.exponent * power, d, R)
    prof = w.power(power)
    return _numeric_ray_sup(lambda s, dist: prof(s), d, lambda dist: dist < R, scale=R)


def weight_sup_annulus(w, ball: Ball, power: float = 1.0) -> float:
    """ess sup of w^power over 2B minus B."""
    d, R = ball.center_norm, ball.radius
    if isinstance(w, PowerWeight):
        return power_sup_on_annulus(w.exponent * power, d, R, 2 * R)
    prof = w.power(power)
    return _numeric_ray_sup(lambda s, dist: prof(s), d, lambda dist: (dist >= R) & (dist < 2 * R), scale=R)


def _numeric_ray_sup(g, d: float, mask, scale: float, passes: int = 3) -> float:
    """sup of g(|y|, |x_B - y|) over admissible y, searched along the line through 0 and x_B.

    For a radial profile the extremum over a sphere |y| = s sits on that
    line, so a 1-D log grid on both half-lines suffices.
    """
    span = 10.0 ** np.linspace(-10, 10, 2 ** 14) * max(scale, d, 1e-300)
    t = np.concatenate([-span[::-1], [0.0], span, [d]])
    best = -math.inf
    for _ in range(passes + 1):
        s = np.abs(t)
        dist = np.abs(d - t)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            vals = np.where(mask(dist), g(s, dist), -np.inf)
        vals = np.nan_to_num(vals, nan=-np.inf, posinf=np.inf)
        k = int(np.argmax(vals))
        best = max(best, float(vals[k]))
        lo = t[max(k - 1, 0)]
        hi = t[min(k + 1, len(t) - 1)]
        if lo == hi:
            break
        t = np.linspace(lo, hi, 2 ** 10)
    return best


def _ray_sup_power(b: float, theta: float, d: float, rho: float) -> float:
    """sup over y of |y|^b (rho + |x_B - y|)^{-theta}, |x_B| = d, rho > 0."""
    if b < 0:
        return INF
    if b == 0:
        return rho ** (-theta)
    if b > theta:
        return INF
    g = lambda t: t ** b * (rho + abs(d - t)) ** (-theta)
    cands = [g(d)]
    if b == theta:
        cands.append(1.0)
    elif rho > d:
        ts = b * (rho - d) / (theta - b)
        if ts > d:
            cands.append(g(ts))
    return max(cands)


def _outside_sup_power(b: float, theta: float, d: float, R: float) -> float:
    """sup over |x_B - y| >= R of |y|^b |x_B - y|^{-theta}."""
    if b < 0:
        return INF if d >= R else (R - d) ** b * R ** (-theta)
    if b > theta:
        return INF
    return (d + R) ** b * R ** (-theta)


@lru_cache(maxsize=200_000)
def _power_factor_unit(q: float, s: float, t: float, n: int, rho: float, outside: bool, min_annuli: int) -> float:
    """Kernel-weighted integral at R = 1, |x_B| = t (cached: sweeps revisit t)."""
    return kernel_weighted_integral(q, s, t, rho, 1.0, n, outside=outside, min_annuli=min_annuli)


def h_factor(v, p_i: float, theta: float, ball: Ball, kernel_scale: str = "volume",
             min_annuli: int = 0, strict: bool = False) -> float:
    """Per-index factor of the whole-space condition.

    p_i > 1: (integral of v^{-p'} / (L + |x_B - y|)^{theta p'})^{1/p'};
    p_i = 1: ess sup of v^{-1} / (L + |x_B - y|)^theta; L the kernel scale.
    """
    value, reason = _h_factor(v, p_i, theta, ball, kernel_scale, min_annuli)
    if strict and reason:
        raise DivergentIntegral(reason)
    return value


def _h_factor(v, p_i, theta, ball, kernel_scale="volume", min_annuli=0):
    n, d, R = ball.n, ball.center_norm, ball.radius
    c = _scale_const(n, kernel_scale)
    if p_i == 1:
        if isinstance(v, PowerWeight):
            b = -v.exponent
            val = R ** (b - theta) * _ray_sup_power(b, theta, _tkey(d / R), c)
        else:
            prof = v.power(-1.0)
            rho = c * R
            val = _numeric_ray_sup(lambda s, dist: prof(s) * (rho + dist) ** (-theta), d,
                                   lambda dist: dist >= 0, scale=R)
        return val, ("" if math.isfinite(val) else f"ess-sup of v^-1/(L+|x_B-y|)^{theta:g} unbounded")
    pc = p_i / (p_i - 1) if p_i != INF else 1.0
    s = theta * pc
    try:
        if isinstance(v, PowerWeight):
            q = v.exponent * pc
            integral = R ** (n - q - s) * _power_factor_unit(q, s, _tkey(d / R), n, c, False, min_annuli)
        else:
            integral = kernel_weighted_integral_generic(v.power(-pc), s, d, c * R, R, n)
    except DivergentIntegral as exc:
        return INF, exc.reason
    return integral ** (1.0 / pc), ""


def global_factor(v, p_i: float, theta: float, ball: Ball) -> tuple[float, str]:
    """Complement-of-ball factor with the unsmoothed kernel |x_B - y|^{-theta}."""
    n, d, R = ball.n, ball.center_norm, ball.radius
    if p_i == 1:
        if isinstance(v, PowerWeight):
            val = _outside_sup_power(-v.exponent, theta, d, R)
        else:
            prof = v.power(-1.0)
            val = _numeric_ray_sup(lambda s, dist: prof(s) * dist ** (-theta), d, lambda dist: dist >= R, scale=R)
        return val, ("" if math.isfinite(val) else "ess-sup outside B unbounded")
    pc = p_i / (p_i - 1) if p_i != INF else 1.0
    s = theta * pc
    try:
        if isinstance(v, PowerWeight):
            q = v.exponent * pc
            integral = R ** (n - q - s) * _power_factor_unit(q, s, _tkey(d / R), n, 0.0, True, 0)
        else:
            integral = kernel_weighted_integral_generic(v.power(-pc), s, d, 0.0, R, n, outside=True)
    except DivergentIntegral as exc:
        return INF, exc.reason
    return integral ** (1.0 / pc), ""


def _local_factor(v, p_i: float, ball: Ball) -> tuple[float, str]:
    """||v^{-1} chi_B||_inf for p_i = 1, else (average over B of v^{-p'})^{1/p'}."""
    if p_i == 1:
        val = weight_sup(v, ball, power=-1.0)
        return val, ("" if math.isfinite(val) else "v^-1 unbounded on B")
    pc = p_i / (p_i - 1) if p_i != INF else 1.0
    try:
        avg = weight_ball_integral(v, ball, power=-pc) / ball.volume
    except DivergentIntegral as exc:
        return INF, exc.reason
    return avg ** (1.0 / pc), ""


# ---------------------------------------------------------------------------
# functionals


def _assemble(cid, ball, prefactor, parts) -> ConditionValue:
    factors = tuple(p[0] for p in parts)
    reasons = tuple(f"factor {i + 1}: {p[1]}" for i, p in enumerate(parts) if p[1])
    return ConditionValue(cid, ball, _product([prefactor, *factors]), prefactor, factors, reasons)


def _check(pair: WeightPair, params: FracParams, ball: Ball):
    if ball.n != params.n:
        raise ValueError(f"ball lives in R^{ball.n}, parameters in R^{params.n}")
    if len(pair.v) != params.m:
        raise ValueError(f"pair has {len(pair.v)} weights v_i, expected m = {params.m}")


def _winv_or_raise(w, ball):
    try:
        return winv_ball(w, ball)
    except DivergentIntegral as exc:
        raise ValueError(f"w^-1 is not integrable on the ball: {exc.reason}") from exc


def hcal_value(pair: WeightPair, params: FracParams, ball: Ball, kernel_scale: str = "volume",
               min_annuli: int = 0) -> ConditionValue:
    _check(pair, params, ball)
    n = params.n
    theta = params.exponents().theta
    pre = ball.volume ** (1 + (1 - params.delta) / n) / _winv_or_raise(pair.w, ball)
    parts = [_h_factor(v, p, th, ball, kernel_scale, min_annuli)
             for v, p, th in zip(pair.v, params.p_vec, theta)]
    return _assemble("Hcal", ball, pre, parts)


def hbb_value(pair: WeightPair, params: FracParams, ball: Ball, kernel_scale: str = "volume") -> ConditionValue:
    _check(pair, params, ball)
    n = params.n
    theta = params.exponents().theta
    pre = weight_sup(pair.w, ball) / ball.volume ** ((params.delta - 1) / n)
    parts = [_h_factor(v, p, th, ball, kernel_scale) for v, p, th in zip(pair.v, params.p_vec, theta)]
    return _assemble("Hbb", ball, pre, parts)


def local_condition_value(pair: WeightPair, params: FracParams, ball: Ball) -> ConditionValue:
    _check(pair, params, ball)
    n = params.n
    expo = 1 - params.delta / n + params.gamma / n - params.inv_p
    pre = ball.volume ** expo / _winv_or_raise(pair.w, ball)
    parts = [_local_factor(v, p, ball) for v, p in zip(pair.v, params.p_vec)]
    return _assemble("local", ball, pre, parts)


def global_condition_value(pair: WeightPair, params: FracParams, ball: Ball) -> ConditionValue:
    _check(pair, params, ball)
    n = params.n
    theta = params.exponents().theta
    pre = ball.volume ** (1 + (1 - params.delta) / n) / _winv_or_raise(pair.w, ball)
    parts = [global_factor(v, p, th, ball) for v, p, th in zip(pair.v, params.p_vec, theta)]
    return _assemble("global", ball, pre, parts)


def mixed_condition_value(pair: WeightPair, params: FracParams, ball: Ball,
                          annulus_set: Sequence[int] = ()) -> ConditionValue:
    """Mixed condition; indices in ``annulus_set`` (a subset of I1) use 2B minus B."""
    _check(pair, params, ball)
    I = set(annulus_set)
    if not I <= set(params.I1):
        raise ValueError("annulus indices must belong to I1 = {i : p_i = 1}")
    n = params.n
    expo = 1 + (params.gamma - params.delta) / n - params.inv_p
    pre = ball.volume ** expo / _winv_or_raise(pair.w, ball)
    parts = []
    for i, (v, p) in enumerate(zip(pair.v, params.p_vec)):
        if i in I:
            val = weight_sup_annulus(v, ball, power=-1.0)
            parts.append((val, "" if math.isfinite(val) else "v^-1 unbounded on 2B minus B"))
        elif p == 1:
            parts.append(_local_factor(v, p, ball))
        else:
            parts.append(_local_factor(v, p, ball.dilate(2.0)))
    return _assemble("mixed", ball, pre, parts)


def mixed_partitions(params: FracParams):
    """All subsets of I1 (the annulus part; the rest of I1 uses B)."""
    I1 = params.I1
    for k in range(len(I1) + 1):
        yield from itertools.combinations(I1, k)


def related_weights_value(v_vec: Sequence, params: FracParams, ball: Ball,
                          kernel_scale: str = "volume") -> ConditionValue:
    """LHS / RHS of the related-weights condition (w = prod v_i)."""
    pair = WeightPair.related(v_vec)
    _check(pair, params, ball)
    n = params.n
    theta = params.exponents().theta
    avg = winv_ball(pair.w, ball) / ball.volume
    pre = ball.volume ** ((1 - params.delta) / n) / avg
    parts = [_h_factor(v, p, th, ball, kernel_scale) for v, p, th in zip(pair.v, params.p_vec, theta)]
    return _assemble("related_weights", ball, pre, parts)


def holder_chain(v_vec: Sequence, params: FracParams, ball: Ball) -> tuple[float, float]:
    """(avg_B (prod v_i^{-1})^a)^{1/a} and the product of local factors, a = p/(mp - 1)."""
    p = params.p
    a = p / (params.m * p - 1)
    w_exp = -math.fsum(v.exponent for v in v_vec)
    try:
        lhs = (ball_integral_power(w_exp * a, ball) / ball.volume) ** (1 / a)
    except DivergentIntegral:
        lhs = INF
    rhs = _product([_local_factor(v, pi, ball)[0] for v, pi in zip(v_vec, params.p_vec)])
    return lhs, rhs


EVALUATORS = {
    "Hcal": hcal_value,
    "Hbb": hbb_value,
    "local": local_condition_value,
    "global": global_condition_value,
    "mixed": mixed_condition_value,
}


def evaluator(condition_id: str, pair: WeightPair, params: FracParams, **kw):
    """Ball -> ConditionValue closure for the given condition."""
    condition_id = CONDITION_ALIASES.get(condition_id, condition_id)
    if condition_id == "related_weights":
        return lambda ball: related_weights_value(pair.v, params, ball, **kw)
    try:
        fn = EVALUATORS[condition_id]
    except KeyError:
        raise ValueError(f"unknown condition {condition_id!r}; choose from {CONDITION_IDS}") from None
    return lambda ball: fn(pair, params, ball, **kw)
