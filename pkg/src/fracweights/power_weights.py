"""Power weights |x|^a: ball integrals, ess-sups, reverse Hölder and doubling
diagnostics, and the explicit example pairs for very negative delta."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .params import INF, Ball, FracParams, sphere_area, unit_ball_volume
from .radial import DivergentIntegral, ball_integral_radial, unit_ball_power_integral
from .weights import PowerWeight, TabulatedWeight, WeightPair


def _dist_radius(ball, n):
    if isinstance(ball, Ball):
        if n is not None and n != ball.n:
            raise ValueError("dimension mismatch")
        return ball.center_norm, ball.radius, ball.n
    d, R = ball
    return float(d), float(R), n


def ball_integral_power(a: float, ball, n: int | None = None) -> float:
    """Integral of |x|^a over the ball.

    ``ball`` is a :class:`Ball` or a ``(|x_B|, R)`` pair (then ``n`` is
    required).  Closed form for n = 1, one-dimensional quadrature of the
    sphere/ball overlap for n >= 2.
    """
    d, R, n = _dist_radius(ball, n)
    if a <= -n and d <= R:
        raise DivergentIntegral(f"|x|^{a:g} is not integrable near 0 in dimension {n}")
    if a <= -n:
        # origin outside the closed ball: the integrand is bounded
        return ball_integral_radial(lambda s: np.power(s, a), d, R, n)
    return R ** (a + n) * _unit_integral(a, float(f"{d / R:.13g}"), n)


@lru_cache(maxsize=100_000)
def _unit_integral(a: float, t: float, n: int) -> float:
    # sweeps over homothetic balls revisit the same t = |x_B|/R
    return unit_ball_power_integral(a, t, n)


def weight_ball_integral(w, ball, n: int | None = None, power: float = 1.0) -> float:
    """Integral of w^power over the ball for power or tabulated weights."""
    d, R, n = _dist_radius(ball, n)
    if isinstance(w, PowerWeight):
        return ball_integral_power(w.exponent * power, (d, R), n)
    wk = w.power(power)
    if not wk.locally_integrable(n) and d <= R:
        raise DivergentIntegral("tabulated weight not integrable near 0")
    return ball_integral_radial(wk, d, R, n)


def ball_power_bracket(a: float, ball, n: int | None = None) -> float:
    """R^n max(R, |x_B|)^a, the two-sided size of the power-weight ball integral."""
    d, R, n = _dist_radius(ball, n)
    return R ** n * max(R, d) ** a


def ball_power_constants(a: float, n: int) -> tuple[float, float]:
    """Explicit (c1, c2) with c1 <= integral / bracket <= c2 on every ball.

    Far balls (|x_B| >= 2R) see |x| within a factor 1/2..3/2 of |x_B|; near
    balls sit inside B(0, 3R), and rearrangement puts the centred ball at
    the extreme.
    """
    if a <= -n:
        raise ValueError("need a > -n")
    w = unit_ball_volume(n)
    S = sphere_area(n)
    centred = S / (a + n)
    far = sorted((w * 0.5 ** a, w * 1.5 ** a))
    if a >= 0:
        near = (centred / 2 ** a, w * 3 ** a)
    else:
        near = (w * 3 ** a, centred * 2 ** (-a))
    return min(far[0], near[0]), max(far[1], near[1])


def power_sup_on_ball(a: float, d: float, R: float) -> float:
    """ess sup of |x|^a over B(x_B, R), |x_B| = d."""
    if a >= 0:
        return (d + R) ** a
    return INF if d <= R else (d - R) ** a


def power_sup_on_annulus(a: float, d: float, r_in: float, r_out: float) -> float:
    """ess sup of |x|^a over r_in <= |x - x_B| < r_out."""
    if a >= 0:
        return (d + r_out) ** a
    if d < r_in:
        low = r_in - d
    elif d < r_out:
        low = 0.0
    else:
        low = d - r_out
    return INF if low == 0 else low ** a


# ---------------------------------------------------------------------------
# class diagnostics


def rh_infty_ratio(a: float, ball, n: int | None = None) -> float:
    d, R, n = _dist_radius(ball, n)
    avg = ball_integral_power(a, (d, R), n) / (unit_ball_volume(n) * R ** n)
    return power_sup_on_ball(a, d, R) / avg


def rh_s_ratio(a: float, s: float, ball, n: int | None = None) -> float:
    d, R, n = _dist_radius(ball, n)
    vol = unit_ball_volume(n) * R ** n
    try:
        top = (ball_integral_power(a * s, (d, R), n) / vol) ** (1.0 / s)
    except DivergentIntegral:
        return INF
    return top / (ball_integral_power(a, (d, R), n) / vol)


def doubling_ratio(a: float, ball, n: int | None = None) -> float:
    d, R, n = _dist_radius(ball, n)
    try:
        return ball_integral_power(a, (d, 2 * R), n) / ball_integral_power(a, (d, R), n)
    except DivergentIntegral:
        return INF


def default_ball_sweep(n_balls: int = 1000, decades: float = 6.0, seed: int = 0, include_origin: bool = True):
    """(|x_B|, R) pairs log-uniform over ``decades`` centred at 1, plus centred balls."""
    rng = np.random.default_rng(seed)
    half = decades / 2
    d = 10.0 ** rng.uniform(-half, half, n_balls)
    R = 10.0 ** rng.uniform(-half, half, n_balls)
    if include_origin:
        k = max(1, n_balls // 10)
        d[:k] = 0.0
    return list(zip(d.tolist(), R.tolist()))


def ratio_sweep(ratio, a: float, n: int, balls: Iterable, **kw) -> float:
    return max(ratio(a, b, n, **kw) for b in balls)


def rh_infty_holds(a: float, n: int) -> bool:
    """|x|^a is in RH_inf exactly when a >= 0 (sup/average blows up at 0 otherwise)."""
    if a <= -n:
        return False
    return a >= 0


def doubling_holds(a: float, n: int) -> bool:
    """Power weights are doubling exactly on their integrability range."""
    return a > -n


def rh_s_holds(a: float, s: float, n: int) -> bool:
    if s <= 1:
        raise ValueError("reverse Hölder exponent must exceed 1")
    return a > -n and a * s > -n


# ---------------------------------------------------------------------------
# explicit examples for delta < gamma - m n


@dataclass(frozen=True)
class ExamplePair:
    pair: WeightPair
    params: FracParams
    beta: tuple
    alpha: float
    nu: float | None
    beta_I1: float | None
    theta_recipe: tuple

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": list(self.beta),
            "nu": self.nu,
            "beta_I1": self.beta_I1,
            "theta_recipe": list(self.theta_recipe),
        }


def construct_example_pair(params: FracParams, positions: Sequence[float] | None = None,
                           position_I1: float = 0.5) -> ExamplePair:
    """w = |x|^alpha, v_i = |x|^{beta_i} in the class for delta < gamma - m n.

    Free parameters are chosen at relative ``positions`` inside their open
    intervals (midpoints by default).
    """
    n, m = params.n, params.m
    if not params.delta < params.gamma - m * n:
        raise ValueError(
            f"recipe needs delta < gamma - m n = {params.gamma - m * n:g}; "
            "certify other pairs with the supremum search"
        )
    if not params.equal_split:
        raise ValueError("recipe is stated for the equal split gamma_i = gamma/m")
    if params.m2 == 0:
        raise ValueError("recipe needs at least one p_i > 1 (otherwise nu = 0 and no beta exists)")
    theta5 = params.exponents().theta_recipe
    if positions is None:
        positions = [0.5] * m
    if len(positions) != m or not all(0 < t < 1 for t in positions) or not 0 < position_I1 < 1:
        raise ValueError("positions must lie in (0, 1)")
    beta = [0.0] * m
    nu = 0.0
    for i in params.I2:
        upper = n / params.conj[i]
        lower = -theta5[i] if theta5[i] < 0 else 0.0
        beta[i] = lower + positions[i] * (upper - lower)
        nu += beta[i] + theta5[i] if theta5[i] < 0 else beta[i]
    b_I1 = None
    if params.m1:
        cap = min(nu / params.m1, n + (1.0 - params.gamma) / m)
        b_I1 = position_I1 * cap
        for i in params.I1:
            beta[i] = -b_I1
    alpha = params.delta + math.fsum(beta) + params.n_over_p - params.gamma
    pair = WeightPair(PowerWeight(alpha), tuple(PowerWeight(b) for b in beta),
                      meta={"recipe": True})
    return ExamplePair(pair, params, tuple(beta), alpha, nu, b_I1, tuple(theta5))


def pair_prechecks(pair: WeightPair, params: FracParams) -> dict:
    """Hypotheses used by the equivalence and boundedness results, per index."""
    n = params.n
    out = {"winv_locally_integrable": None, "rh_infty_I1": {}, "doubling_I2": {}, "rh_m_I2": {}}
    if isinstance(pair.w, PowerWeight):
        out["winv_locally_integrable"] = -pair.w.exponent > -n
    for i, vi in enumerate(pair.v):
        if not isinstance(vi, PowerWeight):
            continue
        if i in params.I1:
            out["rh_infty_I1"][i] = rh_infty_holds(-vi.exponent, n)
        else:
            a = -vi.exponent * params.conj[i]
            out["doubling_I2"][i] = doubling_holds(a, n)
            out["rh_m_I2"][i] = rh_s_holds(a, params.m, n) if params.m > 1 else doubling_holds(a, n)
    return out


def equivalence_hypotheses(pair: WeightPair, params: FracParams) -> tuple[bool, str]:
    checks = pair_prechecks(pair, params)
    bad = [f"v_{i + 1}^-1 not in RH_inf" for i, ok in checks["rh_infty_I1"].items() if not ok]
    bad += [f"v_{i + 1}^-p' not doubling" for i, ok in checks["doubling_I2"].items() if not ok]
    if len(checks["rh_infty_I1"]) + len(checks["doubling_I2"]) < params.m:
        bad.append("hypotheses only decidable for power weights")
    return (not bad, "; ".join(bad) or "ok")
