"""One-dimensional reductions of the ball and whole-space integrals of radial
weights.  Everything here works in coordinates centred either at the origin
(ball integrals) or at the ball centre (kernel-weighted integrals, where the
angular average of |y|^{-q} has a hypergeometric closed form)."""

from __future__ import annotations

import math
import warnings
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .params import sphere_area, unit_ball_volume

QUAD_OPTS = dict(epsabs=0.0, epsrel=1e-12, limit=400)


def _quad(f, a, b, points=None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if points:
            pts = [p for p in points if a < p < b]
            if pts:
                return integrate.quad(f, a, b, points=pts, **QUAD_OPTS)[0]
        return integrate.quad(f, a, b, **QUAD_OPTS)[0]


def cap_fraction(cos_angle, n: int):
    """Fraction of S^{n-1} within angle arccos(cos_angle) of a pole (n >= 2)."""
    c = np.clip(cos_angle, -1.0, 1.0)
    half = 0.5 * special.betainc((n - 1) / 2, 0.5, 1.0 - c * c)
    return np.where(c >= 0, half, 1.0 - half)


def sphere_fraction_in_ball(r, t: float, n: int):
    """Fraction of the sphere |x| = r lying in the unit ball centred at t*e1."""
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = (r * r + t * t - 1.0) / (2.0 * r * t)
    return cap_fraction(c, n)


@lru_cache(maxsize=16)
def _gauss(q: int):
    return np.polynomial.legendre.leggauss(q)


def unit_ball_power_integral(a: float, t: float, n: int) -> float:
    """Integral of |x|^a over the unit ball centred at distance t from 0."""
    if n == 1:
        return _interval_power_integral(a, t)
    k = a + n
    S = sphere_area(n)
    if t == 0:
        return S / k
    x, w = _gauss(32)
    if t >= 2.0:
        # far ball: average |t e1 + y|^a over spheres about the centre (the
        # cap formula below loses all digits to cancellation once t >> 1);
        # the integrand is analytic on [0, 1]
        r = 0.5 * (x + 1)
        return S * 0.5 * float(np.dot(w, r ** (n - 1) * spherical_mean_power(-a, t, r, n)))
    full = S * (1.0 - t) ** k / k if t < 1 else 0.0
    lo, hi = abs(1.0 - t), 1.0 + t
    if lo >= 0.25 * hi:
        # r = lo + (hi - lo)(1 - cos th)/2 absorbs the square-root ends of the cap fraction
        th = 0.5 * math.pi * (x + 1)
        r = lo + 0.5 * (hi - lo) * (1 - np.cos(th))
        wr = 0.25 * math.pi * (hi - lo) * np.sin(th) * w
        return full + S * float(np.dot(wr, r ** (k - 1) * sphere_fraction_in_ball(r, t, n)))
    if lo < 0.1 * hi:
        # u = r^k absorbs the radial singularity r^(k-1)
        f = lambda u: float(sphere_fraction_in_ball(u ** (1.0 / k), t, n)) / k
        cap = _quad(f, lo ** k, hi ** k)
    else:
        f = lambda r: r ** (k - 1) * float(sphere_fraction_in_ball(r, t, n))
        cap = _quad(f, lo, hi)
    return full + S * cap


def _interval_power_integral(a: float, t: float) -> float:
    """Integral of |y|^a over [t-1, t+1], t >= 0."""
    k = a + 1.0
    if t <= 1.0:
        return ((1.0 + t) ** k + (1.0 - t) ** k) / k
    # t^k [(1+1/t)^k - (1-1/t)^k] without cancellation
    A = k * math.log1p(1.0 / t)
    B = k * math.log1p(-1.0 / t)
    return t ** k * math.exp(B) * math.expm1(A - B) / k


def ball_integral_radial(fun, d: float, R: float, n: int) -> float:
    """Integral of fun(|x|) over B(d e1, R), fun a vectorised radial profile."""
    S = sphere_area(n)
    t = d / R
    if n == 1:
        g = lambda y: float(fun(abs(y)))
        return _quad(g, d - R, d + R, points=[0.0])
    total = 0.0
    if t < 1:
        total += S * _quad(lambda r: r ** (n - 1) * float(fun(r)), 0.0, R - d)
    lo, hi = abs(R - d), R + d
    if hi > lo:
        f = lambda r: r ** (n - 1) * float(fun(r)) * float(sphere_fraction_in_ball(r / R, t, n))
        total += S * _quad(f, lo, hi)
    return total


def spherical_mean_power(q: float, d: float, r, n: int):
    """Average of |d e1 + r sigma|^{-q} over sigma in S^{n-1}."""
    r = np.asarray(r, dtype=float)
    if q == 0:
        return np.ones_like(r)
    if n == 1:
        with np.errstate(divide="ignore"):
            return 0.5 * (np.abs(d + r) ** (-q) + np.abs(d - r) ** (-q))
    big = np.maximum(d, r)
    small = np.minimum(d, r)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = (small / big) ** 2
        out = big ** (-q) * special.hyp2f1(q / 2, q / 2 + 1 - n / 2, n / 2, z)
    return out


def spherical_mean(fun, d: float, r: float, n: int) -> float:
    """Average of fun(|d e1 + r sigma|) over the unit sphere (numerical)."""
    if n == 1:
        return 0.5 * float(fun(abs(d + r)) + fun(abs(d - r)))
    norm = math.sqrt(math.pi) * math.gamma((n - 1) / 2) / math.gamma(n / 2)
    g = lambda phi: float(fun(math.sqrt(max(d * d + r * r + 2 * d * r * math.cos(phi), 0.0)))) * math.sin(phi) ** (n - 2)
    return _quad(g, 0.0, math.pi) / norm


def _tail_series(q: float, s: float, d: float, rho: float, r0: float, n: int, terms: int = 24) -> float:
    """Integral over r > r0 of r^{n-1} (rho + r)^{-s} M_q(d, r), as a double series.

    Valid for r0 >= 16 * max(d, rho); the dropped terms are below 16^-terms.
    """
    a, b, c = q / 2, q / 2 + 1 - n / 2, n / 2
    A = [1.0]
    for j in range(1, terms):
        A.append(A[-1] * (a + j - 1) * (b + j - 1) / ((c + j - 1) * j))
    B = [1.0]
    for k in range(1, terms):
        B.append(B[-1] * -(s + k - 1) / k)
    total = 0.0
    for j in range(terms):
        dj = (d / r0) ** (2 * j)
        if dj == 0 and j > 0:
            break
        for k in range(terms):
            rk = (rho / r0) ** k
            if rk == 0 and k > 0:
                break
            total += A[j] * B[k] * dj * rk / (q + s + 2 * j + k - n)
    return total * r0 ** (n - q - s)


class DivergentIntegral(ArithmeticError):
    """Raised when a weighted integral is infinite; ``reason`` says why."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def kernel_weighted_integral(q: float, s: float, d: float, rho: float, R: float, n: int,
                             outside: bool = False, min_annuli: int = 0) -> float:
    """Integral of |y|^{-q} (rho + |x_B - y|)^{-s} dy, |x_B| = d.

    Over the whole space, or over the complement of B(x_B, R) when
    ``outside``.  The domain is cut into the ball and the dyadic annuli
    B(x_B, 2^{k+1}R) minus B(x_B, 2^k R); once the annuli are far from both the
    origin and the smoothing scale the remaining tail is summed in closed form.
    """
    if s + q <= n:
        raise DivergentIntegral(f"tail: decay exponent {q + s:g} <= n = {n}")
    origin_in_domain = not outside or d >= R
    if origin_in_domain and q >= n:
        raise DivergentIntegral(f"origin: |y|^{-q:g} not integrable in dimension {n}")
    S = sphere_area(n)

    if q == 0:
        def f(r):
            return r ** (n - 1) * (rho + r) ** (-s)
    elif n == 1:
        def f(r):
            return 0.5 * (rho + r) ** (-s) * (abs(d + r) ** (-q) + abs(d - r) ** (-q))
    else:
        a, b, c = q / 2, q / 2 + 1 - n / 2, n / 2
        hyp = special.hyp2f1

        def f(r):
            big, small = (d, r) if d >= r else (r, d)
            return r ** (n - 1) * (rho + r) ** (-s) * big ** (-q) * hyp(a, b, c, (small / big) ** 2)

    edges = [R] if outside else [0.0, R]
    far = 16.0 * max(d, rho, R)
    k = 0
    while edges[-1] < far or k < min_annuli:
        edges.append(2.0 * edges[-1])
        k += 1
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += _quad(f, lo, hi, points=[d])
    total += _tail_series(q, s, d, rho, edges[-1], n)
    return S * total


def kernel_weighted_integral_generic(fun, s: float, d: float, rho: float, R: float, n: int,
                                     outside: bool = False) -> float:
    """As :func:`kernel_weighted_integral` for a tabulated radial profile ``fun``."""
    S = sphere_area(n)

    def f(r):
        return r ** (n - 1) * (rho + r) ** (-s) * spherical_mean(fun, d, r, n)

    edges = [R] if outside else [0.0, R]
    far = 16.0 * max(d, rho, R)
    while edges[-1] < far:
        edges.append(2.0 * edges[-1])
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += _quad(f, lo, hi, points=[d])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        tail = integrate.quad(f, edges[-1], math.inf, epsabs=0.0, epsrel=1e-10, limit=400)[0]
    return S * (total + tail)
