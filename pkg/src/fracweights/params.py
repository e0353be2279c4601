"""Parameters of the multilinear problem: exponents, orders, balls, regions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

INF = math.inf

# Tolerance for the equality tests on region boundaries.
BOUNDARY_TOL = 1e-12


def parse_exponent(value) -> float:
    """Accept numbers and the strings ``"inf"``, ``"infinity"`` or ``"∞"``."""
    if isinstance(value, str):
        key = value.strip().lower()
        if key in ("inf", "infinity", "∞", "+inf"):
            return INF
        value = float(key)
    value = float(value)
    if math.isnan(value):
        raise ValueError("exponent is NaN")
    return value


def conjugate(p: float) -> float:
    """Hölder conjugate with 1' = inf and inf' = 1."""
    if p == 1:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1.0)


def inverse(p: float) -> float:
    return 0.0 if p == INF else 1.0 / p


def derive_p(p_vec: Sequence) -> float:
    """Aggregate exponent p with 1/p = sum 1/p_i (1/inf = 0)."""
    ps = [parse_exponent(q) for q in p_vec]
    if not ps:
        raise ValueError("empty exponent vector")
    for q in ps:
        if q < 1:
            raise ValueError(f"exponent {q} < 1")
    s = math.fsum(inverse(q) for q in ps)
    return INF if s == 0 else 1.0 / s


def split_gamma(gamma: float, m: int, n: int, split: Sequence[float] | None = None,
                strict: bool = True) -> tuple[float, ...]:
    """Return (gamma_1, ..., gamma_m); equal split unless one is supplied.

    With ``strict=False`` the orders only need a positive kernel decay
    n - gamma_i + 1/m > 0, which keeps every functional well defined.
    """
    cap = n if strict else n + 1.0 / m
    if not 0 < gamma < m * cap:
        raise ValueError(f"need 0 < gamma < {m * cap:g}, got {gamma}")
    if split is None:
        return tuple(gamma / m for _ in range(m))
    split = tuple(float(g) for g in split)
    if len(split) != m:
        raise ValueError(f"gamma split has {len(split)} entries, expected {m}")
    for g in split:
        if not 0 < g < cap:
            raise ValueError(f"split entry {g} outside (0, {cap:g})")
    if abs(math.fsum(split) - gamma) > 1e-12 * max(1.0, abs(gamma)):
        raise ValueError(f"gamma split sums to {math.fsum(split)}, expected {gamma}")
    return split


class Region(str, Enum):
    ADMISSIBLE = "admissible"
    TRIVIAL = "trivial"
    EXCLUDED_CORNER = "excluded_corner"


def classify(gamma: float, n_over_p: float, delta: float, tol: float = BOUNDARY_TOL) -> Region:
    """Region label from gamma, n/p and delta alone."""
    gap = gamma - n_over_p
    if abs(delta - 1) <= tol and abs(gap - 1) <= tol:
        return Region.EXCLUDED_CORNER
    if delta <= min(1.0, gap) + tol:
        return Region.ADMISSIBLE
    return Region.TRIVIAL


@dataclass(frozen=True)
class FracParams:
    n: int
    m: int
    gamma: float
    delta: float
    p_vec: tuple
    gamma_split: tuple = None
    strict: bool = True

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"dimension n must be a positive integer, got {self.n}")
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))
        p_vec = tuple(parse_exponent(q) for q in self.p_vec)
        if len(p_vec) != self.m:
            raise ValueError(f"p_vec has {len(p_vec)} entries, expected m={self.m}")
        derive_p(p_vec)
        object.__setattr__(self, "p_vec", p_vec)
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "gamma_split", split_gamma(self.gamma, self.m, self.n, self.gamma_split, self.strict))

    @property
    def p(self) -> float:
        return derive_p(self.p_vec)

    @property
    def inv_p(self) -> float:
        return math.fsum(inverse(q) for q in self.p_vec)

    @property
    def n_over_p(self) -> float:
        return self.n * self.inv_p

    @property
    def gap(self) -> float:
        """gamma - n/p, the critical smoothness."""
        return self.gamma - self.n_over_p

    @property
    def conj(self) -> tuple[float, ...]:
        return tuple(conjugate(q) for q in self.p_vec)

    @property
    def I1(self) -> tuple[int, ...]:
        return tuple(i for i, q in enumerate(self.p_vec) if q == 1)

    @property
    def I2(self) -> tuple[int, ...]:
        return tuple(i for i, q in enumerate(self.p_vec) if q > 1)

    @property
    def m1(self) -> int:
        return len(self.I1)

    @property
    def m2(self) -> int:
        return len(self.I2)

    @property
    def equal_split(self) -> bool:
        g = self.gamma / self.m
        return all(abs(gi - g) <= 1e-12 for gi in self.gamma_split)

    def exponents(self) -> "KernelExponents":
        return KernelExponents.from_params(self)

    def region(self) -> Region:
        return region_classify(self)

    def with_delta(self, delta: float) -> "FracParams":
        return FracParams(self.n, self.m, self.gamma, delta, self.p_vec, self.gamma_split, self.strict)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "gamma": self.gamma,
            "gamma_split": list(self.gamma_split),
            "delta": self.delta,
            "p_vec": ["inf" if q == INF else q for q in self.p_vec],
            "strict": self.strict,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FracParams":
        missing = {"n", "m", "gamma", "delta", "p_vec"} - set(doc)
        if missing:
            raise ValueError(f"missing parameter keys: {sorted(missing)}")
        return cls(
            n=doc["n"],
            m=doc["m"],
            gamma=doc["gamma"],
            delta=doc["delta"],
            p_vec=tuple(doc["p_vec"]),
            gamma_split=tuple(doc["gamma_split"]) if doc.get("gamma_split") is not None else None,
            strict=bool(doc.get("strict", True)),
        )


def region_classify(params: FracParams) -> Region:
    return classify(params.gamma, params.n_over_p, params.delta)


@dataclass(frozen=True)
class KernelExponents:
    """Two families of exponents used by the kernel and by the example recipe.

    ``theta`` is the decay n - gamma_i + 1/m of the smoothed kernel in each
    factor.  ``theta_recipe`` is n/p_i + (1 - gamma)/m, the bookkeeping
    exponent of the power-weight construction; it equals theta - n/p_i'
    under the equal split.
    """

    theta: tuple[float, ...]
    theta_recipe: tuple[float, ...]

    @classmethod
    def from_params(cls, params: FracParams) -> "KernelExponents":
        n, m = params.n, params.m
        theta = tuple(n - g + 1.0 / m for g in params.gamma_split)
        recipe = tuple(n * inverse(q) + (1.0 - params.gamma) / m for q in params.p_vec)
        return cls(theta, recipe)


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in R^n (2 for n = 1)."""
    return n * unit_ball_volume(n)


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        if c.ndim != 1:
            raise ValueError("ball center must be a point")
        if not self.radius > 0 or not math.isfinite(self.radius):
            raise ValueError(f"ball radius must be positive and finite, got {self.radius}")
        object.__setattr__(self, "center", tuple(float(v) for v in c))
        object.__setattr__(self, "radius", float(self.radius))

    @classmethod
    def radial(cls, dist: float, radius: float, n: int) -> "Ball":
        """Ball centred at dist * e_1 in R^n."""
        c = [0.0] * n
        c[0] = float(dist)
        return cls(tuple(c), radius)

    @property
    def n(self) -> int:
        return len(self.center)

    @property
    def center_norm(self) -> float:
        return math.hypot(*self.center) if self.n > 1 else abs(self.center[0])

    @property
    def volume(self) -> float:
        return unit_ball_volume(self.n) * self.radius ** self.n

    @property
    def side(self) -> float:
        """|B|^{1/n}."""
        return unit_ball_volume(self.n) ** (1.0 / self.n) * self.radius

    def scaled(self, lam: float) -> "Ball":
        return Ball(tuple(lam * c for c in self.center), lam * self.radius)

    def dilate(self, k: float) -> "Ball":
        return Ball(self.center, k * self.radius)

    def contains(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.linalg.norm(pts - np.asarray(self.center), axis=1) < self.radius
