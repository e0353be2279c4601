"""Quadrant-shaped sets attached to a ball: the positive quadrant A from the
centre, and two negative ball-quadrants C1 (small, near the centre) and C2
(larger, further out).  For x in C1, z in C2 and y in A, every y is strictly
closer to x than to z, which drives the kernel-difference lower bound."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import Ball, unit_ball_volume


@dataclass(frozen=True)
class QuadrantSet:
    """Ball(anchor, radius) intersected with the orthant anchor + sign*h, h >= 0.

    ``radius = inf`` gives the bare orthant.
    """

    anchor: np.ndarray
    radius: float
    sign: int

    def contains(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        h = self.sign * (pts - self.anchor)
        inside = np.all(h >= 0, axis=1)
        if math.isfinite(self.radius):
            inside &= np.linalg.norm(pts - self.anchor, axis=1) <= self.radius
        return inside

    @property
    def volume(self) -> float:
        n = len(self.anchor)
        if not math.isfinite(self.radius):
            return math.inf
        return unit_ball_volume(n) * self.radius ** n / 2 ** n

    def sample(self, size: int, rng: np.random.Generator, scale: float | None = None) -> np.ndarray:
        """Uniform draws from the ball-quadrant.

        For the unbounded orthant, radii are log-uniform over
        [1e-3, 1e3] * ``scale`` (not uniform; there is no uniform law).
        """
        n = len(self.anchor)
        g = rng.standard_normal((size, n))
        g = np.abs(g) / np.linalg.norm(g, axis=1, keepdims=True)
        if math.isfinite(self.radius):
            r = self.radius * rng.random(size) ** (1.0 / n)
        else:
            if scale is None:
                raise ValueError("scale required to sample an unbounded orthant")
            r = scale * 10.0 ** rng.uniform(-3, 3, size)
        return self.anchor + self.sign * g * r[:, None]


@dataclass(frozen=True)
class CornerSets:
    ball: Ball
    A: QuadrantSet
    C1: QuadrantSet
    C2: QuadrantSet


def build_corner_sets(ball: Ball, n: int | None = None) -> CornerSets:
    n = ball.n if n is None else n
    if n != ball.n:
        raise ValueError("dimension mismatch between ball and n")
    x = np.asarray(ball.center, dtype=float)
    R = ball.radius
    u = np.ones(n)
    r1 = R / (12 * math.sqrt(n))
    A = QuadrantSet(x, math.inf, +1)
    C1 = QuadrantSet(x - r1 * u, r1, -1)
    C2 = QuadrantSet(x - R / (3 * math.sqrt(n)) * u, 2 * R / 3, -1)
    return CornerSets(ball, A, C1, C2)


def monte_carlo_fraction(ball: Ball, qs: QuadrantSet, samples: int, rng: np.random.Generator) -> float:
    """Estimate |Q|/|B| by uniform sampling of B (membership counted for Q)."""
    n = ball.n
    g = rng.standard_normal((samples, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = ball.radius * rng.random(samples) ** (1.0 / n)
    pts = np.asarray(ball.center) + g * r[:, None]
    return float(np.mean(qs.contains(pts)))
