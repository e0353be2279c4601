"""Quadrature for the multilinear fractional integral and the Lipschitz
seminorms of its output.

Around the evaluation point x every y_i is written x + r_i sigma_i, which
turns the operator into an m-dimensional integral over radii

    int_{[0, inf)^m} (r_1 + ... + r_m)^{gamma - m n} prod_i r_i^{n-1} F_i(r_i) dr,

with F_i(r) the integral of f_i over the sphere |y - x| = r.  The only
singularity left is the corner r = 0.  Each radial axis gets a mesh graded
geometrically toward 0 plus every radius where F_i has a break; the tensor
Gauss-Legendre rule then sees a smooth kernel in every cell except the tiny
corner cell [0, eps]^m, which is integrated in closed form using
F_i(r) ~ F_i(0+).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from numpy.polynomial import legendre, polynomial
from scipy import integrate

from .conditions import weight_sup, winv_ball
from .corners import CornerSets, build_corner_sets
from .params import Ball, FracParams
from .weights import PowerWeight, WeightPair

MAX_N = 2
MAX_M = 3
MAX_GRID = 2 ** 7
# tensor size above which the quadrature refuses to run
MAX_TENSOR = 2 * 10 ** 8


class SingularPointError(ValueError):
    pass


class DeskScaleError(ValueError):
    """Requested problem exceeds the supported sizes (n <= 2, m <= 3, 2^7 samples per axis)."""


@lru_cache(maxsize=64)
def _gauss(q: int):
    return legendre.leggauss(q)


# ---------------------------------------------------------------------------
# test functions


@dataclass(frozen=True)
class GridFunction:
    """Bounded compactly supported function on R^n, n <= 2.

    ``kind`` is ``"samples"`` (cell values on a uniform grid over ``box``,
    piecewise constant), ``"indicator"`` (of ``box``) or ``"polynomial"``
    (``coeffs`` times the indicator of ``box``; monomial coefficients, a
    list for n = 1 and a 2-D array c[j][k] for x^j y^k when n = 2).
    """

    kind: str
    box: tuple
    samples: tuple | None = None
    coeffs: tuple | None = None

    def __post_init__(self):
        box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        if not 1 <= len(box) <= MAX_N:
            raise DeskScaleError(f"dimension {len(box)} not supported (n <= {MAX_N})")
        for lo, hi in box:
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValueError("support box must be finite and non-degenerate")
        object.__setattr__(self, "box", box)
        if self.kind == "samples":
            arr = np.asarray(self.samples, dtype=float)
            if arr.ndim != len(box):
                raise ValueError(f"samples must be a {len(box)}-d array")
            if any(k > MAX_GRID for k in arr.shape) or arr.size == 0:
                raise DeskScaleError(f"at most {MAX_GRID} samples per axis")
            if not np.all(np.isfinite(arr)):
                raise ValueError("samples must be finite")
            object.__setattr__(self, "samples", _freeze(arr))
        elif self.kind == "polynomial":
            c = np.asarray(self.coeffs, dtype=float)
            if c.ndim != len(box):
                raise ValueError("polynomial coefficients must have one axis per dimension")
            object.__setattr__(self, "coeffs", _freeze(c))
        elif self.kind != "indicator":
            raise ValueError(f"unknown GridFunction kind {self.kind!r}")

    # constructors
    @classmethod
    def indicator(cls, box) -> "GridFunction":
        return cls("indicator", tuple(box))

    @classmethod
    def polynomial(cls, coeffs, box) -> "GridFunction":
        return cls("polynomial", tuple(box), coeffs=coeffs)

    @classmethod
    def from_samples(cls, box, samples) -> "GridFunction":
        return cls("samples", tuple(box), samples=samples)

    @classmethod
    def random_piecewise(cls, rng: np.random.Generator, box, cells: int = 8,
                         low: float = 0.5, high: float = 2.0) -> "GridFunction":
        shape = (cells,) * len(box)
        return cls.from_samples(box, rng.uniform(low, high, shape))

    @property
    def n(self) -> int:
        return len(self.box)

    @property
    def values(self) -> np.ndarray:
        return np.asarray(self.samples, dtype=float)

    @property
    def spacing(self) -> tuple:
        if self.kind != "samples":
            return tuple(hi - lo for lo, hi in self.box)
        return tuple((hi - lo) / k for (lo, hi), k in zip(self.box, self.values.shape))

    @property
    def piecewise_constant(self) -> bool:
        return self.kind in ("samples", "indicator")

    def breaklines(self, axis: int) -> np.ndarray:
        lo, hi = self.box[axis]
        k = self.values.shape[axis] if self.kind == "samples" else 1
        return lo + (hi - lo) * np.arange(k + 1) / k

    def __call__(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if self.n == 1:
            pts = pts.reshape(-1, 1)
        inside = np.ones(len(pts), dtype=bool)
        for a, (lo, hi) in enumerate(self.box):
            inside &= (pts[:, a] >= lo) & (pts[:, a] < hi)
        out = np.zeros(len(pts))
        if self.kind == "indicator":
            out[inside] = 1.0
        elif self.kind == "polynomial":
            p = pts[inside]
            c = np.asarray(self.coeffs)
            out[inside] = polynomial.polyval(p[:, 0], c) if self.n == 1 else polynomial.polyval2d(p[:, 0], p[:, 1], c)
        else:
            v = self.values
            idx = []
            for a, (lo, hi) in enumerate(self.box):
                k = v.shape[a]
                i = np.floor((pts[inside, a] - lo) / (hi - lo) * k).astype(int)
                idx.append(np.clip(i, 0, k - 1))
            out[inside] = v[tuple(idx)]
        return out

    def scaled(self, c: float) -> "GridFunction":
        if self.kind == "samples":
            return GridFunction.from_samples(self.box, c * self.values)
        if self.kind == "polynomial":
            return GridFunction.polynomial(c * np.asarray(self.coeffs), self.box)
        return GridFunction.polynomial(np.full((1,) * self.n, c), self.box)

    def shifted(self, h) -> "GridFunction":
        """f(. - h) for piecewise-constant kinds."""
        h = np.atleast_1d(np.asarray(h, dtype=float))
        box = tuple((lo + s, hi + s) for (lo, hi), s in zip(self.box, h))
        if self.kind == "polynomial":
            raise NotImplementedError("polynomial pieces are not shifted")
        return GridFunction(self.kind, box, self.samples, self.coeffs)

    # norms
    def norm(self, p: float, weight=None) -> float:
        """||f v||_p for a power weight v (``None`` for v = 1)."""
        a = 0.0 if weight is None else _power_exponent(weight)
        if p == math.inf:
            return self._sup_norm(a)
        total = math.fsum(self._piece_integral(lo, hi, val, p, a) for lo, hi, val in self._pieces())
        return total ** (1.0 / p)

    def _pieces(self):
        """(lower corner, upper corner, value or None for polynomial)."""
        if self.kind == "samples":
            v = self.values
            edges = [self.breaklines(a) for a in range(self.n)]
            for idx in np.ndindex(v.shape):
                lo = np.array([edges[a][i] for a, i in enumerate(idx)])
                hi = np.array([edges[a][i + 1] for a, i in enumerate(idx)])
                yield lo, hi, float(v[idx])
        else:
            lo = np.array([b[0] for b in self.box])
            hi = np.array([b[1] for b in self.box])
            yield lo, hi, (1.0 if self.kind == "indicator" else None)

    def _piece_integral(self, lo, hi, val, p, a) -> float:
        if val is not None and val == 0:
            return 0.0
        if val is not None and self.n == 1:
            return abs(val) ** p * _abs_power_integral(lo[0], hi[0], a * p)
        if val is not None and a == 0:
            return abs(val) ** p * float(np.prod(hi - lo))
        f = lambda *x: abs(float(self(np.array([x[::-1]]))[0])) ** p * math.hypot(*x) ** (a * p)
        if self.n == 1:
            g = lambda t: abs(float(self(np.array([[t]]))[0])) ** p * abs(t) ** (a * p)
            return integrate.quad(g, lo[0], hi[0], points=[0.0] if lo[0] < 0 < hi[0] else None,
                                  epsabs=0, epsrel=1e-10, limit=200)[0]
        if a == 0 or not (lo[0] <= 0 <= hi[0] and lo[1] <= 0 <= hi[1]):
            x, w = _gauss(12)
            xs = 0.5 * (hi[0] - lo[0]) * (x + 1) + lo[0]
            ys = 0.5 * (hi[1] - lo[1]) * (x + 1) + lo[1]
            X, Y = np.meshgrid(xs, ys, indexing="ij")
            vals = np.abs(self(np.column_stack([X.ravel(), Y.ravel()]))) ** p * np.hypot(X.ravel(), Y.ravel()) ** (a * p)
            W = np.outer(w, w).ravel() * 0.25 * float(np.prod(hi - lo))
            return float(np.dot(W, vals))
        return integrate.dblquad(f, lo[0], hi[0], lo[1], hi[1], epsabs=0, epsrel=1e-9)[0]

    def _sup_norm(self, a: float) -> float:
        best = 0.0
        for lo, hi, val in self._pieces():
            if val is None:
                g = [np.linspace(l, h, 65)[:-1] for l, h in zip(lo, hi)]
                pts = np.stack(np.meshgrid(*g, indexing="ij"), -1).reshape(-1, self.n)
                val = float(np.max(np.abs(self(pts))))
            if val == 0:
                continue
            near = np.linalg.norm(np.clip(0.0, lo, hi))
            far = np.linalg.norm(np.maximum(np.abs(lo), np.abs(hi)))
            if a < 0:
                vs = math.inf if near == 0 else near ** a
            else:
                vs = far ** a
            best = max(best, abs(val) * vs)
        return best

    def to_dict(self) -> dict:
        doc = {"kind": self.kind, "box": [list(b) for b in self.box]}
        if self.kind == "samples":
            doc["spacing"] = list(self.spacing)
            doc["samples"] = self.values.tolist()
        if self.kind == "polynomial":
            doc["coeffs"] = np.asarray(self.coeffs).tolist()
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "GridFunction":
        kind = doc.get("kind", "samples")
        box = tuple(tuple(b) for b in doc["box"])
        if kind == "samples":
            f = cls.from_samples(box, doc["samples"])
            if "spacing" in doc and not np.allclose(f.spacing, doc["spacing"], rtol=1e-12, atol=0):
                raise ValueError("spacing inconsistent with box and sample count")
            return f
        if kind == "polynomial":
            return cls.polynomial(doc["coeffs"], box)
        return cls(kind, box)


def _freeze(arr: np.ndarray):
    return tuple(_freeze(a) for a in arr) if arr.ndim > 1 else tuple(float(x) for x in arr)


def _power_exponent(weight) -> float:
    if isinstance(weight, PowerWeight):
        return weight.exponent
    if isinstance(weight, (int, float)):
        return float(weight)
    raise TypeError("norms are computed for power weights")


def _abs_power_integral(a: float, b: float, c: float) -> float:
    """Integral of |t|^c over [a, b]."""
    if c == 0:
        return b - a

    def prim(t):  # antiderivative on t >= 0
        if c == -1:
            return math.log(t)
        return t ** (c + 1) / (c + 1)

    if a >= 0:
        return prim(b) - prim(a) if a > 0 or c > -1 else math.inf
    if b <= 0:
        return _abs_power_integral(-b, -a, c)
    if c <= -1:
        return math.inf
    return prim(b) + prim(-a)


# ---------------------------------------------------------------------------
# the kernel


def kernel(x, y_vec, params: FracParams) -> float:
    """(sum_i |x - y_i|)^{gamma - m n}."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    s = math.fsum(float(np.linalg.norm(np.atleast_1d(np.asarray(y, dtype=float)) - x)) for y in y_vec)
    if len(y_vec) != params.m:
        raise ValueError(f"need {params.m} points, got {len(y_vec)}")
    if s == 0:
        raise SingularPointError("kernel is singular when every y_i equals x")
    return s ** (params.gamma - params.m * params.n)


def kernel_array(x: np.ndarray, ys: np.ndarray, params: FracParams) -> np.ndarray:
    """Vectorised kernel: x (N, n), ys (N, m, n)."""
    s = np.linalg.norm(ys - x[:, None, :], axis=2).sum(axis=1)
    if np.any(s == 0):
        raise SingularPointError("kernel is singular when every y_i equals x")
    return s ** (params.gamma - params.m * params.n)


# ---------------------------------------------------------------------------
# radial reduction


def _spherical_profile(f: GridFunction, x: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """F(r): integral of f over the sphere |y - x| = r (counting measure for n = 1)."""
    if f.n == 1:
        return f(x[0] + radii) + f(x[0] - radii)
    lines_x = f.breaklines(0) - x[0]
    lines_y = f.breaklines(1) - x[1]
    q = 1 if f.piecewise_constant else 8
    gx, gw = _gauss(q)
    out = np.empty(len(radii))
    for k, r in enumerate(radii):
        cx = lines_x[np.abs(lines_x) < r] / r
        cy = lines_y[np.abs(lines_y) < r] / r
        ax = np.arccos(cx)
        ay = np.arcsin(cy)
        ang = np.concatenate([[0.0, 2 * math.pi], ax, 2 * math.pi - ax, np.mod(ay, 2 * math.pi), math.pi - ay])
        ang = np.unique(np.mod(ang, 2 * math.pi))
        ang = np.append(ang, 2 * math.pi) if ang[-1] < 2 * math.pi else ang
        lo, hi = ang[:-1], ang[1:]
        half = 0.5 * (hi - lo)
        phi = (lo[:, None] + half[:, None] * (gx[None, :] + 1)).ravel()
        w = (half[:, None] * gw[None, :]).ravel()
        pts = np.column_stack([x[0] + r * np.cos(phi), x[1] + r * np.sin(phi)])
        out[k] = float(np.dot(w, f(pts)))
    return out


def _radial_breaks(f: GridFunction, x: np.ndarray) -> np.ndarray:
    if f.n == 1:
        return np.abs(f.breaklines(0) - x[0])
    bx = np.abs(f.breaklines(0) - x[0])
    by = np.abs(f.breaklines(1) - x[1])
    out = [bx, by]
    if len(bx) * len(by) <= 1024:
        out.append(np.hypot(bx[:, None], by[None, :]).ravel())
    return np.concatenate(out)


def _support_reach(f: GridFunction, x: np.ndarray) -> float:
    far = [max(abs(lo - c), abs(hi - c)) for (lo, hi), c in zip(f.box, x)]
    return float(np.linalg.norm(far))


@lru_cache(maxsize=256)
def _corner_constant(m: int, n: int, gamma: float) -> float:
    """K with int_{[0, e]^m} (sum r)^{gamma - m n} prod r_i^{n-1} dr = K e^gamma.

    Self-similarity gives K = Q / (1 - 2^-gamma) with Q the integral over
    [0,1]^m minus [0,1/2]^m, where the kernel is smooth.
    """
    x, w = _gauss(24)
    cells = [(0.0, 0.5), (0.5, 1.0)]
    total = 0.0
    for combo in np.ndindex(*(2,) * m):
        if all(c == 0 for c in combo):
            continue
        grids = []
        wts = []
        for c in combo:
            lo, hi = cells[c]
            r = 0.5 * (hi - lo) * (x + 1) + lo
            grids.append(r)
            wts.append(0.5 * (hi - lo) * w * r ** (n - 1))
        R = np.meshgrid(*grids, indexing="ij")
        W = np.meshgrid(*wts, indexing="ij")
        s = sum(R)
        total += float(np.sum(np.prod(W, axis=0) * s ** (gamma - m * n)))
    return total / (1.0 - 2.0 ** (-gamma))


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    nodes: int


def _axis_rule(f: GridFunction, x: np.ndarray, eps: float, reach: float, q: int, levels: int):
    """Nodes, weights r^{n-1} F(r) w and the size of the leading corner block."""
    edges = [0.0, eps]
    edges += [reach * 2.0 ** (-k) for k in range(levels + 1)]
    br = _radial_breaks(f, x)
    edges += [b for b in br if 0 < b < reach]
    if f.n == 2:
        # tangency radii give square-root kinks in F; grade toward the few of them
        tang = np.unique(np.concatenate([np.abs(f.breaklines(a) - x[a]) for a in range(2)]))
        tang = tang[(tang > 0) & (tang < reach)]
        if len(tang) <= 16:
            g = 2.0 ** -np.arange(1, 13)
            for b in tang:
                edges += list(b * (1 - g)) + list(b * (1 + g))
    edges = np.unique(np.asarray(edges))
    edges = edges[edges <= reach]
    # collapse slivers below rounding level
    keep = np.concatenate([[True], np.diff(edges) > 1e-13 * reach])
    edges = edges[keep]
    if edges[1] != eps:
        edges = np.unique(np.concatenate([edges, [eps]]))
    gx, gw = _gauss(q)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    r = (lo[:, None] + half[:, None] * (gx[None, :] + 1)).ravel()
    w = (half[:, None] * gw[None, :]).ravel()
    F = _spherical_profile(f, x, r)
    n = f.n
    return r, w * r ** (n - 1) * F, q


def _tensor_sum(rs, ws, e: float) -> float:
    m = len(rs)
    if m == 1:
        return math.fsum((ws[0] * rs[0] ** e).tolist())
    size = int(np.prod([len(r) for r in rs]))
    if size > MAX_TENSOR:
        raise DeskScaleError(f"quadrature tensor of {size:.3g} nodes exceeds the desk-scale cap")
    if m == 2:
        parts = []
        r1, w1 = rs[0], ws[0]
        for i0 in range(0, len(rs[1]), 512):
            r2 = rs[1][i0:i0 + 512]
            w2 = ws[1][i0:i0 + 512]
            parts.append(float(w1 @ (r1[:, None] + r2[None, :]) ** e @ w2))
        return math.fsum(parts)
    parts = []
    for r3, w3 in zip(rs[2], ws[2]):
        if w3 == 0:
            continue
        parts.append(w3 * float(ws[0] @ (rs[0][:, None] + rs[1][None, :] + r3) ** e @ ws[1]))
    return math.fsum(parts)


def _igamma_once(f_vec, x, params: FracParams, r_max, q: int, levels: int) -> tuple[float, int]:
    n, m = params.n, params.m
    e = params.gamma - m * n
    reach = [min(_support_reach(f, x), r_max) for f in f_vec]
    if min(reach) <= 0:
        return 0.0, 0
    eps = min(reach) * 2.0 ** (-levels)
    rs, ws, corner = [], [], []
    for f, L in zip(f_vec, reach):
        r, w, k = _axis_rule(f, x, eps, L, q, levels)
        rs.append(r)
        ws.append(w)
        corner.append(k)
    total = _tensor_sum(rs, ws, e)
    # swap the quadrature of the singular corner block for its closed form
    crude = _tensor_sum([r[:k] for r, k in zip(rs, corner)], [w[:k] for w, k in zip(ws, corner)], e)
    F0 = [float(_spherical_profile(f, x, np.array([0.5 * eps]))[0]) for f in f_vec]
    exact = _corner_constant(m, n, params.gamma) * eps ** params.gamma * math.prod(F0)
    return total - crude + exact, int(np.prod([len(r) for r in rs]))


def _check_desk(f_vec, params: FracParams, x):
    if params.n > MAX_N or params.m > MAX_M:
        raise DeskScaleError(f"operator quadrature supports n <= {MAX_N}, m <= {MAX_M}")
    if params.gamma <= 0:
        raise SingularPointError("nonintegrable singularity: gamma must be positive")
    if len(f_vec) != params.m:
        raise ValueError(f"need {params.m} functions, got {len(f_vec)}")
    for f in f_vec:
        if f.n != params.n:
            raise ValueError("function dimension differs from n")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (params.n,):
        raise ValueError(f"evaluation point must lie in R^{params.n}")
    return x


def _default_order(m: int) -> int:
    return {1: 16, 2: 10, 3: 5}[m]


def igamma_quadrature(f_vec: Sequence[GridFunction], x, params: FracParams, r_max: float = math.inf,
                      order: int | None = None, levels: int = 48) -> QuadratureResult:
    """I_{gamma,m} f(x) with a refinement-based error estimate.

    ``r_max`` restricts every y_i to the ball B(x, r_max).  The error is the
    change when the Gauss order is raised by 4.
    """
    x = _check_desk(f_vec, params, x)
    q = order or _default_order(params.m)
    v1, _ = _igamma_once(f_vec, x, params, r_max, q, levels)
    v2, nodes = _igamma_once(f_vec, x, params, r_max, q + 4, levels)
    err = abs(v2 - v1) / abs(v2) if v2 != 0 else abs(v1)
    return QuadratureResult(v2, err, nodes)


def apply_Igamma(f_vec: Sequence[GridFunction], x, params: FracParams, r_max: float = math.inf,
                 order: int | None = None, levels: int = 48) -> float:
    x = _check_desk(f_vec, params, x)
    return _igamma_once(f_vec, x, params, r_max, order or _default_order(params.m), levels)[0]


def j_constant(f_vec, params: FracParams, **kw) -> float:
    """int prod f_i (1 - chi_{B(0,1)^m}) (sum |y_i|)^{gamma - m n}, the shift from I to J."""
    origin = np.zeros(params.n)
    return apply_Igamma(f_vec, origin, params, **kw) - apply_Igamma(f_vec, origin, params, r_max=1.0, **kw)


def apply_Jgamma(f_vec, x, params: FracParams, constant: float | None = None, **kw) -> float:
    """J f(x) = I f(x) - j_constant(f); pass ``constant`` to reuse it across points."""
    c = j_constant(f_vec, params, **kw) if constant is None else constant
    return apply_Igamma(f_vec, x, params, **kw) - c


def _far_part(f_vec, ball: Ball, params: FracParams, **kw) -> float:
    """int prod f_i (1 - chi_{(2B)^m}) (sum |x_B - y_i|)^{gamma - m n}."""
    xb = np.asarray(ball.center)
    return apply_Igamma(f_vec, xb, params, **kw) - apply_Igamma(f_vec, xb, params, r_max=2 * ball.radius, **kw)


def compute_aB(f_vec, ball: Ball, params: FracParams, constant: float | None = None, **kw) -> float:
    c = j_constant(f_vec, params, **kw) if constant is None else constant
    return _far_part(f_vec, ball, params, **kw) - c


def local_part(f_vec, x, ball: Ball, params: FracParams, far: float | None = None, **kw) -> float:
    """The ball-adapted operator: I f(x) minus the far part taken at the centre."""
    fp = _far_part(f_vec, ball, params, **kw) if far is None else far
    return apply_Igamma(f_vec, x, params, **kw) - fp


# ---------------------------------------------------------------------------
# Lipschitz quotients


def ball_rule(ball: Ball, panels: int = 8, order: int = 8, angles: int = 64):
    """Quadrature points and weights on a ball (composite Gauss; polar for n = 2)."""
    gx, gw = _gauss(order)
    c = np.asarray(ball.center)
    R = ball.radius
    edges = np.linspace(-R, R, panels + 1) if ball.n == 1 else np.linspace(0, R, panels + 1)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    t = (lo[:, None] + half[:, None] * (gx + 1)).ravel()
    w = (half[:, None] * gw).ravel()
    if ball.n == 1:
        return (c[0] + t)[:, None], w
    if ball.n != 2:
        raise DeskScaleError("ball rules are provided for n <= 2")
    phi = 2 * math.pi * (np.arange(angles) + 0.5) / angles
    T, P = np.meshgrid(t, phi, indexing="ij")
    W = np.outer(w * t, np.full(angles, 2 * math.pi / angles))
    pts = np.column_stack([c[0] + (T * np.cos(P)).ravel(), c[1] + (T * np.sin(P)).ravel()])
    return pts, W.ravel()


def mean_oscillation(values: np.ndarray, weights: np.ndarray) -> float:
    """int_B |g - g_B| from samples on a ball rule; g_B from the same rule."""
    gB = float(np.dot(weights, values) / np.sum(weights))
    return float(np.dot(weights, np.abs(values - gB)))


def lipschitz_quotient(g, w, delta: float, ball: Ball, variant: str = "L", values=None,
                       panels: int = 8, order: int = 8) -> float:
    """Per-ball oscillation quotient of g.

    ``"L"``: int_B |g - g_B| / (w^{-1}(B) |B|^{delta/n}).
    ``"LL"``: ||w chi_B||_inf / |B|^{1 + delta/n} int_B |g - g_B|.
    ``w = None`` means w = 1.  ``values`` may carry g at the rule's nodes.
    """
    pts, wts = ball_rule(ball, panels, order)
    vals = np.asarray(g(pts) if values is None else values, dtype=float)
    osc = mean_oscillation(vals, wts)
    n = ball.n
    weight = w if w is not None else PowerWeight(0.0)
    if variant == "L":
        den = winv_ball(weight, ball) * ball.volume ** (delta / n)
        return osc / den
    if variant == "LL":
        top = weight_sup(weight, ball)
        if math.isinf(top):
            return math.inf if osc > 0 else 0.0
        return top * osc / ball.volume ** (1 + delta / n)
    raise ValueError("variant must be 'L' or 'LL'")


def lipschitz_seminorm(g, w, delta: float, balls, variant: str = "L", **kw) -> float:
    return max(lipschitz_quotient(g, w, delta, b, variant, **kw) for b in balls)


# ---------------------------------------------------------------------------
# kernel-difference lower bound


def kernel_gap_terms(x, z, y_vec, ball: Ball, params: FracParams, sets: CornerSets | None = None) -> tuple[float, float]:
    """(K(x, y) - K(z, y), |B|^{1/n} / (|B|^{1/n} + sum |x_B - y_j|)^{m n - gamma + 1})."""
    sets = sets or build_corner_sets(ball)
    if not sets.C1.contains(x)[0]:
        raise ValueError("x must lie in C1")
    if not sets.C2.contains(z)[0]:
        raise ValueError("z must lie in C2")
    if not np.all(sets.A.contains(np.asarray(y_vec, dtype=float).reshape(len(y_vec), -1))):
        raise ValueError("every y_j must lie in A")
    lhs = kernel(x, y_vec, params) - kernel(z, y_vec, params)
    xb = np.asarray(ball.center)
    L = ball.side
    s = math.fsum(float(np.linalg.norm(np.atleast_1d(y) - xb)) for y in y_vec)
    rhs = L / (L + s) ** (params.m * params.n - params.gamma + 1)
    return lhs, rhs


def kernel_gap_ratios(params: FracParams, ball: Ball, samples: int, rng: np.random.Generator) -> np.ndarray:
    """lhs/rhs of the kernel-difference bound on random admissible triples."""
    sets = build_corner_sets(ball)
    m, n = params.m, params.n
    x = sets.C1.sample(samples, rng)
    z = sets.C2.sample(samples, rng)
    ys = sets.A.sample(samples * m, rng, scale=ball.radius).reshape(samples, m, n)
    lhs = kernel_array(x, ys, params) - kernel_array(z, ys, params)
    L = ball.side
    s = np.linalg.norm(ys - np.asarray(ball.center), axis=2).sum(axis=1)
    rhs = L / (L + s) ** (m * n - params.gamma + 1)
    return lhs / rhs


# ---------------------------------------------------------------------------
# boundedness experiment


@dataclass
class OscillationReport:
    balls: list
    quotients: list
    max_quotient: float
    norm_product: float
    ratio: float
    variant: str
    slope: object = None
    note: str = ("numerical evidence for boundedness on a finite ball family with "
                 "compactly supported test functions; not a proof")
    extra: dict = field(default_factory=dict)

    @property
    def per_ball_ratios(self) -> list:
        return [q / self.norm_product for q in self.quotients]

    def csv_rows(self) -> list[dict]:
        return [
            {"x_B": ";".join(repr(c) for c in b.center), "R": repr(b.radius), "quotient": repr(q),
             "ratio": repr(q / self.norm_product)}
            for b, q in zip(self.balls, self.quotients)
        ]


def ball_family(centers: Sequence[float], decades: tuple = (-3, 1), per_decade: int = 2, n: int = 1) -> list[Ball]:
    lo, hi = decades
    radii = [10.0 ** ((lo * per_decade + k) / per_decade) for k in range((hi - lo) * per_decade + 1)]
    return [Ball.radial(c, R, n) for R in radii for c in centers]


def boundedness_experiment(pair: WeightPair, f_vec, params: FracParams, balls: Sequence[Ball],
                           variant: str = "L", panels: int = 4, order: int = 6, **kw) -> OscillationReport:
    """Oscillation quotients of J f over ``balls`` against prod ||f_i v_i||_{p_i}."""
    from .supsearch import _fit

    c = j_constant(f_vec, params, **kw)
    norms = [f.norm(p, v) for f, p, v in zip(f_vec, params.p_vec, pair.v)]
    prod = math.prod(norms)
    quotients = []
    for b in balls:
        pts, _ = ball_rule(b, panels, order)
        vals = np.array([apply_Igamma(f_vec, p, params, **kw) for p in pts]) - c
        quotients.append(lipschitz_quotient(None, pair.w, params.delta, b, variant, values=vals,
                                            panels=panels, order=order))
    radii = sorted({b.radius for b in balls})
    prof = [max(q for b, q in zip(balls, quotients) if b.radius == R) for R in radii]
    slope = _fit("R->0", radii, prof) if len(radii) >= 3 else None
    qmax = max(quotients)
    return OscillationReport(list(balls), quotients, qmax, prod, qmax / prod, variant, slope,
                             extra={"norms": norms, "j_constant": c})
