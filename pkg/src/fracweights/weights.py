"""Radial weights: exact power weights |x|^a and tabulated radial profiles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PowerWeight:
    exponent: float

    def __call__(self, s):
        """Value at |x| = s."""
        return np.power(np.asarray(s, dtype=float), self.exponent)

    def power(self, k: float) -> "PowerWeight":
        return PowerWeight(self.exponent * k)

    def __mul__(self, other: "PowerWeight") -> "PowerWeight":
        if not isinstance(other, PowerWeight):
            return NotImplemented
        return PowerWeight(self.exponent + other.exponent)

    def locally_integrable(self, n: int) -> bool:
        return self.exponent > -n

    @property
    def exact(self) -> bool:
        return True

    def to_dict(self) -> dict:
        return {"kind": "power", "exponent": self.exponent}


@dataclass(frozen=True)
class TabulatedWeight:
    """Positive radial weight from samples (|x|, value), log-log interpolated.

    Outside the sampled range the end segments are continued as power laws.
    Results built on tabulated weights are approximate.
    """

    radii: tuple
    values: tuple
    exponent_scale: float = 1.0

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or len(r) < 2:
            raise ValueError("tabulated weight needs matching 1-D radii/values, length >= 2")
        if np.any(r <= 0) or np.any(np.diff(r) <= 0):
            raise ValueError("radii must be positive and strictly increasing")
        if np.any(v <= 0):
            raise ValueError("tabulated weight values must be positive")
        object.__setattr__(self, "radii", tuple(r))
        object.__setattr__(self, "values", tuple(v))

    @property
    def _logs(self):
        return np.log(np.asarray(self.radii)), np.log(np.asarray(self.values))

    def end_slopes(self) -> tuple[float, float]:
        lr, lv = self._logs
        return (lv[1] - lv[0]) / (lr[1] - lr[0]), (lv[-1] - lv[-2]) / (lr[-1] - lr[-2])

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        lr, lv = self._logs
        lo, hi = self.end_slopes()
        with np.errstate(divide="ignore"):
            ls = np.log(s)
        out = np.interp(ls, lr, lv)
        out = np.where(ls < lr[0], lv[0] + lo * (ls - lr[0]), out)
        out = np.where(ls > lr[-1], lv[-1] + hi * (ls - lr[-1]), out)
        return np.exp(self.exponent_scale * out)

    def power(self, k: float) -> "TabulatedWeight":
        return TabulatedWeight(self.radii, self.values, self.exponent_scale * k)

    def locally_integrable(self, n: int) -> bool:
        lo, _ = self.end_slopes()
        return self.exponent_scale * lo > -n

    @property
    def exact(self) -> bool:
        return False

    def to_dict(self) -> dict:
        return {
            "kind": "tabulated",
            "samples": [[r, v] for r, v in zip(self.radii, self.values)],
            "exponent_scale": self.exponent_scale,
        }


Weight = PowerWeight | TabulatedWeight


def weight_from_dict(doc) -> Weight:
    if isinstance(doc, (int, float)):
        return PowerWeight(float(doc))
    kind = doc.get("kind")
    if kind == "power":
        return PowerWeight(float(doc["exponent"]))
    if kind == "tabulated":
        samples = doc["samples"]
        radii = [float(s[0]) for s in samples]
        values = [float(s[1]) for s in samples]
        return TabulatedWeight(tuple(radii), tuple(values), float(doc.get("exponent_scale", 1.0)))
    raise ValueError(f"unknown weight kind {kind!r}")


@dataclass(frozen=True)
class WeightPair:
    """(w, v_1, ..., v_m)."""

    w: Weight
    v: tuple
    meta: dict = field(default_factory=dict, compare=False)

    @classmethod
    def related(cls, v) -> "WeightPair":
        """w = prod v_i (power weights only)."""
        v = tuple(v)
        if not all(isinstance(vi, PowerWeight) for vi in v):
            raise TypeError("related pairs are built from power weights")
        return cls(PowerWeight(math.fsum(vi.exponent for vi in v)), v)

    @property
    def exact(self) -> bool:
        return self.w.exact and all(vi.exact for vi in self.v)

    def to_dict(self) -> dict:
        return {"w": self.w.to_dict(), "v": [vi.to_dict() for vi in self.v]}

    @classmethod
    def from_dict(cls, doc: dict) -> "WeightPair":
        return cls(weight_from_dict(doc["w"]), tuple(weight_from_dict(x) for x in doc["v"]))
