"""Scenario documents for the command line: load, validate, fill defaults.

A scenario is a JSON or YAML mapping.  ``Scenario.resolved()`` returns the
same document with every default written out, which is what reports embed;
loading a report (anything with a ``config`` key) gives back the scenario.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .conditions import CONDITION_ALIASES, CONDITION_IDS, KERNEL_SCALES
from .operators import GridFunction
from .params import FracParams
from .power_weights import construct_example_pair
from .supsearch import GridSpec, Tolerances
from .weights import WeightPair

TASKS = ("membership", "region-map", "lemma-check", "operator-eval", "boundedness")
QUANTITIES = ("I", "J", "aB", "local")


class ConfigError(ValueError):
    """Malformed or inconsistent scenario document."""


def _only(doc: dict, allowed, where: str):
    extra = set(doc) - set(allowed)
    if extra:
        raise ConfigError(f"unknown keys in {where}: {sorted(extra)}")


def _finite_or_str(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


@dataclass(frozen=True)
class RegionSpec:
    """Rasterized parameter plane: x = 1/p in [0, m], delta downward from 1.5."""

    n: int = 1
    m: int = 2
    gammas: tuple = (0.5, 1.0, 1.5)
    resolution: int = 100
    delta_top: float = 1.5
    overlay: int = 0  # sample points per axis for empirical verdicts, 0 = off

    @property
    def delta_step(self) -> float:
        # 0.05 for mn <= 2, coarser for larger mn so the raster reaches below gamma - mn
        return 0.05 * math.ceil((self.m * self.n + 2.5) / 4.95)

    def to_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "gammas": list(self.gammas), "resolution": self.resolution,
                "delta_top": self.delta_top, "overlay": self.overlay}

    @classmethod
    def from_dict(cls, doc: dict) -> "RegionSpec":
        _only(doc, ("n", "m", "gammas", "resolution", "delta_top", "overlay"), "region")
        spec = cls(int(doc.get("n", 1)), int(doc.get("m", 2)),
                   tuple(float(g) for g in doc.get("gammas", (0.5, 1.0, 1.5))),
                   int(doc.get("resolution", 100)), float(doc.get("delta_top", 1.5)),
                   int(doc.get("overlay", 0)))
        if spec.n < 1 or spec.m < 1 or spec.resolution < 2 or not spec.gammas:
            raise ConfigError("region needs n, m >= 1, resolution >= 2 and at least one gamma")
        return spec


@dataclass(frozen=True)
class BatterySpec:
    id: str = "5.2"
    options: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"id": self.id, "options": dict(self.options)}

    @classmethod
    def from_dict(cls, doc: dict) -> "BatterySpec":
        _only(doc, ("id", "options"), "lemma")
        return cls(str(doc.get("id", "5.2")), dict(doc.get("options") or {}))


def _functions_from(doc) -> tuple:
    if not isinstance(doc, (list, tuple)) or not doc:
        raise ConfigError("functions must be a non-empty list")
    return tuple(GridFunction.from_dict(f) for f in doc)


@dataclass(frozen=True)
class OperatorSpec:
    functions: tuple = ()
    points: tuple = ()
    quantity: str = "I"
    ball: tuple | None = None  # (center, radius) for aB / local
    order: int | None = None
    levels: int = 48

    def to_dict(self) -> dict:
        return {
            "functions": [f.to_dict() for f in self.functions],
            "points": [list(p) for p in self.points],
            "quantity": self.quantity,
            "ball": None if self.ball is None else {"center": list(self.ball[0]), "radius": self.ball[1]},
            "order": self.order,
            "levels": self.levels,
        }

    @classmethod
    def from_dict(cls, doc: dict, n: int) -> "OperatorSpec":
        _only(doc, ("functions", "points", "quantity", "ball", "order", "levels"), "operator")
        q = doc.get("quantity", "I")
        if q not in QUANTITIES:
            raise ConfigError(f"operator.quantity must be one of {QUANTITIES}")
        points = tuple(tuple(float(c) for c in np.atleast_1d(p)) for p in doc.get("points", [[0.0] * n]))
        ball = doc.get("ball")
        if ball is not None:
            ball = (tuple(float(c) for c in np.atleast_1d(ball["center"])), float(ball["radius"]))
        elif q in ("aB", "local"):
            raise ConfigError(f"operator.quantity {q} needs operator.ball")
        order = doc.get("order")
        return cls(_functions_from(doc.get("functions")), points, q, ball,
                   None if order is None else int(order), int(doc.get("levels", 48)))


@dataclass(frozen=True)
class BoundednessSpec:
    """Test functions (explicit, or random piecewise constant) and a ball family."""

    functions: tuple | None = None
    samples: int = 5
    box: tuple = ((-1.0, 1.0),)
    cells: int = 8
    centers: tuple = (0.0, 0.5)
    decades: tuple = (-3, 1)
    per_decade: int = 2
    variant: str = "L"
    panels: int = 4
    order: int = 6
    spread_tol: float = 10.0

    def to_dict(self) -> dict:
        return {
            "functions": None if self.functions is None else [[f.to_dict() for f in fv] for fv in self.functions],
            "samples": self.samples,
            "box": [list(b) for b in self.box],
            "cells": self.cells,
            "centers": list(self.centers),
            "decades": list(self.decades),
            "per_decade": self.per_decade,
            "variant": self.variant,
            "panels": self.panels,
            "order": self.order,
            "spread_tol": self.spread_tol,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "BoundednessSpec":
        keys = ("functions", "samples", "box", "cells", "centers", "decades", "per_decade", "variant",
                "panels", "order", "spread_tol")
        _only(doc, keys, "boundedness")
        fns = doc.get("functions")
        if fns is not None:
            fns = tuple(_functions_from(fv) for fv in fns)
        variant = doc.get("variant", "L")
        if variant not in ("L", "LL"):
            raise ConfigError("boundedness.variant must be L or LL")
        dec = tuple(int(d) for d in doc.get("decades", (-3, 1)))
        if len(dec) != 2 or not dec[0] < dec[1]:
            raise ConfigError("boundedness.decades must be an increasing pair")
        return cls(fns, int(doc.get("samples", 5)), tuple(tuple(float(c) for c in b) for b in doc.get("box", [[-1, 1]])),
                   int(doc.get("cells", 8)), tuple(float(c) for c in doc.get("centers", (0.0, 0.5))), dec,
                   int(doc.get("per_decade", 2)), variant, int(doc.get("panels", 4)), int(doc.get("order", 6)),
                   float(doc.get("spread_tol", 10.0)))

    def function_sets(self, m: int, seed: int) -> list:
        if self.functions is not None:
            return [list(fv) for fv in self.functions]
        rng = np.random.default_rng(seed)
        return [[GridFunction.random_piecewise(rng, self.box, self.cells) for _ in range(m)]
                for _ in range(self.samples)]


@dataclass(frozen=True)
class Scenario:
    task: str
    params: FracParams | None = None
    pair: object = None  # "recipe", {"recipe": {...}} or {"w": ..., "v": [...]}
    condition: str = "Hcal"
    kernel_scale: str = "volume"
    grid: GridSpec = field(default_factory=GridSpec)
    tolerances: Tolerances = field(default_factory=Tolerances)
    seed: int = 0
    region: RegionSpec = field(default_factory=RegionSpec)
    lemma: BatterySpec = field(default_factory=BatterySpec)
    operator: OperatorSpec | None = None
    boundedness: BoundednessSpec = field(default_factory=BoundednessSpec)

    def __post_init__(self):
        if self.task not in TASKS:
            raise ConfigError(f"task must be one of {TASKS}, got {self.task!r}")
        if self.condition not in CONDITION_IDS:
            raise ConfigError(f"condition must be one of {CONDITION_IDS}")
        if self.kernel_scale not in KERNEL_SCALES:
            raise ConfigError(f"kernel_scale must be one of {KERNEL_SCALES}")
        needs_params = self.task in ("membership", "operator-eval", "boundedness")
        if needs_params and self.params is None:
            raise ConfigError(f"task {self.task} needs params")
        if self.task in ("membership", "boundedness") and self.pair is None:
            raise ConfigError(f"task {self.task} needs a pair (or \"recipe\")")
        if self.task == "operator-eval" and self.operator is None:
            raise ConfigError("task operator-eval needs an operator section")

    def weight_pair(self) -> tuple[WeightPair, dict]:
        """The pair and, for the recipe, the constructed exponents."""
        if self.pair is None:
            raise ConfigError("scenario has no pair")
        if self.pair == "recipe" or (isinstance(self.pair, dict) and "recipe" in self.pair):
            opts = {} if self.pair == "recipe" else dict(self.pair["recipe"] or {})
            _only(opts, ("positions", "position_I1"), "pair.recipe")
            ex = construct_example_pair(self.params, opts.get("positions"), float(opts.get("position_I1", 0.5)))
            return ex.pair, ex.to_dict()
        if not isinstance(self.pair, dict):
            raise ConfigError("pair must be \"recipe\" or a mapping with w and v")
        _only(self.pair, ("w", "v"), "pair")
        pair = WeightPair.from_dict(self.pair)
        if self.params is not None and len(pair.v) != self.params.m:
            raise ConfigError(f"pair has {len(pair.v)} weights v_i, expected m={self.params.m}")
        return pair, {}

    def evaluator_kwargs(self) -> dict:
        return {"kernel_scale": self.kernel_scale} if self.condition in ("Hcal", "Hbb", "related_weights") else {}

    def resolved(self) -> dict:
        """Every field written out, defaults included; JSON-serializable."""
        pair = self.pair
        if isinstance(pair, dict) and "recipe" not in pair:
            pair = self.weight_pair()[0].to_dict()
        return {
            "task": self.task,
            "params": None if self.params is None else self.params.to_dict(),
            "pair": pair,
            "condition": self.condition,
            "kernel_scale": self.kernel_scale,
            "grid": self.grid.to_dict(),
            "tolerances": self.tolerances.to_dict(),
            "seed": self.seed,
            "region": self.region.to_dict(),
            "lemma": self.lemma.to_dict(),
            "operator": None if self.operator is None else self.operator.to_dict(),
            "boundedness": self.boundedness.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: dict, task: str | None = None) -> "Scenario":
        if not isinstance(doc, dict):
            raise ConfigError("scenario must be a mapping")
        if "config" in doc and isinstance(doc["config"], dict):
            doc = doc["config"]
        keys = ("task", "params", "pair", "condition", "kernel_scale", "grid", "tolerances", "seed",
                "region", "lemma", "operator", "boundedness")
        _only(doc, keys, "scenario")
        task = task or doc.get("task")
        if task is None:
            raise ConfigError("scenario has no task")
        if doc.get("task") not in (None, task):
            raise ConfigError(f"config is for task {doc['task']!r}, not {task!r}")
        try:
            params = FracParams.from_dict(doc["params"]) if doc.get("params") is not None else None
            tol = doc.get("tolerances") or {}
            _only(tol, ("stability_bounded", "stability_unbounded", "slope"), "tolerances")
            grid = doc.get("grid") or {}
            _only(grid, ("d_range", "R_range", "points_per_decade", "ppd", "refine_passes", "include_axis"), "grid")
            n = params.n if params else 1
            return cls(
                task=task,
                params=params,
                pair=doc.get("pair"),
                condition=CONDITION_ALIASES.get(doc.get("condition", "Hcal"), doc.get("condition", "Hcal")),
                kernel_scale=doc.get("kernel_scale", "volume"),
                grid=GridSpec.from_dict(grid),
                tolerances=Tolerances(**{k: float(v) for k, v in tol.items()}),
                seed=int(doc.get("seed", 0)),
                region=RegionSpec.from_dict(doc.get("region") or {}),
                lemma=BatterySpec.from_dict(doc.get("lemma") or {}),
                operator=OperatorSpec.from_dict(doc["operator"], n) if doc.get("operator") else None,
                boundedness=BoundednessSpec.from_dict(doc.get("boundedness") or {}),
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid scenario: {exc}") from exc


def read_document(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        if path.suffix.lower() == ".json":
            doc = json.loads(text)
        else:
            doc = yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path} does not contain a mapping")
    return doc


def load_scenario(path, task: str | None = None) -> Scenario:
    return Scenario.from_dict(read_document(path), task)


def dumps(doc) -> str:
    """Deterministic JSON (sorted keys, repr floats, inf/nan as strings)."""
    return json.dumps(_clean(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        x = x.item()
    if isinstance(x, float):
        return _finite_or_str(x)
    return x
