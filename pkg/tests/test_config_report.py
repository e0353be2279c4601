import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracweights.config import ConfigError, RegionSpec, Scenario, dumps, load_scenario
from fracweights.report import REGION_COLUMNS, csv_text, loglog_svg, read_csv, region_rows, region_svg, write_csv

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.yaml")), ids=lambda p: p.stem)
def test_shipped_configs_load(path):
    sc = load_scenario(path)
    again = Scenario.from_dict(json.loads(dumps(sc.resolved())))
    assert again.resolved() == sc.resolved()


def test_scenario_rejects_unknown_sections():
    with pytest.raises(ConfigError):
        Scenario.from_dict({"task": "membership", "params": {"n": 1, "m": 1, "gamma": 0.5, "delta": 0, "p_vec": [2]},
                            "pair": "recipe", "grid": {"ppd": 8, "colour": "red"}})
    with pytest.raises(ConfigError):
        Scenario.from_dict({"task": "membership", "pair": "recipe"})
    with pytest.raises(ConfigError):
        Scenario.from_dict({"task": "dance"})


def test_recipe_pair_options():
    sc = Scenario.from_dict({"task": "membership", "pair": {"recipe": {"positions": [0.3, 0.6]}},
                             "params": {"n": 1, "m": 2, "gamma": 0.5, "delta": -2.0, "p_vec": [2, 2]}})
    pair, recipe = sc.weight_pair()
    assert len(pair.v) == 2 and recipe
    with pytest.raises(ConfigError):
        Scenario.from_dict({"task": "membership", "pair": {"recipe": {"spot": 1}},
                            "params": {"n": 1, "m": 2, "gamma": 0.5, "delta": -2.0, "p_vec": [2, 2]}}).weight_pair()


def test_dumps_deterministic_and_strict():
    doc = {"b": math.inf, "a": [np.float64(1.5), np.int64(2), -math.inf], "c": {"z": 1, "y": math.nan}}
    text = dumps(doc)
    assert text == dumps(dict(reversed(list(doc.items()))))
    back = json.loads(text)
    assert back["b"] == "inf" and back["a"] == [1.5, 2, "-inf"] and back["c"]["y"] == "nan"


def test_region_spec_step():
    assert RegionSpec().delta_step == pytest.approx(0.05)
    assert RegionSpec(n=2, m=3).delta_step == pytest.approx(0.10)
    with pytest.raises(ConfigError):
        RegionSpec.from_dict({"resolution": 1})


@given(values=st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=20))
def test_csv_float_roundtrip(values):
    rows = [{"x": v} for v in values]
    text = csv_text(rows, ("x",))
    parsed = [float(line) for line in text.splitlines()[1:]]
    assert parsed == values


def test_region_rows_and_svg(tmp_path):
    spec = RegionSpec(resolution=20)
    rows = region_rows(spec)
    assert len(rows) == 3 * 20 * 20
    path = write_csv(tmp_path / "r.csv", rows, REGION_COLUMNS)
    back = read_csv(path)
    assert [r["region"] for r in back] == [r["region"] for r in rows]
    overlay = [{"gamma": 1.0, "inv_p": 0.5, "delta": 0.0, "verdict": "bounded"}]
    svg = region_svg(back, overlay)
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert "<title>bounded</title>" in svg
    assert svg == region_svg(back, overlay)


def test_loglog_svg_drops_bad_points():
    svg = loglog_svg({"a": ([1, 10, 100], [1, 0, math.inf]), "b": ([1, 10], [2, 20])}, title="t")
    assert svg.count("<polyline") == 2
    assert "b</text>" in svg
    assert loglog_svg({"empty": ([0], [0])}).count("<polyline") == 0
