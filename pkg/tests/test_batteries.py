import pytest

from fracweights.batteries import (
    BATTERY_ALIASES,
    default_equivalence_pairs,
    hcal_global_equivalence,
    holder_chain_battery,
    kernel_gap,
    power_ball_bracket,
    run_battery,
)
from fracweights.params import FracParams
from fracweights.power_weights import equivalence_hypotheses
from fracweights.supsearch import GridSpec
from fracweights.weights import PowerWeight, WeightPair


def test_bracket_small():
    res = power_ball_bracket(balls=100)
    assert res.status == "pass", res.failures
    for key, d in res.details.items():
        lo, hi = d["bracket"]
        assert lo * (1 - 1e-12) <= d["min"] <= d["max"] <= hi * (1 + 1e-12)


def test_kernel_gap_small():
    res = kernel_gap(samples=1000, mc_samples=20_000, radii_decades=(-1, 1))
    assert res.status == "pass", res.failures
    assert all(d["min_ratio"] > 0 for k, d in res.details.items() if k.startswith("n="))


def test_holder_small():
    res = holder_chain_battery(balls=100)
    assert res.status == "pass", res.failures


def test_equivalence_small():
    res = hcal_global_equivalence(count=4, grid=GridSpec((-2, 2), (-2, 2), 4))
    assert res.status == "pass", res.failures
    assert len([k for k in res.details if k.startswith("pair")]) == 4


def test_equivalence_pairs_meet_hypotheses():
    for pair, params in default_equivalence_pairs(8):
        ok, why = equivalence_hypotheses(pair, params)
        assert ok, why


def test_equivalence_skips_violating_pairs():
    params = FracParams(1, 1, 0.5, -1.0, (3.0,))
    bad = (WeightPair(PowerWeight(-0.5), (PowerWeight(0.75),)), params)
    res = hcal_global_equivalence(pairs=[bad], grid=GridSpec((-1, 1), (-1, 1), 2))
    assert res.status == "skip" and res.passed
    assert res.details["skipped"]


def test_equivalence_accepts_documents():
    doc = {"params": {"n": 1, "m": 1, "gamma": 0.5, "delta": -1.0, "p_vec": [3]},
           "pair": {"w": {"kind": "power", "exponent": -0.5}, "v": [{"kind": "power", "exponent": 0.75}]}}
    assert hcal_global_equivalence(pairs=[doc], grid={"ppd": 2, "d_range": [-1, 1], "R_range": [-1, 1]}).status == "skip"


def test_run_battery_aliases():
    assert set(BATTERY_ALIASES) == {"5.2", "3.2", "2.1", "holder_1.3"}
    assert run_battery("holder_1.3", balls=20).battery == "holder_chain"
    with pytest.raises(ValueError):
        run_battery("0.0")
