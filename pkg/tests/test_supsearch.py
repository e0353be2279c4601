import math

import pytest
from hypothesis import given, settings, strategies as st

from fracweights.conditions import evaluator, hcal_value
from fracweights.params import Ball, FracParams
from fracweights.power_weights import construct_example_pair
from fracweights.supsearch import (
    GridSpec,
    Tolerances,
    certify_membership,
    estimate_sup,
    predicted_blowup,
    rigidity_probe,
    scaling_exponent,
    triviality_probe,
)
from fracweights.weights import PowerWeight, WeightPair

ONE = PowerWeight(0.0)
SMALL = GridSpec(d_range=(-3, 3), R_range=(-3, 3), ppd=8)


def const_pair(m):
    return WeightPair(ONE, (ONE,) * m)


def flat_functional(delta=0.75):
    params = FracParams(1, 1, 1.25, delta, (2.0,), strict=False)
    return lambda b: hcal_value(const_pair(1), params, b, kernel_scale="radius")


def test_grid_exponents_nest():
    coarse, fine = SMALL.exponents("R"), GridSpec((-3, 3), (-3, 3), 16).exponents("R")
    assert set(coarse) <= set(fine)
    assert coarse[0] == -3 and coarse[-1] == 3 and len(coarse) == 49
    ext = SMALL.extended()
    assert ext.d_range == (-4, 4) and ext.ppd == 16


@pytest.mark.parametrize("kw", [dict(d_range=(0, 0)), dict(R_range=(1.5, 3)), dict(ppd=1)])
def test_grid_rejects_bad_specs(kw):
    with pytest.raises(ValueError):
        GridSpec(**kw)


def test_grid_roundtrip():
    assert GridSpec.from_dict(SMALL.to_dict()) == SMALL


def test_tolerances_validation():
    assert Tolerances().to_dict() == {"stability_bounded": 0.05, "stability_unbounded": 0.5, "slope": 0.01}
    with pytest.raises(ValueError):
        Tolerances(stability_bounded=0.6)
    with pytest.raises(ValueError):
        Tolerances(slope=-1.0)


def test_flat_sup():
    est = estimate_sup(flat_functional(), 1, SMALL)
    assert est.verdict == "bounded"
    assert est.sup_value == pytest.approx(2 ** 1.25, abs=1e-6)
    assert est.stability < 1e-9
    for s in est.slopes.values():
        assert abs(s.exponent) < 1e-6


def test_unbounded_slope():
    est = estimate_sup(flat_functional(0.95), 1, SMALL)
    assert est.verdict == "unbounded"
    assert est.slopes["R->0"].blowup == pytest.approx(0.2, rel=0.05)
    assert est.slopes["R->0"].blowup_ci[0] > 0
    assert any("R->0" in r for r in est.reasons)


def test_infinite_value_is_unbounded():
    params = FracParams(1, 1, 0.5, 0.0, (2.0,))
    pair = WeightPair(ONE, (PowerWeight(-2.0),))
    est = estimate_sup(lambda b: hcal_value(pair, params, b), 1, SMALL)
    assert est.verdict == "unbounded" and est.sup_value == math.inf


def test_recipe_pair_bounded_and_stable():
    params = FracParams(1, 2, 0.5, -2.0, (1.0, 2.0))
    pair = construct_example_pair(params).pair
    fn = evaluator("Hcal", pair, params)
    est = estimate_sup(fn, 1, SMALL)
    assert est.verdict == "bounded"
    wide = estimate_sup(fn, 1, GridSpec((-5, 5), (-5, 5), 8), check_stability=False)
    assert abs(wide.sup_value - est.sup_value) / wide.sup_value < 0.05


def test_determinism():
    params = FracParams(1, 2, 0.5, -2.0, (2.0, 2.0))
    pair = construct_example_pair(params).pair
    a = estimate_sup(evaluator("Hcal", pair, params), 1, SMALL).to_dict()
    b = estimate_sup(evaluator("Hcal", pair, params), 1, SMALL).to_dict()
    assert a == b


@pytest.mark.parametrize("params", [FracParams(1, 2, 0.5, -2.0, (1.0, 2.0)), FracParams(1, 2, 0.5, -2.0, (2.0, 2.0))],
                         ids=["m1=1", "m1=0"])
def test_refinement_monotone(params):
    pair = construct_example_pair(params).pair
    fn = evaluator("Hcal", pair, params)
    coarse = estimate_sup(fn, 1, GridSpec((-3, 3), (-3, 3), 4))
    fine = estimate_sup(fn, 1, GridSpec((-3, 3), (-3, 3), 8))
    assert fine.sup_value >= coarse.sup_value * (1 - 1e-9)
    assert {coarse.verdict, fine.verdict} != {"bounded", "unbounded"}


@settings(max_examples=25)
@given(d=st.floats(0.0, 50.0), R=st.floats(1e-3, 50.0), lam=st.floats(1e-3, 1e3),
       b1=st.floats(-0.3, 0.3), b2=st.floats(-0.3, 0.3))
def test_scale_covariance_related(d, R, lam, b1, b2):
    params = FracParams(1, 2, 1.5, 0.2, (1.5, 1.5), strict=False)
    pair = WeightPair.related((PowerWeight(b1), PowerWeight(b2)))
    fn = evaluator("related_weights", pair, params)
    e = scaling_exponent(pair, params, "related_weights")
    assert e == pytest.approx(params.gap - params.delta)
    assert fn(Ball((lam * d,), lam * R)).value == pytest.approx(lam ** e * fn(Ball((d,), R)).value, rel=1e-9)


def test_scaling_exponent_requires_power_weights():
    from fracweights.weights import TabulatedWeight
    tab = TabulatedWeight((1.0, 2.0), (1.0, 2.0))
    with pytest.raises(TypeError):
        scaling_exponent(WeightPair(tab, (ONE,)), FracParams(1, 1, 0.5, 0.0, (2.0,)))


# ---------------------------------------------------------------------------
# certificates


def test_certify_recipe_member():
    params = FracParams(1, 2, 0.5, -2.0, (1.0, 2.0))
    cert = certify_membership(construct_example_pair(params).pair, params, grid=SMALL)
    assert cert.membership == "member" and cert.exit_code == 0
    doc = cert.to_dict()
    assert doc["region"] == "admissible" and doc["estimate"]["verdict"] == "bounded"
    assert set(doc["hypotheses"]) == {"rh_infty_I1", "doubling_I2", "rh_m_I2", "equivalence_hypotheses"}


def test_certify_constant_trivial_nonmember():
    params = FracParams(1, 1, 1.25, 1.1, (2.0,), strict=False)
    cert = certify_membership(const_pair(1), params, grid=SMALL)
    assert cert.membership == "non-member" and cert.exit_code == 1
    assert cert.estimate.slopes["R->0"].blowup == pytest.approx(0.35, rel=0.05)


def test_certify_single_weight_flat():
    params = FracParams(1, 1, 0.75, 0.25, (2.0,))
    cert = certify_membership(const_pair(1), params, grid=SMALL)
    assert cert.membership == "member"
    # (2R)^{3/4} * (2 int_0^inf (2R + t)^{-5/2} dt)^{1/2}
    assert cert.estimate.sup_value == pytest.approx(math.sqrt(4 / 3), rel=1e-9)


def test_certify_rejects_nonintegrable_w():
    with pytest.raises(ValueError):
        certify_membership(WeightPair(PowerWeight(1.5), (ONE,)), FracParams(1, 1, 0.5, 0.0, (2.0,)), grid=SMALL)


def test_custom_tolerance_reaches_verdict():
    # a huge slope tolerance hides the divergence from the slope test; the
    # grid extension still moves the sup, so the verdict is never "bounded"
    est = estimate_sup(flat_functional(0.95), 1, SMALL, tol=Tolerances(slope=10.0))
    assert est.verdict in ("unbounded", "inconclusive")
    assert est.stability > 0.05


# ---------------------------------------------------------------------------
# probes


def test_predicted_blowup_constant():
    params = FracParams(1, 1, 1.25, 0.95, (2.0,), strict=False)
    # delta - 1 + (theta - n/p') with theta = 0.75
    assert predicted_blowup(const_pair(1), params) == pytest.approx(0.95 - 1 + 0.75 - 0.5)


@pytest.mark.parametrize("shift", [0.1, 0.2, 0.5])
def test_triviality_probe_matches_rate(shift):
    params = FracParams(1, 2, 1.0, 0.5 + shift, (4.0, 4.0), strict=False)
    rep = triviality_probe(const_pair(2), params)
    assert rep.case == "delta > gamma - n/p"
    assert rep.fitted == pytest.approx(shift, rel=0.05) and rep.diverges


def test_triviality_probe_above_one():
    # gamma - n/p = 1.25 > delta = 1.1 > 1; v_1 = |x|^{0.4} keeps the tail integrable
    params = FracParams(1, 1, 1.75, 1.1, (2.0,), strict=False)
    rep = triviality_probe(WeightPair(ONE, (PowerWeight(0.4),)), params)
    assert rep.case == "delta > 1" and rep.diverges
    assert rep.predicted == pytest.approx(0.1)
    assert rep.fitted == pytest.approx(rep.predicted, rel=0.05)


def test_triviality_probe_admissible_flat():
    params = FracParams(1, 2, 1.0, 0.5, (4.0, 4.0))
    rep = triviality_probe(const_pair(2), params)
    assert rep.case == "admissible" and rep.flat and not rep.diverges


def test_rigidity_flat_and_shifted():
    v = (PowerWeight(0.1), PowerWeight(0.2))
    gap = 1.5 - 2 / 1.5
    base = FracParams(1, 2, 1.5, gap, (1.5, 1.5), strict=False)
    flat = rigidity_probe(v, base, n_balls=200)
    assert flat.flat and flat.variation < 1e-9
    assert flat.alpha == pytest.approx(1.5) and flat.rh_alpha_bounded and flat.holder_violations == 0
    shifted = rigidity_probe(v, FracParams(1, 2, 1.5, gap + 0.1, (1.5, 1.5), strict=False), n_balls=200)
    assert not shifted.flat
    assert shifted.fitted_blowup == pytest.approx(0.1, rel=0.05)
