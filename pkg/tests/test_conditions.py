import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracweights.conditions import (
    evaluator,
    global_condition_value,
    global_factor,
    h_factor,
    hbb_value,
    hcal_value,
    holder_chain,
    local_condition_value,
    mixed_condition_value,
    mixed_partitions,
    related_weights_value,
    winv_ball,
)
from fracweights.params import Ball, FracParams
from fracweights.power_weights import construct_example_pair
from fracweights.radial import DivergentIntegral
from fracweights.supsearch import scaling_exponent
from fracweights.weights import PowerWeight, TabulatedWeight, WeightPair

from oracles import kernel_tail_1d

ONE = PowerWeight(0.0)
FLAT = FracParams(1, 1, 1.25, 0.75, (2.0,), strict=False)


def const_pair(m):
    return WeightPair(ONE, (ONE,) * m)


# ---------------------------------------------------------------------------
# building blocks


def test_winv_constant():
    assert winv_ball(ONE, Ball((0.0,), 3.0)) == pytest.approx(6.0, rel=1e-14)


def test_winv_log_divergence():
    with pytest.raises(DivergentIntegral):
        winv_ball(PowerWeight(1.0), Ball((0.0,), 1.0))


def test_winv_inverse_sqrt():
    # 2 * int_0^1 y^{1/2} dy
    assert winv_ball(PowerWeight(-0.5), Ball((0.0,), 1.0)) == pytest.approx(4 / 3, rel=1e-13)


@pytest.mark.parametrize("R", [1e-3, 0.5, 1.0, 40.0])
def test_h_factor_constant_tail(R):
    val = h_factor(ONE, 2.0, 0.75, Ball((0.3,), R), kernel_scale="radius")
    assert val == pytest.approx(math.sqrt(kernel_tail_1d(R, 1.5)), rel=1e-10)
    assert val == pytest.approx(2 * R ** -0.25, rel=1e-10)


def test_h_factor_volume_scale_uses_diameter():
    R = 0.7
    val = h_factor(ONE, 2.0, 0.75, Ball((0.0,), R))
    assert val == pytest.approx(math.sqrt(kernel_tail_1d(R, 1.5, rho=2 * R)), rel=1e-10)


def test_h_factor_harmonic_tail_is_infinite():
    assert h_factor(ONE, 2.0, 0.5, Ball((0.0,), 1.0)) == math.inf
    with pytest.raises(DivergentIntegral):
        h_factor(ONE, 2.0, 0.5, Ball((0.0,), 1.0), strict=True)


def test_h_factor_plane_closed_form():
    # int_{R^2} (1 + |y|)^{-3} dy = 2 pi / ((s - 1)(s - 2)) with s = 3
    val = h_factor(ONE, 2.0, 1.5, Ball((0.4, -0.2), 1.0), kernel_scale="radius")
    assert val == pytest.approx(math.sqrt(math.pi), rel=1e-10)


def _dense_sup(beta, theta, d, R):
    """sup_y |y|^beta / (R + |d - y|)^theta on a dense grid over [-2^16 R, 2^16 R]."""
    span = np.concatenate([-np.geomspace(2 ** 16 * R, 1e-9 * R, 200_000), [0.0],
                           np.geomspace(1e-9 * R, 2 ** 16 * R, 200_000), np.linspace(d - 2 * R, d + 2 * R, 200_001)])
    vals = np.abs(span) ** beta / (R + np.abs(d - span)) ** theta
    return vals.max()


@pytest.mark.parametrize("beta, theta, d, R", [
    (0.3, 0.75, 1.0, 1.0), (0.5, 0.9, 0.0, 2.0), (0.2, 1.5, 5.0, 0.1), (0.6, 0.6, 3.0, 1.0)])
def test_h_factor_ess_sup_against_grid(beta, theta, d, R):
    # v = |x|^{-beta}: v^{-1} grows, the quotient decays once theta >= beta
    val = h_factor(PowerWeight(-beta), 1.0, theta, Ball((d,), R), kernel_scale="radius")
    assert val == pytest.approx(_dense_sup(beta, theta, d, R), rel=1e-6)
    # at least the quotient at y = x_B
    assert val >= (d ** beta if d > 0 else 0.0) * R ** -theta * (1 - 1e-12)


def test_h_factor_ess_sup_unbounded_cases():
    # v^{-1} = |y|^{-beta} is unbounded at the origin
    assert h_factor(PowerWeight(0.5), 1.0, 0.75, Ball((1.0,), 1.0)) == math.inf
    # v^{-1} grows faster than the kernel decays
    assert h_factor(PowerWeight(-1.0), 1.0, 0.5, Ball((1.0,), 1.0)) == math.inf


@pytest.mark.parametrize("R", [0.2, 1.0, 7.0])
def test_global_factor_constant_tails(R):
    b = Ball((0.0,), R)
    val, reason = global_factor(ONE, 2.0, 0.75, b)
    assert reason == ""
    # 2 int_R^inf t^{-3/2} dt = 4 R^{-1/2}
    assert val == pytest.approx(math.sqrt(4 * R ** -0.5), rel=1e-10)
    sup, _ = global_factor(ONE, 1.0, 0.75, b)
    assert sup == pytest.approx(R ** -0.75, rel=1e-12)


def test_tabulated_factor_matches_power():
    s = np.geomspace(1e-6, 1e6, 400)
    tab = TabulatedWeight(tuple(s), tuple(s ** -0.3))
    b = Ball((1.5,), 0.8)
    exact = h_factor(PowerWeight(-0.3), 2.0, 1.0, b)
    assert h_factor(tab, 2.0, 1.0, b) == pytest.approx(exact, rel=1e-4)


# ---------------------------------------------------------------------------
# whole-space functional


@pytest.mark.parametrize("d, R", [(0.0, 1.0), (3.0, 0.01), (1e4, 20.0), (0.5, 1e-5)])
def test_hcal_flat_constant(d, R):
    val = hcal_value(const_pair(1), FLAT, Ball((d,), R), kernel_scale="radius")
    assert val.value == pytest.approx(2 ** 1.25, rel=1e-10)
    # the volume convention rescales by (2)^{-1/4}
    vol = hcal_value(const_pair(1), FLAT, Ball((d,), R))
    assert vol.value == pytest.approx(2.0, rel=1e-10)


def test_hcal_constant_growth_below_line():
    params = FracParams(1, 1, 1.25, 0.95, (2.0,), strict=False)
    Rs = np.geomspace(1e-4, 1.0, 9)
    vals = [hcal_value(const_pair(1), params, Ball((0.0,), R), kernel_scale="radius").value for R in Rs]
    slope = np.polyfit(np.log(Rs), np.log(vals), 1)[0]
    assert slope == pytest.approx(-0.2, abs=1e-10)


def test_recompose_recipe_pair():
    params = FracParams(1, 2, 0.5, -2.0, (1.0, 2.0))
    pair = construct_example_pair(params).pair
    for d, R in [(0.0, 1.0), (2.0, 0.3), (0.1, 50.0)]:
        val = hcal_value(pair, params, Ball((d,), R))
        assert val.recompose() == pytest.approx(val.value, rel=1e-12)
        assert len(val.factors) == 2


def test_infinite_factor_carries_reason():
    params = FracParams(1, 1, 0.5, 0.0, (2.0,))
    pair = WeightPair(ONE, (PowerWeight(-2.0),))
    val = hcal_value(pair, params, Ball((1.0,), 1.0))
    assert val.value == math.inf and not val.finite
    assert val.reasons and val.reasons[0].startswith("factor 1")


def test_csv_row_fields():
    row = hcal_value(const_pair(1), FLAT, Ball((1.0,), 2.0)).csv_row()
    assert set(row) == {"condition_id", "x_B_norm", "R", "value", "factor_breakdown"}
    assert row["condition_id"] == "Hcal" and float(row["R"]) == 2.0
    assert row["factor_breakdown"].startswith("prefactor=")


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        hcal_value(const_pair(1), FLAT, Ball((0.0, 0.0), 1.0))
    with pytest.raises(ValueError):
        hcal_value(const_pair(2), FLAT, Ball((0.0,), 1.0))


@pytest.mark.parametrize("d, R", [(0.0, 1.0), (2.0, 0.5), (0.3, 30.0)])
def test_dyadic_depth_converged(d, R):
    params = FracParams(1, 2, 0.5, -2.0, (2.0, 2.0))
    pair = construct_example_pair(params).pair
    b = Ball((d,), R)
    base = hcal_value(pair, params, b, min_annuli=16)
    deep = hcal_value(pair, params, b, min_annuli=32)
    for f0, f1 in zip(base.factors, deep.factors):
        assert f1 == pytest.approx(f0, rel=1e-8)


def test_radial_reduction_in_the_plane():
    params = FracParams(2, 2, 2.0, -1.0, (2.0, 3.0))
    pair = WeightPair(PowerWeight(0.5), (PowerWeight(0.2), PowerWeight(-0.1)))
    ref = hcal_value(pair, params, Ball((1.3, 0.0), 0.6)).value
    for phi in (0.4, 2.0, 4.5):
        c = (1.3 * math.cos(phi), 1.3 * math.sin(phi))
        assert hcal_value(pair, params, Ball(c, 0.6)).value == pytest.approx(ref, rel=1e-12)


# ---------------------------------------------------------------------------
# bounded-weight variant


def test_hbb_equals_hcal_for_constant_w():
    params = FracParams(1, 2, 0.5, -2.0, (2.0, 2.0))
    pair = WeightPair(ONE, (PowerWeight(0.2), PowerWeight(-0.3)))
    for d, R in [(0.0, 1.0), (1.0, 0.1)]:
        b = Ball((d,), R)
        assert hbb_value(pair, params, b).value == pytest.approx(hcal_value(pair, params, b).value, rel=1e-12)


def test_hbb_infinite_for_negative_power_w():
    params = FracParams(1, 1, 0.5, -1.0, (2.0,))
    pair = WeightPair(PowerWeight(-0.5), (ONE,))
    assert hbb_value(pair, params, Ball((0.0,), 1.0)).value == math.inf


@given(a=st.floats(-0.9, 0.95), b1=st.floats(-0.3, 0.3), b2=st.floats(-0.3, 0.3),
       d=st.floats(0.0, 5.0), R=st.floats(0.05, 5.0))
def test_hcal_below_hbb(a, b1, b2, d, R):
    params = FracParams(1, 2, 0.5, -2.0, (2.0, 3.0))
    pair = WeightPair(PowerWeight(a), (PowerWeight(b1), PowerWeight(b2)))
    b = Ball((d,), R)
    h, hb = hcal_value(pair, params, b).value, hbb_value(pair, params, b).value
    assert h <= hb * (1 + 1e-10)


# ---------------------------------------------------------------------------
# local, global and mixed conditions


@pytest.mark.parametrize("d, R", [(0.0, 1.0), (4.0, 0.02), (0.3, 300.0)])
def test_local_constant_is_one(d, R):
    params = FracParams(1, 1, 1.25, 0.75, (2.0,), strict=False)
    assert local_condition_value(const_pair(1), params, Ball((d,), R)).value == pytest.approx(1.0, rel=1e-12)


def test_local_constant_slope():
    params = FracParams(1, 1, 1.25, 1.05, (2.0,), strict=False)
    Rs = np.geomspace(1e-3, 1e3, 7)
    vals = [local_condition_value(const_pair(1), params, Ball((0.0,), R)).value for R in Rs]
    assert np.polyfit(np.log(Rs), np.log(vals), 1)[0] == pytest.approx(-0.3, abs=1e-10)


def _sweep(n=1):
    ts = np.concatenate([[0.0], np.geomspace(1e-4, 1e4, 41)])
    return [Ball.radial(t, 1.0, n) for t in ts]


RECIPE_SETS = [FracParams(1, 2, 0.5, -2.0, (1.0, 2.0)), FracParams(1, 2, 0.5, -2.0, (2.0, 2.0)),
               FracParams(1, 3, 1.0, -2.5, (1.0, 2.0, 4.0))]


@pytest.mark.parametrize("params", RECIPE_SETS, ids=lambda p: f"p={p.p_vec}")
def test_local_global_mixed_dominated_by_hcal(params):
    """On homogeneous pairs every ratio to the whole-space value depends only on
    |x_B|/R, so a bounded ratio over a wide t-sweep is the domination."""
    pair = construct_example_pair(params).pair
    balls = _sweep()
    h = np.array([hcal_value(pair, params, b).value for b in balls])
    loc = np.array([local_condition_value(pair, params, b).value for b in balls])
    glo = np.array([global_condition_value(pair, params, b).value for b in balls])
    assert np.all(np.isfinite(h)) and np.all(loc / h < 10) and np.all(glo / h < 20)
    # tail behaviour: ratios settle as t -> infinity
    assert abs(loc[-1] / h[-1] - loc[-2] / h[-2]) < 1e-2 * loc[-1] / h[-1]
    for part in mixed_partitions(params):
        mix = np.array([mixed_condition_value(pair, params, b, annulus_set=part).value for b in balls])
        assert np.all(mix / h < 10), part


def test_mixed_constant_closed_form():
    params = FracParams(1, 2, 1.0, -0.5, (1.0, 4.0))
    for R in (0.1, 1.0, 10.0):
        b = Ball((2.0,), R)
        # |B|^{1 + (gamma - delta)/n - 1/p} / |B| with constant weights
        expo = (params.gamma - params.delta) - params.inv_p
        val = mixed_condition_value(const_pair(2), params, b)
        assert val.value == pytest.approx((2 * R) ** expo, rel=1e-12)


def test_mixed_partitions_enumerate_subsets():
    assert list(mixed_partitions(FracParams(1, 2, 0.5, -2.0, (2.0, 2.0)))) == [()]
    parts = list(mixed_partitions(FracParams(1, 3, 1.0, -2.5, (1.0, 1.0, 4.0))))
    assert len(parts) == 4 and () in parts and (0, 1) in parts
    with pytest.raises(ValueError):
        mixed_condition_value(const_pair(2), FracParams(1, 2, 0.5, -2.0, (2.0, 2.0)), Ball((0.0,), 1.0),
                              annulus_set=(0,))


def test_mixed_annulus_uses_ring():
    params = FracParams(1, 1, 0.5, -1.0, (1.0,))
    # v^{-1} = |y|^{-1/2} is unbounded on B(0,1) but bounded on the ring 1 <= |y| < 2
    pair = WeightPair(ONE, (PowerWeight(0.5),))
    b = Ball((0.0,), 1.0)
    assert mixed_condition_value(pair, params, b).value == math.inf
    assert math.isfinite(mixed_condition_value(pair, params, b, annulus_set=(0,)).value)


# ---------------------------------------------------------------------------
# related weights


def test_related_weights_constant_flat():
    params = FracParams(1, 2, 1.5, 0.5, (2.0, 2.0), strict=False)
    vals = [related_weights_value((ONE, ONE), params, b).value for b in _sweep()]
    assert max(vals) == pytest.approx(min(vals), rel=1e-10)


def test_related_weights_shift_slope():
    params = FracParams(1, 2, 1.5, 0.6, (2.0, 2.0), strict=False)
    Rs = np.geomspace(1e-3, 1e3, 7)
    vals = [related_weights_value((PowerWeight(0.1), PowerWeight(0.2)), params, Ball((0.0,), R)).value for R in Rs]
    assert np.polyfit(np.log(Rs), np.log(vals), 1)[0] == pytest.approx(-0.1, abs=1e-8)


@given(b1=st.floats(-0.4, 0.4), b2=st.floats(-0.4, 0.4), d=st.floats(0.0, 100.0),
       R=st.floats(1e-3, 1e3), p2=st.sampled_from([1.0, 1.5, 2.0, 4.0]))
def test_holder_chain(b1, b2, d, R, p2):
    params = FracParams(1, 2, 1.5, 0.0, (1.5, p2), strict=False)
    lhs, rhs = holder_chain((PowerWeight(b1), PowerWeight(b2)), params, Ball((d,), R))
    assert lhs <= rhs * (1 + 1e-9) or rhs == math.inf


# ---------------------------------------------------------------------------
# homogeneity


CONDITIONS = ("Hcal", "Hbb", "local", "global", "mixed")


@given(cid=st.sampled_from(CONDITIONS), a=st.floats(0.0, 0.95), b1=st.floats(-0.3, 0.3), b2=st.floats(-0.3, 0.3),
       d=st.floats(0.0, 10.0), R=st.floats(0.01, 10.0), lam=st.floats(0.01, 100.0))
def test_dilation_covariance(cid, a, b1, b2, d, R, lam):
    params = FracParams(1, 2, 0.5, -2.0, (1.0, 3.0))
    pair = WeightPair(PowerWeight(a), (PowerWeight(b1), PowerWeight(b2)))
    fn = evaluator(cid, pair, params)
    e = scaling_exponent(pair, params, cid)
    v0, v1 = fn(Ball((d,), R)).value, fn(Ball((lam * d,), lam * R)).value
    assert v1 == pytest.approx(lam ** e * v0, rel=1e-9)


def _tab(beta, scale=1.0):
    s = np.geomspace(1e-4, 1e4, 81)
    return TabulatedWeight(tuple(s), tuple(scale * s ** beta))


@settings(max_examples=15)
@given(cid=st.sampled_from(CONDITIONS), lam=st.floats(0.01, 100.0), i=st.sampled_from([0, 1]))
def test_factor_degree_minus_one_in_v(cid, lam, i):
    params = FracParams(1, 2, 0.5, -2.0, (1.0, 3.0))
    betas = (-0.2, 0.1)
    w = PowerWeight(0.4)
    b = Ball((1.3,), 0.7)
    base = evaluator(cid, WeightPair(w, tuple(_tab(x) for x in betas)), params)(b)
    moved_v = tuple(_tab(x, lam if k == i else 1.0) for k, x in enumerate(betas))
    moved = evaluator(cid, WeightPair(w, moved_v), params)(b)
    assert moved.factors[i] == pytest.approx(base.factors[i] / lam, rel=1e-9)
    assert moved.factors[1 - i] == pytest.approx(base.factors[1 - i], rel=1e-12)


def test_condition_long_ids_are_aliases():
    params = FracParams(1, 2, 0.5, -2.0, (2.0, 2.0))
    pair = WeightPair(PowerWeight(-1.0), (PowerWeight(0.25), PowerWeight(0.25)))
    ball = Ball.radial(0.7, 0.3, 1)
    for short, long in (("local", "local_2_4"), ("global", "global_2_5"), ("mixed", "mixed_2_6")):
        a, b = evaluator(short, pair, params)(ball), evaluator(long, pair, params)(ball)
        assert a.condition_id == b.condition_id == short and a.value == b.value
    with pytest.raises(ValueError):
        evaluator("local_9_9", pair, params)
