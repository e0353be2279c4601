import math

import numpy as np
import pytest

from fracweights.corners import build_corner_sets, monte_carlo_fraction
from fracweights.params import Ball


def test_one_dimensional_small_set(rng):
    sets = build_corner_sets(Ball((0.0,), 12.0))
    pts = sets.C1.sample(2000, rng)
    assert np.all(np.abs(pts[:, 0] + 1) <= 1 + 1e-12)
    assert np.all(pts[:, 0] <= -1)


def test_quadrant_lies_ahead_of_centre(rng):
    for c in (-3.0, 0.0, 2.5):
        sets = build_corner_sets(Ball((c,), 0.7))
        ys = sets.A.sample(1000, rng, scale=0.7)
        assert np.all(ys[:, 0] >= c)


def test_two_dimensional_large_set_by_rejection(rng):
    sets = build_corner_sets(Ball((0.0, 0.0), 1.0))
    anchor = -np.ones(2) / (3 * math.sqrt(2))
    pts = sets.C2.sample(10_000, rng)
    assert np.all(np.linalg.norm(pts - anchor, axis=1) <= 2 / 3 + 1e-12)
    assert np.all(pts <= anchor + 1e-15)
    # rejection oracle: uniform points in the bounding box accepted by the two predicates
    box = rng.uniform(anchor - 2 / 3, anchor, size=(40_000, 2))
    ok = (np.linalg.norm(box - anchor, axis=1) <= 2 / 3) & np.all(box <= anchor, axis=1)
    assert np.all(sets.C2.contains(box) == ok)
    # means agree, so the sampler is uniform on the set
    assert np.allclose(pts.mean(axis=0), box[ok].mean(axis=0), atol=0.01)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sets_are_disjoint_and_inside_ball(n, rng):
    ball = Ball(tuple(rng.uniform(-1, 1, n)), 0.8)
    sets = build_corner_sets(ball)
    for S in (sets.C1, sets.C2):
        pts = S.sample(3000, rng)
        assert not np.any(sets.A.contains(pts) & np.any(pts != np.asarray(ball.center), axis=1))
        assert np.all(ball.contains(pts) | np.isclose(np.linalg.norm(pts - ball.center, axis=1), ball.radius))


@pytest.mark.parametrize("n", [1, 2])
def test_volume_fraction_uniform_in_radius(n, rng):
    N = 100_000
    lows = []
    for e in range(-3, 4):
        ball = Ball.radial(0.3, 10.0 ** e, n)
        sets = build_corner_sets(ball)
        for S in (sets.C1, sets.C2):
            f = monte_carlo_fraction(ball, S, N, rng)
            exact = S.volume / ball.volume  # closed form, independent of R
            assert abs(f - exact) <= 5 * math.sqrt(exact * (1 - exact) / N)
            lows.append(f)
    assert min(lows) > 0
