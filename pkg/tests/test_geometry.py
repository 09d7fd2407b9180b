import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from girgbp import (Ball, InvalidArgument, Point, ball_radius_for_volume, ball_volume,
                    contains, contains_points, full_torus, torus_distance, torus_distances)

coord = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


def points(d):
    return st.tuples(*[coord] * d)


def test_distance_examples():
    assert torus_distance(Point((0.1, 0.2)), Point((0.95, 0.25))) == pytest.approx(0.15)
    assert torus_distance(Point((0.3, 0.3)), Point((0.3, 0.3))) == 0.0
    assert torus_distance(Point((0.0,)), Point((0.5,))) == 0.5


def test_points_are_reduced():
    p = Point((-0.25, 1.5))
    assert p.coords == (0.75, 0.5)
    assert Point((-1e-20,)).coords == (0.0,)


def test_dimension_mismatch():
    with pytest.raises(InvalidArgument):
        torus_distance(Point((0.1,)), Point((0.1, 0.2)))
    with pytest.raises(InvalidArgument):
        torus_distances(np.zeros((3, 2)), Point((0.0,)))


def test_radius_for_volume():
    assert ball_radius_for_volume(1.0, 2) == 0.5
    assert ball_radius_for_volume(0.01, 1) == pytest.approx(0.005)
    assert ball_radius_for_volume(1e-6, 2) == pytest.approx(5e-4)
    for bad in (0.0, -0.1, 1.5):
        with pytest.raises(InvalidArgument):
            ball_radius_for_volume(bad, 2)


def test_ball_invariants():
    assert Ball(Point((0.0,)), 0.9).radius == 0.5
    assert Ball(Point((0.0, 0.0)), 0.1).volume == pytest.approx(0.04)
    assert ball_volume(0.5, 3) == 1.0
    with pytest.raises(InvalidArgument):
        Ball(Point((0.0,)), -0.1)


def test_contains_examples():
    b = full_torus(2)
    assert contains(b, Point((0.5, 0.5)))
    b1 = Ball(Point((0.0,)), 0.1)
    assert contains(b1, Point((0.95,)))
    assert not contains(b1, Point((0.2,)))


@settings(max_examples=300)
@given(points(3), points(3), points(3))
def test_metric_axioms(x, y, z):
    dxy = torus_distance(x, y)
    assert dxy == torus_distance(y, x)
    assert 0.0 <= dxy <= 0.5
    assert torus_distance(x, x) == 0.0
    assert dxy <= torus_distance(x, z) + torus_distance(z, y) + 1e-12


@settings(max_examples=300)
@given(points(2), points(2), points(2))
def test_translation_invariance(x, y, delta):
    shifted_x = np.add(x, delta)
    shifted_y = np.add(y, delta)
    assert torus_distance(shifted_x, shifted_y) == pytest.approx(torus_distance(x, y), abs=1e-12)


def test_metric_axioms_bulk(rng):
    x, y, z = (rng.random((10_000, 2)) for _ in range(3))

    def dist(a, b):
        diff = np.abs(a - b)
        return np.minimum(diff, 1 - diff).max(axis=1)

    assert np.all(dist(x, y) <= dist(x, z) + dist(z, y) + 1e-12)
    assert np.array_equal(dist(x, y), dist(y, x))


@pytest.mark.parametrize("d", [1, 2, 3])
def test_volume_consistency(rng, d):
    m = 200_000
    for v in rng.uniform(0.01, 1.0, size=5):
        b = Ball(Point.origin(d), ball_radius_for_volume(v, d))
        hits = contains_points(b, rng.random((m, d))).mean()
        assert abs(hits - v) <= 3 * np.sqrt(v * (1 - v) / m) + 1e-9
