"""The d-dimensional unit torus with the maximum norm.

Points are stored reduced modulo 1.  Balls are axis-aligned cubes, so the
volume of a ball of radius r is ``min((2r)**d, 1)`` exactly.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument

__all__ = ["Point", "Ball", "wrap", "torus_distance", "torus_distances",
           "ball_radius_for_volume", "ball_volume", "contains", "contains_points",
           "full_torus"]


def wrap(x):
    """Reduce coordinates into [0, 1)."""
    y = np.mod(np.asarray(x, dtype=np.float64), 1.0)
    # mod of a tiny negative number rounds up to exactly 1.0
    return np.where(y >= 1.0, 0.0, y)


@dataclass(frozen=True)
class Point:
    coords: tuple

    def __post_init__(self):
        c = np.atleast_1d(wrap(self.coords))
        if c.ndim != 1 or c.size == 0:
            raise InvalidArgument("a point needs at least one coordinate")
        object.__setattr__(self, "coords", tuple(float(v) for v in c))

    @property
    def d(self):
        return len(self.coords)

    @classmethod
    def origin(cls, d):
        return cls((0.0,) * d)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)


@dataclass(frozen=True)
class Ball:
    center: Point
    radius: float

    def __post_init__(self):
        if not isinstance(self.center, Point):
            object.__setattr__(self, "center", Point(self.center))
        r = float(self.radius)
        if not r >= 0:
            raise InvalidArgument(f"ball radius must be non-negative, got {r}")
        object.__setattr__(self, "radius", min(r, 0.5))

    @property
    def d(self):
        return self.center.d

    @property
    def volume(self):
        return ball_volume(self.radius, self.d)

    @property
    def is_full(self):
        return self.radius >= 0.5


def full_torus(d, center=None):
    return Ball(center if center is not None else Point.origin(d), 0.5)


def _coords(x):
    if isinstance(x, Point):
        return np.asarray(x.coords)
    return np.asarray(x, dtype=np.float64)


def torus_distance(x, y):
    """Maximum-norm distance between two points on the torus."""
    a, b = np.atleast_1d(_coords(x)), np.atleast_1d(_coords(y))
    if a.shape != b.shape:
        raise InvalidArgument(f"dimension mismatch: {a.shape} vs {b.shape}")
    diff = np.abs(wrap(a) - wrap(b))
    return float(np.max(np.minimum(diff, 1.0 - diff)))


def torus_distances(points, center):
    """Distances from each row of ``points`` (shape (m, d)) to ``center``."""
    pts = np.asarray(points, dtype=np.float64)
    c = np.atleast_1d(_coords(center))
    if pts.ndim != 2 or pts.shape[1] != c.size:
        raise InvalidArgument(f"dimension mismatch: points {pts.shape}, center {c.shape}")
    diff = np.abs(pts - c)
    diff = np.minimum(diff, 1.0 - diff)
    if pts.shape[0] == 0:
        return np.zeros(0)
    return diff.max(axis=1)


def ball_volume(radius, d):
    return min((2.0 * radius) ** d, 1.0)


def ball_radius_for_volume(v, d):
    """Radius of the max-norm ball with volume ``v`` in dimension ``d``."""
    if not 0 < v <= 1:
        raise InvalidArgument(f"volume must lie in (0, 1], got {v}")
    if int(d) != d or d < 1:
        raise InvalidArgument(f"dimension must be a positive integer, got {d}")
    return v ** (1.0 / d) / 2.0


def contains(b, x):
    """True iff ``x`` lies in the closed ball ``b``."""
    return torus_distance(b.center, x) <= b.radius


def contains_points(b, points):
    """Vectorised membership test for the rows of ``points``."""
    return torus_distances(points, b.center) <= b.radius
