"""Closed-form predictions for bootstrap percolation on GIRGs.

All logarithms are natural; ``log_nu(t)`` means ``ln t / ln nu``.  The
envelope masses grow doubly exponentially in the round index and are
handled in log space.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .geometry import Ball, Point, ball_radius_for_volume

__all__ = ["ModelConstants", "InfectionTimePrediction", "critical_density",
           "i_infinity", "predicted_infection_round", "ell_branches", "predicted_infection_rounds",
           "log_nu_lower", "log_nu_upper", "nu_lower", "nu_upper",
           "envelope_ball_lower", "envelope_ball_upper", "weight_cap"]


@dataclass(frozen=True)
class ModelConstants:
    """``nu`` is the expected number of vertices in the start ball."""

    nu: float
    n: float
    beta: float
    epsilon: float = 0.1
    eta: float = 0.05

    def __post_init__(self):
        if not 2.0 < self.beta < 3.0:
            raise InvalidArgument(f"beta must lie in (2, 3), got {self.beta}")
        if not self.n > 0 or not self.nu > 0:
            raise InvalidArgument("n and nu must be positive")
        if not 0 < self.epsilon < self.zeta:
            raise InvalidArgument(f"epsilon must lie in (0, zeta={self.zeta}), got {self.epsilon}")
        if not self.eta > 0:
            raise InvalidArgument("eta must be positive")

    @property
    def zeta(self):
        return 1.0 / (self.beta - 2.0)

    @property
    def log_rate(self):
        """``|ln(beta - 2)|``, the per-round growth rate of log-log scales."""
        return abs(math.log(self.beta - 2.0))


def critical_density(c):
    if not c.nu > 1:
        raise InvalidArgument(f"nu must exceed 1, got {c.nu}")
    return c.nu ** (-1.0 / (c.beta - 1.0))


def i_infinity(c):
    """Predicted number of rounds until a constant fraction is active."""
    if not (c.n > math.e and c.nu > math.e):
        raise InvalidArgument("i_infinity needs n > e and nu > e")
    if c.nu > c.n:
        raise InvalidArgument("nu cannot exceed n")
    ln_n = math.log(c.n)
    return (math.log(ln_n / math.log(c.nu)) + math.log(ln_n)) / c.log_rate


@dataclass(frozen=True)
class InfectionTimePrediction:
    value: float
    branch: int
    in_domain: bool
    technical_condition: bool


def ell_branches(r, w, c):
    """Values of both branches of the predictor at ``r = ||x||^d n`` and ``w``,
    regardless of which one applies."""
    r = np.asarray(r, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    r, w = np.broadcast_arrays(r, w)
    ln_nu = math.log(c.nu)
    with np.errstate(divide="ignore", invalid="ignore"):
        inner1 = np.log(r / w) / ln_nu
        v1 = np.where(inner1 > 0, np.log(np.where(inner1 > 0, inner1, 1.0)) / c.log_rate, -np.inf)
        v1 = np.maximum(v1, 0.0)
        lr = np.log(r) / ln_nu
        lw = np.log(w) / ln_nu
        v2 = (2.0 * np.log(np.where(lr > 0, lr, np.nan))
              - np.log(np.where(lw > 0, lw, np.nan))) / c.log_rate
        # ln of a non-positive log_nu(w): only w <= 1 gets here, treat as +inf delay
        v2 = np.where((lw <= 0) & (lr > 0), np.inf, v2)
    return v1, v2


def _ell(r, w, c):
    """Returns ``(value, branch, ok)`` where ``ok`` is False when the second
    branch is evaluated with ``r <= nu`` (its outer log is non-positive)."""
    r = np.asarray(r, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    r, w = np.broadcast_arrays(r, w)
    v1, v2 = ell_branches(r, w, c)
    first = w > r ** (1.0 / (c.beta - 1.0))
    with np.errstate(divide="ignore"):
        lr = np.log(r) / math.log(c.nu)
    value = np.where(first, v1, v2)
    ok = first | (lr > 1.0)
    return value, np.where(first, 1, 2), ok


def _start_radius_mass(c, d):
    # ||x||^d n at the boundary of the start ball of volume nu / n
    return c.nu / 2.0 ** d


def predicted_infection_rounds(r, w, c, d):
    """Vectorised predictor over ``r = ||x||^d n`` and weights ``w``.

    Returns ``(values, branch, in_domain, technical_condition)``; points in
    the start ball get NaN and ``in_domain=False``.
    """
    r = np.asarray(r, dtype=np.float64)
    value, branch, ok = _ell(r, w, c)
    outside = r > _start_radius_mass(c, d)
    in_domain = outside & ok & np.isfinite(value)
    value = np.where(outside, value, np.nan)
    log2_room = np.log2(np.maximum(r, 1e-300)) - log_nu_upper(0, c) / math.log(2.0)
    technical = in_domain & (value <= log2_room)
    return value, branch, in_domain, technical


def predicted_infection_round(x, w, c, center=None):
    """Predicted activation round of a vertex at ``x`` with weight ``w``.

    Never raises for out-of-domain inputs; the result carries flags instead.
    """
    if not w > 0:
        raise InvalidArgument("weight must be positive")
    x = x if isinstance(x, Point) else Point(x)
    d = x.d
    center = center if center is not None else Point.origin(d)
    diff = np.abs(np.asarray(x.coords) - np.asarray(center.coords))
    norm = float(np.max(np.minimum(diff, 1.0 - diff)))
    value, branch, in_domain, technical = predicted_infection_rounds(norm ** d * c.n, w, c, d)
    return InfectionTimePrediction(float(value), int(branch), bool(in_domain), bool(technical))


def log_nu_lower(i, c):
    if i < 0:
        raise InvalidArgument("round index must be non-negative")
    return math.log(c.nu) * (c.zeta - c.epsilon) ** i


def log_nu_upper(i, c):
    if i < 0:
        raise InvalidArgument("round index must be non-negative")
    return math.log(c.nu) * ((c.beta - 1.0) / (c.beta - 2.0) + c.epsilon) * (c.zeta + c.epsilon) ** i


def _exp_clip(log_value, n, clip):
    if clip:
        return n if log_value >= math.log(n) else math.exp(log_value)
    return math.exp(log_value) if log_value < 709.0 else math.inf


def nu_lower(i, c, clip=False):
    """Lower envelope of the infected mass after ``i`` rounds."""
    return _exp_clip(log_nu_lower(i, c), c.n, clip)


def nu_upper(i, c, clip=False):
    """Upper envelope of the infected mass after ``i`` rounds."""
    return _exp_clip(log_nu_upper(i, c), c.n, clip)


def _envelope_ball(log_mass, c, center):
    volume = math.exp(min(log_mass - math.log(c.n), 0.0))
    return Ball(center, ball_radius_for_volume(volume, center.d))


def envelope_ball_lower(i, c, center):
    return _envelope_ball(log_nu_lower(i, c), c, center)


def envelope_ball_upper(i, c, center):
    return _envelope_ball(log_nu_upper(i, c), c, center)


def weight_cap(mu, beta, eta, sign="-"):
    """Likely range ``[cap(-), cap(+)]`` of the largest weight among ~mu vertices."""
    if not mu > 1:
        raise InvalidArgument(f"mu must exceed 1, got {mu}")
    if sign == "-":
        return mu ** (1.0 / (beta - 1.0 + eta))
    if sign == "+":
        return mu ** (1.0 / (beta - 1.0 - eta))
    raise InvalidArgument(f"sign must be '-' or '+', got {sign!r}")
