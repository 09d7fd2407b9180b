"""Pareto vertex weights and an empirical tail-exponent check."""

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientData, InvalidArgument

__all__ = ["WeightDist", "TailReport", "sample_weight", "sample_weights",
           "tail_probability", "fit_tail_slope", "validate_tail"]

MIN_TAIL_SAMPLES = 10_000


@dataclass(frozen=True)
class WeightDist:
    """Exact Pareto law with ``Pr[D >= w] = (w / w_min)**(1 - beta)``."""

    beta: float
    w_min: float = 1.0

    def __post_init__(self):
        if not 2.0 < self.beta < 3.0:
            raise InvalidArgument(f"beta must lie in (2, 3), got {self.beta}")
        if not self.w_min > 0:
            raise InvalidArgument(f"w_min must be positive, got {self.w_min}")

    @property
    def mean(self):
        return self.w_min * (self.beta - 1.0) / (self.beta - 2.0)


def sample_weight(dist, u):
    """Inverse-CDF transform of a uniform ``u`` in (0, 1]."""
    u_arr = np.asarray(u, dtype=np.float64)
    if np.any(~((u_arr > 0) & (u_arr <= 1))):
        raise InvalidArgument("u must lie in (0, 1]")
    w = dist.w_min * u_arr ** (-1.0 / (dist.beta - 1.0))
    return float(w) if w.ndim == 0 else w


def sample_weights(dist, size, rng):
    """Draw ``size`` weights using a numpy ``Generator``."""
    u = 1.0 - rng.random(size)  # (0, 1]
    return np.asarray(sample_weight(dist, u), dtype=np.float64).reshape(size)


def tail_probability(dist, w):
    w_arr = np.asarray(w, dtype=np.float64)
    p = np.where(w_arr <= dist.w_min, 1.0,
                 (np.maximum(w_arr, dist.w_min) / dist.w_min) ** (1.0 - dist.beta))
    return float(p) if p.ndim == 0 else p


@dataclass(frozen=True)
class TailReport:
    slope: float
    lower: float
    upper: float
    passed: bool
    degenerate: bool
    n_samples: int


def fit_tail_slope(samples, w_lo, w_hi, n_points=30):
    """Least-squares slope of log-survival against log-threshold.

    Thresholds are geometrically spaced in ``[w_lo, w_hi]``.  Returns NaN if
    the range is empty or the survival curve does not vary.
    """
    x = np.sort(np.asarray(samples, dtype=np.float64))
    if not (w_hi > w_lo > 0):
        return float("nan")
    t = np.geomspace(w_lo, w_hi, n_points)
    surv = (x.size - np.searchsorted(x, t, side="left")) / x.size
    keep = surv > 0
    if keep.sum() < 2 or np.ptp(np.log(surv[keep])) == 0:
        return float("nan")
    slope, _ = np.polyfit(np.log(t[keep]), np.log(surv[keep]), 1)
    return float(slope)


def validate_tail(samples, dist, gamma):
    """Check that the empirical tail exponent lies within ``gamma`` of ``1 - beta``.

    The fit window runs from ``w_min`` to the empirical 99.9th percentile.
    A constant or collapsed sample yields ``degenerate=True`` and a failure.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.size < MIN_TAIL_SAMPLES:
        raise InsufficientData(f"need at least {MIN_TAIL_SAMPLES} samples, got {x.size}")
    if not gamma > 0:
        raise InvalidArgument("gamma must be positive")
    lower, upper = 1.0 - dist.beta - gamma, 1.0 - dist.beta + gamma
    q = float(np.quantile(x, 0.999))
    slope = fit_tail_slope(x, dist.w_min, q)
    degenerate = not np.isfinite(slope)
    passed = (not degenerate) and lower <= slope <= upper
    return TailReport(slope, lower, upper, bool(passed), degenerate, int(x.size))
