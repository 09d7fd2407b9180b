"""Quarantine by cutting every edge that crosses the boundary of a ball."""

import math
from dataclasses import dataclass

import numpy as np

from .bootstrap import NEVER, RoundRecord, init_bootstrap, resume
from .errors import InsufficientData
from .geometry import Ball, contains_points, torus_distances
from .girg import Graph
from .predictions import envelope_ball_upper, nu_upper
from . import _fastgirg

__all__ = ["QuarantineReport", "CutScalingFit", "boundary_cut", "interior_edge_count",
           "remove_edges", "quarantine", "predicted_cut_exponent", "measure_cut_sizes",
           "cut_scaling_estimate"]


@dataclass(frozen=True)
class QuarantineReport:
    round_i: int
    ball: Ball
    nu_upper_i: float
    cut_size: int
    interior_edge_count: int
    contained: bool
    escaped_before_cut: bool
    final_active_count: int


def _inside(graph, ball):
    return contains_points(ball, graph.positions)


def boundary_cut(graph, ball):
    """Edges ``(u, v)``, ``u < v``, with exactly one endpoint inside ``ball``."""
    inside = _inside(graph, ball)
    edges = graph.edges()
    return edges[inside[edges[:, 0]] != inside[edges[:, 1]]]


def interior_edge_count(graph, ball):
    inside = _inside(graph, ball)
    edges = graph.edges()
    return int(np.count_nonzero(inside[edges[:, 0]] & inside[edges[:, 1]]))


def remove_edges(graph, ball):
    """Copy of ``graph`` without the edges crossing the boundary of ``ball``."""
    inside = _inside(graph, ball)
    edges = graph.edges()
    keep = inside[edges[:, 0]] == inside[edges[:, 1]]
    eu = edges[keep, 0].copy()
    ev = edges[keep, 1].copy()
    indptr, indices = _fastgirg.build_csr(graph.n_vertices, eu, ev)
    return Graph(graph.params, graph.vertices, indptr, indices)


def quarantine(graph, bootstrap_params, i, constants, seed):
    """Run ``i`` rounds, cut the upper envelope ball's boundary, finish the run.

    The first ``i`` rounds are replayed from the seed, so the state at the
    cut is exactly that of the uncut process.
    """
    center = bootstrap_params.start_ball.center
    ball = envelope_ball_upper(i, constants, center)
    initial = init_bootstrap(graph, bootstrap_params, seed)
    ir = np.full(graph.n_vertices, NEVER, dtype=np.int64)
    ir[initial] = 0
    dist = torus_distances(graph.positions, center)
    n0 = int(initial.sum())
    history = [RoundRecord(0, n0, n0, float(dist[initial].max()) if n0 else 0.0)]
    before = resume(graph, ir, bootstrap_params.k, 0, i, center, history)
    inside = _inside(graph, ball)
    escaped = bool(np.any(before.active & ~inside))
    cut_graph = remove_edges(graph, ball)
    after = resume(cut_graph, before.infection_round, bootstrap_params.k, i,
                   bootstrap_params.max_rounds, center, before.per_round)
    contained = not bool(np.any(after.active & ~inside))
    n_cut = graph.n_edges - cut_graph.n_edges
    return QuarantineReport(
        round_i=int(i), ball=ball, nu_upper_i=nu_upper(i, constants, clip=True),
        cut_size=int(n_cut), interior_edge_count=interior_edge_count(graph, ball),
        contained=contained, escaped_before_cut=escaped,
        final_active_count=after.final_active_count)


def predicted_cut_exponent(beta, d):
    return max(3.0 - beta, 1.0 - 1.0 / d)


def measure_cut_sizes(graphs, masses, center=None):
    """Mean boundary-cut size of balls holding ``masses`` expected vertices.

    ``graphs`` is an iterable of graphs sharing ``n`` and ``d``; returns an
    array of shape ``(len(masses),)``.
    """
    totals = np.zeros(len(masses))
    count = 0
    for g in graphs:
        c = center if center is not None else np.zeros(g.params.d)
        dist = torus_distances(g.positions, c)
        edges = g.edges()
        for k, mass in enumerate(masses):
            radius = min(mass / g.params.n, 1.0) ** (1.0 / g.params.d) / 2.0
            inside = dist <= radius
            totals[k] += np.count_nonzero(inside[edges[:, 0]] != inside[edges[:, 1]])
        count += 1
    if count == 0:
        raise InsufficientData("no graphs supplied")
    return totals / count


@dataclass(frozen=True)
class CutScalingFit:
    slope: float
    intercept: float
    predicted: float
    tolerance: float

    @property
    def within_tolerance(self):
        return abs(self.slope - self.predicted) <= self.tolerance


def cut_scaling_estimate(masses, mean_cut_sizes, beta, d, tolerance=0.2):
    """Log-log slope of mean cut size against the envelope mass.

    Needs at least four masses spanning two decades.
    """
    x = np.asarray(masses, dtype=np.float64)
    y = np.asarray(mean_cut_sizes, dtype=np.float64)
    if x.size < 4 or x.size != y.size:
        raise InsufficientData("need at least four (mass, cut size) pairs")
    if math.log10(x.max() / x.min()) < 2.0:
        raise InsufficientData("masses must span at least two decades")
    if np.any(y <= 0):
        raise InsufficientData("cut sizes must be positive to fit on a log scale")
    slope, intercept = np.polyfit(np.log(x), np.log(y), 1)
    return CutScalingFit(float(slope), float(intercept), predicted_cut_exponent(beta, d),
                         tolerance)
