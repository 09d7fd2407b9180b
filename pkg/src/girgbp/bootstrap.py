"""Bootstrap percolation with threshold k started from a random subset of a ball."""

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from numba import njit

from .errors import InvalidArgument
from .geometry import Ball, contains_points, torus_distances
from .keyed import STREAM_BOOTSTRAP, keyed_uniform

__all__ = ["NEVER", "BootstrapParams", "RoundRecord", "PercolationRun",
           "bootstrap_uniforms", "init_bootstrap", "step", "run", "resume",
           "infection_fraction"]

NEVER = -1


@dataclass(frozen=True)
class BootstrapParams:
    k: int
    rho: float
    start_ball: Ball
    max_rounds: Optional[int] = None

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 2:
            raise InvalidArgument(f"k must be an integer >= 2, got {self.k}")
        if not 0.0 <= self.rho <= 1.0:
            raise InvalidArgument(f"rho must lie in [0, 1], got {self.rho}")
        if self.max_rounds is not None and self.max_rounds < 0:
            raise InvalidArgument("max_rounds must be non-negative")


class RoundRecord(NamedTuple):
    round: int
    newly_active: int
    cumulative_active: int
    max_active_distance: float


@dataclass(eq=False)
class PercolationRun:
    infection_round: np.ndarray
    rounds_executed: int
    final_active_count: int
    per_round: list
    hit_max_rounds: bool = False

    @property
    def active(self):
        return self.infection_round != NEVER

    def active_by(self, i):
        """Mask of vertices active after round ``i``."""
        return (self.infection_round != NEVER) & (self.infection_round <= i)


def bootstrap_uniforms(n_vertices, seed):
    """Per-vertex uniforms keyed by ``(seed, vertex id)``."""
    return keyed_uniform(seed, STREAM_BOOTSTRAP, np.arange(n_vertices, dtype=np.uint64))


def init_bootstrap(graph, params, seed):
    """Boolean mask of the initially active vertices.

    A vertex inside the start ball is active iff its keyed uniform is below
    ``rho``, so the sets for different ``rho`` are nested.
    """
    inside = contains_points(params.start_ball, graph.positions)
    return inside & (bootstrap_uniforms(graph.n_vertices, seed) < params.rho)


def _as_mask(active, n_vertices):
    a = np.asarray(active)
    if a.dtype == bool:
        if a.shape != (n_vertices,):
            raise InvalidArgument("active mask has the wrong length")
        return a
    mask = np.zeros(n_vertices, dtype=bool)
    mask[a.astype(np.int64)] = True
    return mask


def step(graph, active, k):
    """Ids of the inactive vertices with at least ``k`` active neighbours."""
    mask = _as_mask(active, graph.n_vertices)
    hits = graph.indices[np.repeat(mask, graph.degrees)]
    counts = np.bincount(hits, minlength=graph.n_vertices)
    return np.flatnonzero(~mask & (counts >= k))


@njit(cache=True)
def _spread(indptr, indices, infection_round, k, start_round, max_rounds, dist):
    n = infection_round.shape[0]
    counts = np.zeros(n, dtype=np.int64)
    for v in range(n):
        if infection_round[v] >= 0:
            for e in range(indptr[v], indptr[v + 1]):
                counts[indices[e]] += 1
    pending = np.empty(n, dtype=np.int64)
    n_pending = 0
    for v in range(n):
        if infection_round[v] < 0 and counts[v] >= k:
            pending[n_pending] = v
            n_pending += 1
    rounds = []
    new_counts = []
    max_dists = []
    rnd = start_round
    nxt = np.empty(n, dtype=np.int64)
    while n_pending > 0 and rnd < max_rounds:
        rnd += 1
        md = 0.0
        for t in range(n_pending):
            v = pending[t]
            infection_round[v] = rnd
            if dist[v] > md:
                md = dist[v]
        n_next = 0
        for t in range(n_pending):
            v = pending[t]
            for e in range(indptr[v], indptr[v + 1]):
                u = indices[e]
                counts[u] += 1
                if counts[u] == k and infection_round[u] < 0:
                    nxt[n_next] = u
                    n_next += 1
        rounds.append(rnd)
        new_counts.append(n_pending)
        max_dists.append(md)
        pending, nxt = nxt, pending
        n_pending = n_next
    return rounds, new_counts, max_dists, n_pending > 0


def resume(graph, infection_round, k, start_round, max_rounds=None, center=None,
           history=()):
    """Continue the process from a state in which all active vertices have
    ``infection_round <= start_round``.

    ``history`` holds the round records up to ``start_round``; they are kept
    as the prefix of the returned trace.
    """
    ir = np.array(infection_round, dtype=np.int64, copy=True)
    if max_rounds is None:
        max_rounds = graph.n_vertices
    if center is None:
        dist = np.zeros(graph.n_vertices)
    else:
        dist = torus_distances(graph.positions, center)
    rounds, new_counts, max_dists, pending = _spread(
        graph.indptr, graph.indices, ir, int(k), int(start_round), int(max_rounds), dist)
    per_round = list(history)
    cumulative = int(np.count_nonzero(ir[ir >= 0] <= start_round))
    running_max = per_round[-1].max_active_distance if per_round else 0.0
    for r, m, md in zip(rounds, new_counts, max_dists):
        cumulative += m
        running_max = max(running_max, md)
        per_round.append(RoundRecord(int(r), int(m), cumulative, float(running_max)))
    last = rounds[-1] if len(rounds) else start_round
    return PercolationRun(ir, int(last), int(np.count_nonzero(ir >= 0)), per_round,
                          bool(pending))


def run(graph, params, seed):
    """Iterate the activation rule to a fixpoint (or ``max_rounds``)."""
    initial = init_bootstrap(graph, params, seed)
    ir = np.full(graph.n_vertices, NEVER, dtype=np.int64)
    ir[initial] = 0
    center = params.start_ball.center
    dist = torus_distances(graph.positions, center)
    n0 = int(initial.sum())
    record = RoundRecord(0, n0, n0, float(dist[initial].max()) if n0 else 0.0)
    return resume(graph, ir, params.k, 0, params.max_rounds, center, [record])


def infection_fraction(run, graph):
    if graph.n_vertices == 0:
        return 0.0
    return run.final_active_count / graph.n_vertices
