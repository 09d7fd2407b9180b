"""Sampling geometric inhomogeneous random graphs on the torus.

Vertices come from a Poisson point process of intensity ``n`` on the unit
torus, each carrying a Pareto weight.  Two vertices at max-norm distance
``r`` are joined independently with probability

    min(c * (w_u * w_v / (r**d * n))**alpha, 1)

or, in the threshold model (``alpha = inf``), deterministically whenever
``r <= C * (w_u * w_v / n)**(1/d)``.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _fastgirg
from .errors import InvalidArgument
from .geometry import Point, torus_distances
from .keyed import STREAM_EDGES, STREAM_FAST, STREAM_VERTICES, derive_seed, keyed_uniform
from .weights import WeightDist, sample_weights

__all__ = ["INFINITY", "GirgParams", "Vertex", "VertexSet", "Graph",
           "edge_probability", "edge_probabilities", "sample_vertices",
           "sample_edges_naive", "sample_edges_fast", "sample_girg", "graph_from_edges",
           "degree_normalized_kernel_constant"]

INFINITY = math.inf


@dataclass(frozen=True)
class GirgParams:
    n: float
    d: int = 2
    alpha: float = 2.0
    beta: float = 2.5
    w_min: float = 1.0
    c: float = 1.0
    C: float = 1.0

    def __post_init__(self):
        if not self.n > 0:
            raise InvalidArgument(f"n must be positive, got {self.n}")
        if int(self.d) != self.d or self.d < 1:
            raise InvalidArgument(f"d must be a positive integer, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        if not (self.alpha > 1):
            raise InvalidArgument(f"alpha must exceed 1 (or be inf), got {self.alpha}")
        if not (self.c > 0 and self.C > 0):
            raise InvalidArgument("kernel constants must be positive")
        WeightDist(self.beta, self.w_min)  # validates beta and w_min

    @property
    def threshold(self):
        return math.isinf(self.alpha)

    @property
    def weight_dist(self):
        return WeightDist(self.beta, self.w_min)


@dataclass(frozen=True)
class Vertex:
    id: int
    position: Point
    weight: float


@dataclass(frozen=True, eq=False)
class VertexSet:
    """Positions ``(m, d)`` and weights ``(m,)``; vertex ids are row indices."""

    positions: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return self.weights.shape[0]

    def __getitem__(self, i):
        return Vertex(int(i), Point(tuple(self.positions[i])), float(self.weights[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def __eq__(self, other):
        return (isinstance(other, VertexSet)
                and np.array_equal(self.positions, other.positions)
                and np.array_equal(self.weights, other.weights))

    @property
    def d(self):
        return self.positions.shape[1]


def degree_normalized_kernel_constant(d, alpha, beta, w_min=1.0):
    """Kernel constant making the expected degree of a weight-``w`` vertex ``w``.

    For finite ``alpha`` the expected degree is
    ``2^d * alpha/(alpha-1) * c^(1/alpha) * E[W] * w`` (ignoring the bounded
    torus), so this returns the ``c`` solving that for a slope of one.  For
    the threshold model it returns ``C`` with ``(2C)^d * E[W] = 1``.
    """
    mean = WeightDist(beta, w_min).mean
    if math.isinf(alpha):
        return 0.5 * mean ** (-1.0 / d)
    return (2.0 ** d * alpha / (alpha - 1.0) * mean) ** (-alpha)


def edge_probabilities(dist, w_u, w_v, params):
    """Vectorised connection probability for distances and weight pairs."""
    dist = np.asarray(dist, dtype=np.float64)
    ww = np.asarray(w_u, dtype=np.float64) * np.asarray(w_v, dtype=np.float64) / params.n
    if params.threshold:
        return np.where(dist <= params.C * ww ** (1.0 / params.d), 1.0, 0.0)
    with np.errstate(divide="ignore", over="ignore"):
        lp = math.log(params.c) + params.alpha * (np.log(ww) - params.d * np.log(dist))
        p = np.exp(np.minimum(lp, 0.0))
    return np.where(dist == 0.0, 1.0, p)


def edge_probability(u, v, params):
    if u.id == v.id:
        raise InvalidArgument("no self-loops: u and v must be distinct")
    dist = torus_distances(np.atleast_2d(u.position.coords), v.position)[0]
    return float(edge_probabilities(dist, u.weight, v.weight, params))


def sample_vertices(params, seed):
    """Poisson number of uniform positions with i.i.d. Pareto weights."""
    rng = np.random.default_rng(derive_seed(seed, STREAM_VERTICES))
    count = int(rng.poisson(params.n))
    positions = rng.random((count, params.d))
    weights = sample_weights(params.weight_dist, count, rng)
    return VertexSet(positions, weights)


def _as_arrays(vertices):
    if isinstance(vertices, VertexSet):
        return vertices.positions, vertices.weights
    vs = list(vertices)
    if not vs:
        return np.zeros((0, 1)), np.zeros(0)
    for i, v in enumerate(vs):
        if v.id != i:
            raise InvalidArgument("vertex ids must be dense and ordered")
    return (np.array([v.position.coords for v in vs], dtype=np.float64),
            np.array([v.weight for v in vs], dtype=np.float64))


def sample_edges_naive(vertices, params, seed):
    """Reference sampler: one keyed Bernoulli draw per unordered pair.

    The draw for ``{u, v}`` depends only on ``(seed, min(u, v), max(u, v))``,
    so the output is bitwise reproducible.  Quadratic time.
    """
    pos, w = _as_arrays(vertices)
    m = w.shape[0]
    us, vs = [], []
    for u in range(m - 1):
        v = np.arange(u + 1, m)
        dist = torus_distances(pos[u + 1:], pos[u])
        p = edge_probabilities(dist, w[u], w[u + 1:], params)
        hit = keyed_uniform(seed, STREAM_EDGES, u, v) < p
        us.append(np.full(hit.sum(), u, dtype=np.int64))
        vs.append(v[hit])
    if not us:
        return np.zeros((0, 2), dtype=np.int64)
    return np.column_stack([np.concatenate(us), np.concatenate(vs)])


def _levels(params, n_vertices):
    level_max = max(1, math.ceil(math.log2(max(n_vertices, 2)) / params.d) + 1)
    return min(level_max, 62 // params.d)


def _sample_edges_unsorted(pos, w, params, seed):
    m = w.shape[0]
    if m < 2:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    d = params.d
    pos = np.ascontiguousarray(pos, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    level_max = _levels(params, m)
    side = 1 << level_max
    cells = np.minimum((pos * side).astype(np.int64), side - 1)
    codes = _fastgirg.morton_codes(cells, level_max)
    layer = np.maximum(np.floor(np.log2(w / params.w_min)), 0).astype(np.int64)
    order = np.lexsort((codes, layer))
    codes, pos, w = codes[order], pos[order], w[order]
    n_layers = int(layer.max()) + 1
    bounds = np.searchsorted(layer[order], np.arange(n_layers + 1))
    layers = [slice(bounds[i], bounds[i + 1]) for i in range(n_layers)]

    _fastgirg.seed_numba(derive_seed(seed, STREAM_FAST, bits=32))
    alpha = 1.0 if params.threshold else float(params.alpha)
    buf_u = np.empty(max(16, 4 * m), dtype=np.int64)
    buf_v = np.empty(max(16, 4 * m), dtype=np.int64)
    count = 0
    tables = {}

    def table(sl, key, lv):
        if (key, lv) not in tables:
            tables[(key, lv)] = _fastgirg.cell_tables(codes[sl], w[sl], lv, level_max, d)
        return tables[(key, lv)]

    for i in range(n_layers):
        for j in range(i, n_layers):
            x, y = layers[i], layers[j]
            if x.stop == x.start or y.stop == y.start:
                continue
            # upper weight bounds of the two layers
            wbar_prod = params.w_min ** 2 * 2.0 ** (i + j + 2)
            if params.threshold:
                t = params.C ** d * wbar_prod / params.n
            else:
                t = params.c ** (1.0 / alpha) * wbar_prod / params.n
            level = 0 if t >= 1 else int(math.floor(-math.log2(t) / d))
            level = min(level, level_max)
            ky = j
            if y.stop - y.start < x.stop - x.start:
                x, y, ky = y, x, i
            jobs = [(level, _fastgirg.NEIGHBOUR)]
            if not params.threshold:
                jobs += [(lv, _fastgirg.FAR) for lv in range(2, level + 1)]
            for lv, kind in jobs:
                starts_y, wmax_y = table(y, ky, lv)
                buf_u, buf_v, count = _fastgirg.sample_block(
                    codes[x], pos[x], w[x], x.start, starts_y, wmax_y, pos[y], w[y], y.start,
                    i == j, lv, level_max, kind, float(params.n), alpha,
                    params.threshold, float(params.c), float(params.C),
                    buf_u, buf_v, count)
    return order[buf_u[:count]], order[buf_v[:count]]


def sample_edges_fast(vertices, params, seed):
    """Expected near-linear-time sampler with the naive sampler's law.

    Returns the edge list as an ``(m, 2)`` array with ``u < v`` in
    lexicographic order.
    """
    pos, w = _as_arrays(vertices)
    eu, ev = _sample_edges_unsorted(pos, w, params, seed)
    lo, hi = np.minimum(eu, ev), np.maximum(eu, ev)
    key = np.lexsort((hi, lo))
    return np.column_stack([lo[key], hi[key]])


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable sampled graph in compressed sparse row form."""

    params: GirgParams
    vertices: VertexSet
    indptr: np.ndarray
    indices: np.ndarray

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return int(self.indices.shape[0] // 2)

    @property
    def positions(self):
        return self.vertices.positions

    @property
    def weights(self):
        return self.vertices.weights

    @cached_property
    def degrees(self):
        return np.diff(self.indptr)

    def neighbors(self, v):
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def edges(self):
        """``(m, 2)`` array of edges with ``u < v``, sorted lexicographically."""
        src = np.repeat(np.arange(self.n_vertices, dtype=np.int64), self.degrees)
        keep = src < self.indices
        return np.column_stack([src[keep], self.indices[keep].astype(np.int64)])

    def __eq__(self, other):
        return (isinstance(other, Graph) and self.params == other.params
                and self.vertices == other.vertices
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))


def graph_from_edges(params, vertices, edges):
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    m = len(vertices)
    if edges.size and (edges.min() < 0 or edges.max() >= m):
        raise InvalidArgument("edge endpoint out of range")
    if np.any(edges[:, 0] == edges[:, 1]):
        raise InvalidArgument("self-loops are not allowed")
    indptr, indices = _fastgirg.build_csr(m, edges[:, 0].copy(), edges[:, 1].copy())
    return Graph(params, vertices, indptr, indices)


def sample_girg(params, seed):
    """Sample vertices and edges (fast sampler) for one seed."""
    vertices = sample_vertices(params, seed)
    eu, ev = _sample_edges_unsorted(vertices.positions, vertices.weights, params, seed)
    indptr, indices = _fastgirg.build_csr(len(vertices), eu, ev)
    return Graph(params, vertices, indptr, indices)
