import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from girgbp import (INFINITY, GirgParams, InvalidArgument, Point, Vertex, VertexSet,
                    degree_normalized_kernel_constant, edge_probabilities, edge_probability,
                    graph_from_edges, sample_edges_fast, sample_edges_naive, sample_girg,
                    sample_vertices, torus_distances)


def vertex(i, x, w):
    return Vertex(i, Point(x), w)


def test_edge_probability_examples():
    p = GirgParams(n=100, d=1, alpha=2.0, c=1.0)
    assert edge_probability(vertex(0, (0.0,), 1.0), vertex(1, (0.5,), 5.0), p) == pytest.approx(0.01)
    # heavy pair: clipped to 1
    assert edge_probability(vertex(0, (0.0,), 50.0), vertex(1, (0.5,), 50.0), p) == 1.0


def test_threshold_examples():
    p = GirgParams(n=1000, d=1, alpha=INFINITY, C=1.0)
    u = vertex(0, (0.0,), 1.0)
    assert edge_probability(u, vertex(1, (0.0009,), 1.0), p) == 1.0
    assert edge_probability(u, vertex(1, (0.0011,), 1.0), p) == 0.0


def test_self_pair_rejected():
    p = GirgParams(n=10)
    u = vertex(3, (0.1, 0.1), 1.0)
    with pytest.raises(InvalidArgument):
        edge_probability(u, u, p)


def test_invalid_params():
    for kw in (dict(n=0), dict(n=10, d=0), dict(n=10, alpha=1.0), dict(n=10, c=0.0),
               dict(n=10, beta=3.5)):
        with pytest.raises(InvalidArgument):
            GirgParams(**kw)


@settings(max_examples=200)
@given(st.floats(1e-4, 0.5), st.floats(1e-4, 0.5), st.floats(1, 100), st.floats(1, 100),
       st.floats(1, 100), st.sampled_from([1.5, 2.0, 4.0, math.inf]))
def test_kernel_monotone(r1, r2, w1, w2, w3, alpha):
    p = GirgParams(n=1000, d=2, alpha=alpha)
    lo, hi = sorted((r1, r2))
    assert edge_probabilities(hi, w1, w2, p) <= edge_probabilities(lo, w1, w2, p)
    a, b = sorted((w2, w3))
    assert edge_probabilities(lo, w1, a, p) <= edge_probabilities(lo, w1, b, p)
    assert edge_probabilities(lo, w1, w2, p) == edge_probabilities(lo, w2, w1, p)


def test_vertex_count_moments():
    p = GirgParams(n=1e4)
    counts = np.array([len(sample_vertices(p, s).weights) for s in range(1000)])
    assert abs(counts.mean() - 1e4) <= 3 * math.sqrt(1e4 / 1000)
    assert abs(counts.var(ddof=1) / 1e4 - 1) <= 0.1


def test_vertices_deterministic():
    p = GirgParams(n=500, d=3)
    a, b = sample_vertices(p, 9), sample_vertices(p, 9)
    assert a == b and a != sample_vertices(p, 10)
    assert np.all(a.weights >= p.w_min)
    assert np.all((a.positions >= 0) & (a.positions < 1))


def test_naive_edge_count_oracle():
    # many light vertices, finite alpha: count within 3 sigma of the exact sum
    p = GirgParams(n=400, d=2, alpha=2.0, c=0.05)
    rng = np.random.default_rng(3)
    vs = VertexSet(rng.random((400, 2)), np.ones(400))
    iu, ju = np.triu_indices(400, 1)
    dist = np.maximum(*(np.minimum(np.abs(vs.positions[iu] - vs.positions[ju]),
                                   1 - np.abs(vs.positions[iu] - vs.positions[ju]))).T)
    probs = edge_probabilities(dist, 1.0, 1.0, p)
    mean, var = probs.sum(), (probs * (1 - probs)).sum()
    counts = [len(sample_edges_naive(vs, p, s)) for s in range(30)]
    assert abs(np.mean(counts) - mean) <= 3 * math.sqrt(var / 30)


def test_naive_corner_cases():
    p = GirgParams(n=10)
    one = VertexSet(np.array([[0.2, 0.2]]), np.array([1.0]))
    assert sample_edges_naive(one, p, 0).shape == (0, 2)
    same = VertexSet(np.array([[0.2, 0.2], [0.2, 0.2]]), np.array([1.0, 1.0]))
    for s in range(20):
        assert sample_edges_naive(same, p, s).tolist() == [[0, 1]]
        assert sample_edges_fast(same, p, s).tolist() == [[0, 1]]


def test_naive_reproducible(sparse_params):
    vs = sample_vertices(sparse_params, 2)
    assert np.array_equal(sample_edges_naive(vs, sparse_params, 5),
                          sample_edges_naive(vs, sparse_params, 5))


@pytest.mark.parametrize("alpha,d", [(2.0, 1), (1.5, 2), (3.0, 3)])
def test_fast_per_pair_frequency(alpha, d):
    """Each pair of a tiny fixed vertex set appears with its exact probability."""
    p = GirgParams(n=8, d=d, alpha=alpha, c=0.5)
    rng = np.random.default_rng(11)
    vs = VertexSet(rng.random((8, d)), 1.0 + 3.0 * rng.random(8))
    iu, ju = np.triu_indices(8, 1)
    exact = edge_probabilities(
        np.array([torus_distances(vs.positions[[i]], vs.positions[j])[0] for i, j in zip(iu, ju)]),
        vs.weights[iu], vs.weights[ju], p)
    trials = 3000
    hits = np.zeros((8, 8))
    for s in range(trials):
        e = sample_edges_fast(vs, p, s)
        hits[e[:, 0], e[:, 1]] += 1
    freq = hits[iu, ju] / trials
    sigma = np.sqrt(exact * (1 - exact) / trials)
    assert np.all(np.abs(freq - exact) <= 4.5 * sigma + 1e-12)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_threshold_fast_equals_naive(d):
    p = GirgParams(n=600, d=d, alpha=INFINITY, C=0.5)
    vs = sample_vertices(p, d)
    assert np.array_equal(sample_edges_fast(vs, p, 0), sample_edges_naive(vs, p, 0))


def test_fast_output_shape(sparse_params):
    e = sample_edges_fast(sample_vertices(sparse_params, 1), sparse_params, 1)
    assert np.all(e[:, 0] < e[:, 1])
    order = np.lexsort((e[:, 1], e[:, 0]))
    assert np.array_equal(order, np.arange(len(e)))
    assert len(np.unique(e, axis=0)) == len(e)


def test_graph_structure(sparse_params):
    g = sample_girg(sparse_params, 4)
    assert g == sample_girg(sparse_params, 4)
    edges = g.edges()
    rebuilt = graph_from_edges(sparse_params, g.vertices, edges)
    assert rebuilt == g
    for v in range(0, g.n_vertices, 97):
        nb = g.neighbors(v)
        assert np.all(np.diff(nb) > 0) and v not in nb
        for u in nb:
            assert v in g.neighbors(u)
    assert g.degrees.sum() == 2 * g.n_edges


def test_graph_from_edges_rejects_bad_input(sparse_params):
    vs = sample_vertices(sparse_params, 0)
    with pytest.raises(InvalidArgument):
        graph_from_edges(sparse_params, vs, [[0, 0]])
    with pytest.raises(InvalidArgument):
        graph_from_edges(sparse_params, vs, [[0, len(vs)]])


def test_tiny_intensity_gives_empty_graph():
    g = sample_girg(GirgParams(n=0.001), 0)
    assert g.n_vertices == 0 and g.n_edges == 0


def test_normalized_constant_gives_unit_degree_slope():
    c = degree_normalized_kernel_constant(2, 2.0, 2.5)
    assert c == pytest.approx(1 / 576)
    C = degree_normalized_kernel_constant(1, math.inf, 2.5)
    assert (2 * C) * 3.0 == pytest.approx(1.0)


@pytest.mark.slow
def test_million_vertices_linear_edges():
    c = degree_normalized_kernel_constant(2, 2.0, 2.5)
    g = sample_girg(GirgParams(n=1e6, d=2, alpha=2.0, beta=2.5, c=c), 0)
    assert g.n_vertices / 10 <= g.n_edges <= 10 * g.n_vertices
