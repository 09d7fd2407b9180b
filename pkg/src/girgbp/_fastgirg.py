"""Numba kernels for the cell-partitioned GIRG edge sampler.

Vertices are bucketed into weight layers ``[w_min 2^i, w_min 2^(i+1))`` and
sorted by Morton code, so every grid cell at every level is a contiguous
slice.  For a layer pair the finest level ``L`` is the coarsest grid whose
cells are at least as wide as the distance below which an edge is certain.
Every vertex pair then falls into exactly one cell pair of one of two kinds:

* neighbouring cells at level ``L`` -- every pair is tested directly;
* cells that are not neighbours at level ``l`` but whose parents are
  neighbours at level ``l - 1`` -- a distance lower bound gives a
  probability bound ``pbar``; candidate pairs are visited by geometric
  jumps and accepted with probability ``p / pbar``.
"""

import math

import numpy as np
from numba import njit

NEIGHBOUR = 0
FAR = 1


@njit(cache=True)
def seed_numba(seed):
    np.random.seed(seed)


@njit(cache=True)
def morton_codes(cells, level_max):
    m, d = cells.shape
    out = np.zeros(m, dtype=np.int64)
    for i in range(m):
        code = 0
        for b in range(level_max):
            for k in range(d):
                code |= ((cells[i, k] >> b) & 1) << (b * d + k)
        out[i] = code
    return out


@njit(cache=True)
def _decode(code, level, d, out):
    for k in range(d):
        out[k] = 0
    for b in range(level):
        for k in range(d):
            out[k] |= ((code >> (b * d + k)) & 1) << b


@njit(cache=True)
def _encode(coords, level, d):
    code = 0
    for b in range(level):
        for k in range(d):
            code |= ((coords[k] >> b) & 1) << (b * d + k)
    return code


@njit(cache=True)
def _torus_gap(a, b, m):
    diff = abs(a - b)
    return min(diff, m - diff)


@njit(cache=True)
def _edge_prob(pos_x, w_x, a, pos_y, w_y, b, d, n, alpha, threshold, c, C):
    dist = 0.0
    for k in range(d):
        diff = abs(pos_x[a, k] - pos_y[b, k])
        diff = min(diff, 1.0 - diff)
        if diff > dist:
            dist = diff
    ww = w_x[a] * w_y[b] / n
    if threshold:
        return 1.0 if dist <= C * ww ** (1.0 / d) else 0.0
    if dist == 0.0:
        return 1.0
    vol = dist
    for _ in range(d - 1):
        vol *= dist
    base = ww / vol
    if alpha == 2.0:
        p = c * base * base
    else:
        p = c * base ** alpha
    return p if p < 1.0 else 1.0


@njit(cache=True)
def _push(buf_u, buf_v, count, u, v):
    if count == buf_u.shape[0]:
        nu = np.empty(2 * buf_u.shape[0], dtype=buf_u.dtype)
        nv = np.empty(2 * buf_v.shape[0], dtype=buf_v.dtype)
        nu[:count] = buf_u[:count]
        nv[:count] = buf_v[:count]
        buf_u, buf_v = nu, nv
    buf_u[count] = u
    buf_v[count] = v
    return buf_u, buf_v, count + 1


@njit(cache=True)
def sample_block(codes_x, pos_x, w_x, off_x, starts_y, wmax_y, pos_y, w_y, off_y,
                 same, level, level_max, kind, n, alpha, threshold, c, C,
                 buf_u, buf_v, count):
    """Sample all edges between layer X and layer Y at one grid level.

    Layers are passed as contiguous slices of the (layer, Morton)-sorted
    vertex arrays; emitted endpoints are indices into that sorted order.
    ``starts_y`` and ``wmax_y`` are the dense per-cell offsets and maximum
    weights of layer Y at this level (see ``cell_tables``).
    """
    d = pos_x.shape[1]
    shift = d * (level_max - level)
    m = np.int64(1) << level
    ca = np.zeros(d, dtype=np.int64)
    cb = np.zeros(d, dtype=np.int64)
    cand = np.zeros((d, 6), dtype=np.int64)
    ncand = np.zeros(d, dtype=np.int64)
    idx = np.zeros(d, dtype=np.int64)
    nx = codes_x.shape[0]
    s = 0
    while s < nx:
        a_code = codes_x[s] >> shift
        e = s + 1
        while e < nx and (codes_x[e] >> shift) == a_code:
            e += 1
        _decode(a_code, level, d, ca)
        wmax_a = -1.0
        # per-dimension candidate coordinates of partner cells
        for k in range(d):
            ncand[k] = 0
            if kind == NEIGHBOUR:
                for o in range(-1, 2):
                    val = (ca[k] + o) % m
                    dup = False
                    for t in range(ncand[k]):
                        if cand[k, t] == val:
                            dup = True
                    if not dup:
                        cand[k, ncand[k]] = val
                        ncand[k] += 1
            else:
                mp = m >> 1
                pa = ca[k] >> 1
                for o in range(-1, 2):
                    pv = (pa + o) % mp
                    for ch in range(2):
                        val = 2 * pv + ch
                        dup = False
                        for t in range(ncand[k]):
                            if cand[k, t] == val:
                                dup = True
                        if not dup:
                            cand[k, ncand[k]] = val
                            ncand[k] += 1
        for k in range(d):
            idx[k] = 0
        done = False
        while not done:
            far = 0
            for k in range(d):
                cb[k] = cand[k, idx[k]]
                g = _torus_gap(ca[k], cb[k], m)
                if g > far:
                    far = g
            # advance the mixed-radix counter
            k = 0
            while k < d:
                idx[k] += 1
                if idx[k] < ncand[k]:
                    break
                idx[k] = 0
                k += 1
            if k == d:
                done = True
            if kind == FAR and far <= 1:
                continue
            b_code = _encode(cb, level, d)
            if same and b_code < a_code:
                continue
            lo = starts_y[b_code]
            hi = starts_y[b_code + 1]
            if hi == lo:
                continue
            if kind == NEIGHBOUR:
                for a in range(s, e):
                    b0 = lo
                    if same and b_code == a_code:
                        b0 = a + 1
                    for b in range(b0, hi):
                        p = _edge_prob(pos_x, w_x, a, pos_y, w_y, b, d, n, alpha,
                                       threshold, c, C)
                        if p > 0.0 and np.random.random() < p:
                            buf_u, buf_v, count = _push(buf_u, buf_v, count,
                                                        off_x + a, off_y + b)
            else:
                if wmax_a < 0.0:
                    for a in range(s, e):
                        if w_x[a] > wmax_a:
                            wmax_a = w_x[a]
                wmax_b = wmax_y[b_code]
                gap = (far - 1) / m
                lpbar = math.log(c) + alpha * math.log(wmax_a * wmax_b / (n * gap ** d))
                pbar = 1.0 if lpbar >= 0.0 else math.exp(lpbar)
                na = e - s
                nb = hi - lo
                total = na * nb
                if pbar >= 1.0:
                    step_log = 0.0
                else:
                    step_log = math.log1p(-pbar)
                j = -1
                while True:
                    if pbar >= 1.0:
                        j += 1
                    else:
                        r = np.random.random()
                        j += 1 + int(math.floor(math.log1p(-r) / step_log))
                    if j >= total:
                        break
                    a = s + j // nb
                    b = lo + j % nb
                    p = _edge_prob(pos_x, w_x, a, pos_y, w_y, b, d, n, alpha,
                                   threshold, c, C)
                    if np.random.random() * pbar < p:
                        buf_u, buf_v, count = _push(buf_u, buf_v, count,
                                                    off_x + a, off_y + b)
        s = e
    return buf_u, buf_v, count


@njit(cache=True)
def cell_tables(codes, w, level, level_max, d):
    """Dense cell offsets and per-cell maximum weights of one sorted layer."""
    shift = d * (level_max - level)
    n_cells = np.int64(1) << (d * level)
    starts = np.zeros(n_cells + 1, dtype=np.int64)
    wmax = np.zeros(n_cells, dtype=np.float64)
    for i in range(codes.shape[0]):
        cell = codes[i] >> shift
        starts[cell + 1] += 1
        if w[i] > wmax[cell]:
            wmax[cell] = w[i]
    for cell in range(n_cells):
        starts[cell + 1] += starts[cell]
    return starts, wmax


@njit(cache=True)
def build_csr(n_vertices, eu, ev):
    """Symmetric CSR adjacency with sorted rows from an undirected edge list."""
    deg = np.zeros(n_vertices + 1, dtype=np.int64)
    for i in range(eu.shape[0]):
        deg[eu[i] + 1] += 1
        deg[ev[i] + 1] += 1
    indptr = np.cumsum(deg)
    fill = indptr[:-1].copy()
    indices = np.empty(indptr[-1], dtype=np.int32)
    for i in range(eu.shape[0]):
        u, v = eu[i], ev[i]
        indices[fill[u]] = v
        fill[u] += 1
        indices[fill[v]] = u
        fill[v] += 1
    for u in range(n_vertices):
        indices[indptr[u]:indptr[u + 1]].sort()
    return indptr, indices
