"""CSV serialization of graphs, runs and experiment tables.

Every file has a header row, ``\\n`` line endings and floats written with 17
significant digits, which round-trips IEEE doubles exactly.
"""

import csv
import math
import os

import numpy as np

from .bootstrap import NEVER
from .errors import InvalidArgument
from .girg import VertexSet, graph_from_edges

__all__ = ["fmt_float", "fmt_bool", "write_table", "read_table", "write_graph",
           "load_graph", "write_infection", "read_infection", "write_trace",
           "INFECTION_HEADER", "TRACE_HEADER", "SWEEP_HEADER", "QUARANTINE_HEADER",
           "INFECTION_TIMES_HEADER", "ENVELOPE_HEADER"]

INFECTION_HEADER = ["id", "infection_round"]
TRACE_HEADER = ["round", "newly_active", "cumulative_active", "max_active_distance"]
SWEEP_HEADER = ["rho_multiplier", "seed", "fraction", "stalled", "rounds_to_10pct"]
QUARANTINE_HEADER = ["seed", "round_i", "nu_upper_i", "cut_size", "interior_edges",
                     "contained", "escaped_before_cut"]
INFECTION_TIMES_HEADER = ["id", "distance", "weight", "ell_prediction", "empirical_round"]
ENVELOPE_HEADER = ["seed", "round", "max_active_distance", "radius_upper", "radius_lower",
                   "heavy_count", "heavy_fraction_active"]


def fmt_float(x):
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def fmt_bool(b):
    return "true" if b else "false"


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return fmt_bool(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    return str(v)


def write_table(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def read_table(path):
    """Header and list of string rows."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InvalidArgument(f"{path}: missing header row")
    return rows[0], rows[1:]


def write_graph(graph, directory):
    """Write ``vertices.csv`` and ``edges.csv`` into ``directory``."""
    os.makedirs(directory, exist_ok=True)
    d = graph.vertices.d
    pos, w = graph.positions, graph.weights
    with open(os.path.join(directory, "vertices.csv"), "w", newline="") as fh:
        fh.write(",".join(["id", "weight"] + [f"x{k}" for k in range(d)]) + "\n")
        for i in range(len(w)):
            fh.write(f"{i},{fmt_float(w[i])}," + ",".join(fmt_float(x) for x in pos[i]) + "\n")
    edges = graph.edges()
    with open(os.path.join(directory, "edges.csv"), "w", newline="") as fh:
        fh.write("u,v\n")
        if len(edges):
            fh.write("\n".join(f"{u},{v}" for u, v in edges.tolist()) + "\n")


def load_graph(directory, params):
    """Inverse of ``write_graph``; raises ``InvalidArgument`` if the stored
    dimension differs from ``params.d``."""
    header, rows = read_table(os.path.join(directory, "vertices.csv"))
    d = len(header) - 2
    if header[:2] != ["id", "weight"] or header[2:] != [f"x{k}" for k in range(d)]:
        raise InvalidArgument(f"unexpected vertices.csv header {header}")
    if d != params.d:
        raise InvalidArgument(f"graph has d={d} but the configuration has d={params.d}")
    data = np.array(rows, dtype=np.float64).reshape(-1, d + 2)
    if not np.array_equal(data[:, 0], np.arange(len(data))):
        raise InvalidArgument("vertex ids must be 0..m-1 in order")
    vertices = VertexSet(np.ascontiguousarray(data[:, 2:]), np.ascontiguousarray(data[:, 1]))
    header, rows = read_table(os.path.join(directory, "edges.csv"))
    if header != ["u", "v"]:
        raise InvalidArgument(f"unexpected edges.csv header {header}")
    edges = np.array(rows, dtype=np.int64).reshape(-1, 2)
    return graph_from_edges(params, vertices, edges)


def write_infection(run, path):
    ir = run.infection_round
    write_table(path, INFECTION_HEADER, ((i, int(r)) for i, r in enumerate(ir)))


def read_infection(path):
    header, rows = read_table(path)
    if header != INFECTION_HEADER:
        raise InvalidArgument(f"unexpected infection.csv header {header}")
    out = np.full(len(rows), NEVER, dtype=np.int64)
    for i, r in rows:
        out[int(i)] = int(r)
    return out


def write_trace(run, path):
    write_table(path, TRACE_HEADER, (tuple(r) for r in run.per_round))
