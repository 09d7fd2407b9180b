"""Bootstrap percolation on geometric inhomogeneous random graphs.

Sampling (``girg``), the activation process (``bootstrap``), closed-form
predictions (``predictions``), quarantine cuts (``containment``) and the
experiment drivers behind the ``girgbp`` command (``harness``).
"""

from .bootstrap import (NEVER, BootstrapParams, PercolationRun, RoundRecord,
                        infection_fraction, init_bootstrap, resume, run, step)
from .containment import (CutScalingFit, QuarantineReport, boundary_cut,
                          cut_scaling_estimate, interior_edge_count, measure_cut_sizes,
                          predicted_cut_exponent, quarantine, remove_edges)
from .errors import ConfigError, InsufficientData, InvalidArgument
from .geometry import (Ball, Point, ball_radius_for_volume, ball_volume, contains,
                       contains_points, full_torus, torus_distance, torus_distances)
from .girg import (INFINITY, GirgParams, Graph, Vertex, VertexSet,
                   degree_normalized_kernel_constant, edge_probabilities, edge_probability,
                   graph_from_edges, sample_edges_fast, sample_edges_naive, sample_girg,
                   sample_vertices)
from .harness import ExperimentConfig, SweepResult, load_config
from .predictions import (ModelConstants, critical_density, envelope_ball_lower,
                          envelope_ball_upper, i_infinity, nu_lower, nu_upper,
                          predicted_infection_round, predicted_infection_rounds, weight_cap)
from .weights import (WeightDist, sample_weight, sample_weights, tail_probability,
                      validate_tail)

__version__ = "0.1.0"
