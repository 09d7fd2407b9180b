"""Experiment configuration and drivers for sweeps, traces and validation.

Seeds are independent and may be farmed out to worker processes; results
are always returned in the order the seeds were given.
"""

import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np
from scipy import stats

from .bootstrap import BootstrapParams, run as run_bootstrap
from .containment import cut_scaling_estimate, measure_cut_sizes, quarantine
from .errors import ConfigError, InvalidArgument
from .geometry import Ball, Point, ball_radius_for_volume, torus_distances
from .girg import (GirgParams, sample_edges_fast, sample_edges_naive, sample_girg,
                   sample_vertices)
from .predictions import (ModelConstants, critical_density, envelope_ball_lower,
                          envelope_ball_upper, nu_lower, predicted_infection_rounds,
                          weight_cap)
from .weights import fit_tail_slope, sample_weights, validate_tail

__all__ = ["ExperimentConfig", "SweepRecord", "SweepResult", "InfectionTimes",
           "EnvelopeRow", "Check", "load_config", "dump_config", "map_seeds",
           "percolate", "rounds_to_fraction", "sweep", "infection_times", "speed_trace",
           "envelope_respected", "contain", "cut_scaling", "degree_weight_buckets",
           "check_weight_tail", "check_degree_slope", "check_degree_factor",
           "check_neighbour_tail", "count_overweight_vertices", "check_overweight",
           "check_fast_vs_naive", "validate"]

CONFIG_KEYS = ("n", "d", "alpha", "beta", "w_min", "kernel_c", "threshold_C", "k", "nu",
               "rho", "rho_multiplier", "sweep_multipliers", "seeds", "epsilon", "eta",
               "max_rounds")
MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class ExperimentConfig:
    """One JSON document describing a model, a bootstrap and the seeds to run.

    Exactly one of ``rho`` and ``rho_multiplier`` may be set; the latter is
    in units of the critical density.
    """

    n: float
    nu: float
    d: int = 2
    alpha: float = 2.0
    beta: float = 2.5
    w_min: float = 1.0
    kernel_c: float = 1.0
    threshold_C: float = 1.0
    k: int = 2
    rho: Optional[float] = None
    rho_multiplier: Optional[float] = None
    sweep_multipliers: tuple = ()
    seeds: tuple = (0,)
    epsilon: float = 0.1
    eta: float = 0.05
    max_rounds: Optional[int] = None
    output_dir: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if self.rho is not None and self.rho_multiplier is not None:
            raise ConfigError("give either rho or rho_multiplier, not both")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        for s in self.seeds:
            if int(s) != s or not 0 <= s <= MASK64:
                raise ConfigError(f"seeds must be unsigned 64-bit integers, got {s!r}")
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        object.__setattr__(self, "sweep_multipliers",
                           tuple(float(m) for m in self.sweep_multipliers))
        if any(not m >= 0 for m in self.sweep_multipliers):
            raise ConfigError("sweep multipliers must be non-negative")
        if not self.nu > 1 or not self.nu <= self.n:
            raise ConfigError(f"nu must lie in (1, n], got {self.nu}")
        if self.rho_multiplier is not None and not self.rho_multiplier >= 0:
            raise ConfigError("rho_multiplier must be non-negative")
        try:
            self.girg_params
            self.constants
            if self.rho is not None:
                self.bootstrap_params(self.rho)
            else:
                BootstrapParams(self.k, 0.0, self.start_ball, self.max_rounds)
        except InvalidArgument as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def girg_params(self):
        return GirgParams(n=self.n, d=self.d, alpha=self.alpha, beta=self.beta,
                          w_min=self.w_min, c=self.kernel_c, C=self.threshold_C)

    @property
    def constants(self):
        return ModelConstants(nu=self.nu, n=self.n, beta=self.beta, epsilon=self.epsilon,
                              eta=self.eta)

    @property
    def rho_c(self):
        return critical_density(self.constants)

    @property
    def start_ball(self):
        return Ball(Point.origin(self.d), ball_radius_for_volume(self.nu / self.n, self.d))

    def resolved_rho(self, multiplier=None):
        if multiplier is not None:
            return min(multiplier * self.rho_c, 1.0)
        if self.rho is not None:
            return self.rho
        if self.rho_multiplier is not None:
            return min(self.rho_multiplier * self.rho_c, 1.0)
        raise ConfigError("the configuration sets neither rho nor rho_multiplier")

    def bootstrap_params(self, rho=None):
        rho = self.resolved_rho() if rho is None else rho
        return BootstrapParams(self.k, rho, self.start_ball, self.max_rounds)

    def with_seed(self, seed):
        return replace(self, seeds=(int(seed),))

    def to_dict(self):
        out = {}
        for key in CONFIG_KEYS:
            value = getattr(self, key)
            if key in ("rho", "rho_multiplier") and value is None:
                continue
            if key == "alpha" and math.isinf(value):
                value = "inf"
            elif key in ("sweep_multipliers", "seeds"):
                value = list(value)
            out[key] = value
        return out

    @classmethod
    def from_dict(cls, data, output_dir=None):
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        unknown = set(data) - set(CONFIG_KEYS)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        for key in ("n", "nu"):
            if key not in data:
                raise ConfigError(f"missing required key {key!r}")
        kw = dict(data)
        if kw.get("alpha") == "inf":
            kw["alpha"] = math.inf
        for key, value in kw.items():
            if key in ("sweep_multipliers", "seeds"):
                if not isinstance(value, list) or not all(
                        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
                    raise ConfigError(f"{key} must be a list of numbers")
            elif key == "max_rounds" and value is None:
                pass
            elif isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{key} must be a number, got {value!r}")
        for key in ("d", "k"):
            if key in kw and int(kw[key]) != kw[key]:
                raise ConfigError(f"{key} must be an integer")
        return cls(output_dir=output_dir, **kw)


def load_config(path, output_dir=None):
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return ExperimentConfig.from_dict(data, output_dir)


def dump_config(config):
    return json.dumps(config.to_dict(), indent=2) + "\n"


def map_seeds(fn, config, seeds=None, threads=1):
    """``[fn(config, seed) for seed in seeds]``, optionally in worker processes."""
    seeds = list(config.seeds if seeds is None else seeds)
    if threads <= 1 or len(seeds) <= 1:
        return [fn(config, s) for s in seeds]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, [config] * len(seeds), seeds))


def percolate(config, seed, graph=None, rho=None):
    graph = sample_girg(config.girg_params, seed) if graph is None else graph
    return graph, run_bootstrap(graph, config.bootstrap_params(rho), seed)


def rounds_to_fraction(run, n_vertices, fraction=0.1):
    """First round after which at least ``fraction`` of all vertices are active, or -1."""
    target = fraction * n_vertices
    for rec in run.per_round:
        if rec.cumulative_active >= target and rec.cumulative_active > 0:
            return rec.round
    return -1


class SweepRecord(NamedTuple):
    rho_multiplier: float
    seed: int
    fraction: float
    stalled: bool
    rounds_to_10pct: int


@dataclass(frozen=True)
class SweepResult:
    records: tuple

    def for_multiplier(self, m):
        return [r for r in self.records if r.rho_multiplier == m]

    def rows(self):
        return [tuple(r) for r in self.records]


def _sweep_seed(config, seed):
    graph = sample_girg(config.girg_params, seed)
    out = []
    for m in config.sweep_multipliers:
        _, r = percolate(config, seed, graph, rho=config.resolved_rho(m))
        stalled = r.final_active_count == r.per_round[0].cumulative_active
        frac = r.final_active_count / graph.n_vertices if graph.n_vertices else 0.0
        out.append(SweepRecord(m, seed, frac, stalled, rounds_to_fraction(r, graph.n_vertices)))
    return out


def sweep(config, threads=1):
    """One graph per seed, reused for every multiplier; records ordered by
    multiplier then seed."""
    if not config.sweep_multipliers:
        raise ConfigError("sweep_multipliers must not be empty")
    per_seed = map_seeds(_sweep_seed, config, threads=threads)
    records = [per_seed[j][i] for i in range(len(config.sweep_multipliers))
               for j in range(len(config.seeds))]
    return SweepResult(tuple(records))


@dataclass(frozen=True)
class InfectionTimes:
    ids: np.ndarray
    distance: np.ndarray
    weight: np.ndarray
    prediction: np.ndarray
    empirical: np.ndarray
    strict_count: int
    candidate_count: int

    @property
    def errors(self):
        return np.abs(self.empirical - self.prediction)

    @property
    def median_error(self):
        return float(np.median(self.errors)) if self.ids.size else math.nan

    @property
    def p90_error(self):
        return float(np.quantile(self.errors, 0.9)) if self.ids.size else math.nan

    @property
    def spearman(self):
        if self.ids.size < 3:
            return math.nan
        return float(stats.spearmanr(self.prediction, self.empirical).statistic)

    def rows(self):
        return zip(self.ids.tolist(), self.distance, self.weight, self.prediction,
                   self.empirical.tolist())


def infection_times(config, seed, weight_floor=None, domain="relaxed", graph=None):
    """Compare empirical activation rounds with the closed-form predictor.

    Only active vertices outside the start ball with weight at least
    ``weight_floor`` (default ``ln ln n``) are kept.  ``domain="strict"``
    additionally requires the predictor's technical room condition, which
    is empty for most desk-scale parameters; ``candidate_count`` and
    ``strict_count`` report how many vertices each domain admits.
    """
    if domain not in ("relaxed", "strict"):
        raise InvalidArgument(f"domain must be 'relaxed' or 'strict', got {domain!r}")
    if weight_floor is None:
        weight_floor = math.log(math.log(config.n))
    if weight_floor <= config.w_min:
        warnings.warn("weight floor admits bounded-weight vertices, which may be isolated "
                      "with constant probability; their infection times are not predicted",
                      stacklevel=2)
    graph, r = percolate(config, seed, graph)
    center = config.start_ball.center
    dist = torus_distances(graph.positions, center)
    mass = dist ** config.d * config.n
    value, _, in_domain, technical = predicted_infection_rounds(
        mass, graph.weights, config.constants, config.d)
    base = r.active & (graph.weights >= weight_floor)
    relaxed = base & in_domain
    strict = base & technical
    sel = strict if domain == "strict" else relaxed
    ids = np.flatnonzero(sel)
    return InfectionTimes(ids, dist[ids], graph.weights[ids], value[ids],
                          r.infection_round[ids].astype(np.int64),
                          int(strict.sum()), int(relaxed.sum()))


class EnvelopeRow(NamedTuple):
    seed: int
    round: int
    max_active_distance: float
    radius_upper: float
    radius_lower: float
    heavy_count: int
    heavy_fraction_active: float


def speed_trace(config, seed, graph=None):
    """Per-round comparison of the active region with the speed envelopes.

    Heavy vertices of round ``i`` lie in the lower envelope ball and have
    weight at least the lower weight cap of its mass; the last column is the
    fraction of them active by round ``i + 3`` (1.0 when there are none).
    """
    graph, r = percolate(config, seed, graph)
    c = config.constants
    center = config.start_ball.center
    dist = torus_distances(graph.positions, center)
    rows = []
    for rec in r.per_round:
        i = rec.round
        upper = envelope_ball_upper(i, c, center)
        lower = envelope_ball_lower(i, c, center)
        mass = nu_lower(i, c, clip=True)
        cap = weight_cap(mass, c.beta, c.eta, "-")
        heavy = (dist <= lower.radius) & (graph.weights >= cap)
        n_heavy = int(heavy.sum())
        frac = float(r.active_by(i + 3)[heavy].mean()) if n_heavy else 1.0
        rows.append(EnvelopeRow(seed, i, rec.max_active_distance, upper.radius,
                                lower.radius, n_heavy, frac))
    return rows


def envelope_respected(rows):
    return all(row.max_active_distance <= row.radius_upper for row in rows)


def contain(config, seed, round_i, graph=None):
    graph = sample_girg(config.girg_params, seed) if graph is None else graph
    return quarantine(graph, config.bootstrap_params(), round_i, config.constants, seed)


def cut_scaling(config, masses, seeds=None):
    """Fit the growth exponent of boundary cuts of balls with the given masses."""
    seeds = config.seeds if seeds is None else seeds
    graphs = (sample_girg(config.girg_params, s) for s in seeds)
    cuts = measure_cut_sizes(graphs, masses, config.start_ball.center)
    return cut_scaling_estimate(masses, cuts, config.beta, config.d), cuts


# ---- validation suites -------------------------------------------------------


class Check(NamedTuple):
    name: str
    passed: bool
    detail: str


def degree_weight_buckets(graph, w_max=None, min_count=100):
    """Mean degree per dyadic weight bucket ``[w_min 2^j, w_min 2^(j+1))``.

    Returns ``(midpoints, means, counts)`` for buckets with at least
    ``min_count`` vertices whose upper edge does not exceed ``w_max``.
    """
    w_min = graph.params.w_min
    w = graph.weights
    layer = np.floor(np.log2(w / w_min)).astype(np.int64)
    mids, means, counts = [], [], []
    for j in range(int(layer.max()) + 1 if w.size else 0):
        lo, hi = w_min * 2.0 ** j, w_min * 2.0 ** (j + 1)
        if w_max is not None and hi > w_max:
            break
        sel = layer == j
        if sel.sum() >= min_count:
            mids.append(1.5 * lo)
            means.append(graph.degrees[sel].mean())
            counts.append(int(sel.sum()))
    return np.array(mids), np.array(means), np.array(counts)


def check_weight_tail(config, seed, size=1_000_000, gamma=0.1):
    rng = np.random.default_rng(seed)
    report = validate_tail(sample_weights(config.girg_params.weight_dist, size, rng),
                           config.girg_params.weight_dist, gamma)
    return Check("weight tail slope", report.passed,
                 f"slope={report.slope:.4f} window=[{report.lower:.2f}, {report.upper:.2f}]")


def check_degree_slope(graph, tol=0.15):
    mids, means, _ = degree_weight_buckets(graph, graph.params.n ** 0.3)
    if len(mids) < 2 or np.any(means <= 0):
        return Check("degree-weight slope", False, "too few populated weight buckets")
    slope = float(np.polyfit(np.log(mids), np.log(means), 1)[0])
    return Check("degree-weight slope", abs(slope - 1.0) <= tol,
                 f"slope={slope:.4f} target=1+-{tol}")


def check_degree_factor(graph, factor=8.0):
    mids, means, _ = degree_weight_buckets(graph)
    ratios = means / mids
    ok = bool(len(ratios)) and bool(np.all((ratios >= 1 / factor) & (ratios <= factor)))
    detail = (f"mean-degree/weight ratios in [{ratios.min():.3g}, {ratios.max():.3g}]"
              if len(ratios) else "no populated buckets")
    return Check(f"degree within factor {factor:g} of weight", bool(ok), detail)


def check_neighbour_tail(graph, tol=0.3):
    """Tail slope of the weight seen from a uniformly random edge endpoint."""
    edges = graph.edges()
    if len(edges) == 0:
        return Check("neighbour weight tail slope", False, "graph has no edges")
    ends = graph.weights[edges.ravel()]
    w_min = graph.params.w_min
    slope = fit_tail_slope(ends, 2.0 * w_min, float(np.quantile(ends, 0.999)))
    target = 2.0 - graph.params.beta
    ok = bool(np.isfinite(slope)) and abs(slope - target) <= tol
    return Check("neighbour weight tail slope", ok,
                 f"slope={slope:.4f} target={target:.2f}+-{tol}")


def count_overweight_vertices(config, seed, eta=0.1):
    """Vertices outside the start ball heavier than the upper weight cap of
    their own distance mass ``||x||^d n``."""
    vs = sample_vertices(config.girg_params, seed)
    dist = torus_distances(vs.positions, config.start_ball.center)
    mass = dist ** config.d * config.n
    outside = dist > config.start_ball.radius
    cap = np.full(mass.shape, np.inf)
    cap[outside] = mass[outside] ** (1.0 / (config.beta - 1.0 - eta))
    return int(np.count_nonzero(outside & (vs.weights >= cap)))


def check_overweight(config, seeds, eta=0.1, quorum=0.9, threads=1):
    counts = map_seeds(_overweight_seed(eta), config, seeds, threads)
    zero = sum(c == 0 for c in counts)
    ok = bool(zero >= quorum * len(counts))
    return Check("no overweight vertex outside the start ball", ok,
                 f"zero in {zero}/{len(counts)} seeds; counts={counts}")


class _overweight_seed:
    # picklable closure for worker processes
    def __init__(self, eta):
        self.eta = eta

    def __call__(self, config, seed):
        return count_overweight_vertices(config, seed, self.eta)


def check_fast_vs_naive(config, n=500, seeds=range(200), alpha_level=0.01):
    """Compare the fast and reference samplers on shared vertex sets.

    Two checks: a two-sample Kolmogorov-Smirnov test on edge counts, and
    per-weight-bucket mean degrees agreeing within three standard errors.
    """
    params = replace(config.girg_params, n=float(n))
    counts_f, counts_n = [], []
    deg_f, deg_n, layers = [], [], []
    for s in seeds:
        vs = sample_vertices(params, s)
        m = len(vs)
        ef = sample_edges_fast(vs, params, s)
        en = sample_edges_naive(vs, params, s)
        counts_f.append(len(ef))
        counts_n.append(len(en))
        deg_f.append(np.bincount(ef.ravel(), minlength=m))
        deg_n.append(np.bincount(en.ravel(), minlength=m))
        layers.append(np.floor(np.log2(vs.weights / params.w_min)).astype(np.int64))
    p_value = float(stats.ks_2samp(counts_f, counts_n).pvalue)
    deg_f, deg_n, layers = map(np.concatenate, (deg_f, deg_n, layers))
    worst = 0.0
    for j in np.unique(layers):
        sel = layers == j
        if sel.sum() < 30:
            continue
        a, b = deg_f[sel], deg_n[sel]
        se = math.sqrt(a.var(ddof=1) / a.size + b.var(ddof=1) / b.size)
        if se > 0:
            worst = max(worst, abs(a.mean() - b.mean()) / se)
        elif a.mean() != b.mean():
            worst = math.inf
    return [Check("fast vs reference edge counts (KS)", p_value >= alpha_level,
                  f"p={p_value:.4f} mean fast={np.mean(counts_f):.1f} "
                  f"reference={np.mean(counts_n):.1f}"),
            Check("fast vs reference bucket degrees", bool(worst <= 3.0),
                  f"largest standardized gap={worst:.2f}")]


def validate(config, threads=1, include_sampler=True):
    """Run every statistical check; the first seed drives single-graph checks."""
    seed = config.seeds[0]
    checks = [check_weight_tail(config, seed)]
    graph = sample_girg(config.girg_params, seed)
    checks += [check_degree_slope(graph), check_degree_factor(graph),
               check_neighbour_tail(graph),
               check_overweight(config, config.seeds, threads=threads)]
    if include_sampler:
        checks += check_fast_vs_naive(config)
    return checks
