"""Command-line entry point ``girgbp``.

Exit codes: 0 success, 1 invalid configuration or arguments (including a
missing or mismatched graph), 2 other I/O failures, 3 failed validation.
"""

import argparse
import math
import os
import sys
import warnings

from . import csvio
from .errors import ConfigError, InvalidArgument
from .girg import sample_girg
from .harness import (contain, envelope_respected, infection_times, load_config,
                      map_seeds, percolate, speed_trace, sweep, validate)
from .predictions import (i_infinity, log_nu_lower, nu_lower, nu_upper,
                          predicted_infection_round)

EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_VALIDATION = 3


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _out_dir(args):
    out = args.out or "."
    try:
        os.makedirs(out, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create output directory {out}: {exc}", EXIT_IO) from exc
    return out


def _config(args):
    if not args.config:
        raise CliError("--config is required", EXIT_CONFIG)
    try:
        config = load_config(args.config, args.out)
    except OSError as exc:
        raise CliError(f"cannot read config: {exc}", EXIT_CONFIG) from exc
    if args.seed is not None:
        config = config.with_seed(args.seed)
    return config


def _graph(args, config, seed):
    if not getattr(args, "graph", None):
        return sample_girg(config.girg_params, seed)
    if not os.path.isdir(args.graph):
        raise CliError(f"graph directory not found: {args.graph}", EXIT_CONFIG)
    try:
        return csvio.load_graph(args.graph, config.girg_params)
    except FileNotFoundError as exc:
        raise CliError(f"graph file missing: {exc.filename}", EXIT_CONFIG) from exc
    except (ValueError, IndexError) as exc:
        # dimension mismatch or malformed rows
        raise CliError(f"cannot load graph: {exc}", EXIT_CONFIG) from exc


def cmd_generate(args):
    config = _config(args)
    seed = config.seeds[0]
    graph = sample_girg(config.girg_params, seed)
    csvio.write_graph(graph, _out_dir(args))
    wmax = float(graph.weights.max()) if graph.n_vertices else 0.0
    print(f"vertices={graph.n_vertices} edges={graph.n_edges} max_weight={wmax:.6g}")


def cmd_percolate(args):
    config = _config(args)
    seed = config.seeds[0]
    graph = _graph(args, config, seed)
    _, run = percolate(config, seed, graph)
    out = _out_dir(args)
    csvio.write_infection(run, os.path.join(out, "infection.csv"))
    csvio.write_trace(run, os.path.join(out, "trace.csv"))
    frac = run.final_active_count / graph.n_vertices if graph.n_vertices else 0.0
    note = " (stopped at max_rounds)" if run.hit_max_rounds else ""
    print(f"fraction={frac:.6g} rounds={run.rounds_executed}{note}")


def cmd_sweep(args):
    config = _config(args)
    result = sweep(config, threads=args.threads)
    out = _out_dir(args)
    csvio.write_table(os.path.join(out, "sweep.csv"), csvio.SWEEP_HEADER, result.rows())
    for m in config.sweep_multipliers:
        recs = result.for_multiplier(m)
        stalled = sum(r.stalled for r in recs)
        mean = sum(r.fraction for r in recs) / len(recs)
        print(f"multiplier={m:g} stalled={stalled}/{len(recs)} mean_fraction={mean:.4g}")


def cmd_predict(args):
    config = _config(args)
    c = config.constants
    print(f"rho_c={config.rho_c:.6g}")
    try:
        print(f"i_infinity={i_infinity(c):.6g}")
    except InvalidArgument as exc:
        print(f"i_infinity=undefined ({exc})")
    if args.distance is not None and args.weight is not None:
        x = [args.distance] + [0.0] * (config.d - 1)
        pred = predicted_infection_round(x, args.weight, c)
        flag = "in-domain" if pred.in_domain else "OUT-OF-DOMAIN"
        strict = "holds" if pred.technical_condition else "fails"
        print(f"ell={pred.value:.6g} branch={pred.branch} {flag} room-condition={strict}")
    print("i,nu_lower,nu_upper,nu_lower_clipped,nu_upper_clipped")
    i = 0
    while True:
        print(f"{i},{nu_lower(i, c):.6g},{nu_upper(i, c):.6g},"
              f"{nu_lower(i, c, clip=True):.6g},{nu_upper(i, c, clip=True):.6g}")
        if log_nu_lower(i, c) >= math.log(c.n) or i >= 64:
            break
        i += 1


def cmd_infection_times(args):
    config = _config(args)
    seed = config.seeds[0]
    graph = _graph(args, config, seed)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = infection_times(config, seed, args.weight_floor, args.domain, graph)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    out = _out_dir(args)
    csvio.write_table(os.path.join(out, "infection_times.csv"),
                      csvio.INFECTION_TIMES_HEADER, res.rows())
    print(f"compared={res.ids.size} strict_domain={res.strict_count} "
          f"relaxed_domain={res.candidate_count}")
    print(f"median_abs_error={res.median_error:.4g} p90_abs_error={res.p90_error:.4g} "
          f"spearman={res.spearman:.4g}")


def _trace_seed(config, seed):
    return speed_trace(config, seed)


def cmd_speed_trace(args):
    config = _config(args)
    if args.graph:
        seed = config.seeds[0]
        traces = [speed_trace(config, seed, _graph(args, config, seed))]
    else:
        traces = map_seeds(_trace_seed, config, threads=args.threads)
    out = _out_dir(args)
    rows = [tuple(r) for t in traces for r in t]
    csvio.write_table(os.path.join(out, "envelope.csv"), csvio.ENVELOPE_HEADER, rows)
    ok = sum(envelope_respected(t) for t in traces)
    print(f"upper envelope respected in {ok}/{len(traces)} seeds")


class _ContainSeed:
    def __init__(self, round_i):
        self.round_i = round_i

    def __call__(self, config, seed):
        return contain(config, seed, self.round_i)


def cmd_contain(args):
    config = _config(args)
    if args.round < 0:
        raise CliError("--round must be non-negative", EXIT_CONFIG)
    if args.graph:
        seed = config.seeds[0]
        reports = [contain(config, seed, args.round, _graph(args, config, seed))]
        seeds = [seed]
    else:
        reports = map_seeds(_ContainSeed(args.round), config, threads=args.threads)
        seeds = list(config.seeds)
    out = _out_dir(args)
    rows = [(s, r.round_i, r.nu_upper_i, r.cut_size, r.interior_edge_count, r.contained,
             r.escaped_before_cut) for s, r in zip(seeds, reports)]
    csvio.write_table(os.path.join(out, "quarantine.csv"), csvio.QUARANTINE_HEADER, rows)
    print(f"contained in {sum(r.contained for r in reports)}/{len(reports)} seeds")


def cmd_validate(args):
    config = _config(args)
    checks = validate(config, threads=args.threads, include_sampler=not args.skip_sampler)
    for ch in checks:
        print(f"{'PASS' if ch.passed else 'FAIL'}  {ch.name}: {ch.detail}")
    if not all(ch.passed for ch in checks):
        raise CliError("validation failed", EXIT_VALIDATION)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="girgbp", description="Bootstrap percolation on geometric inhomogeneous random graphs")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment configuration")
    common.add_argument("--seed", type=int, help="use this seed instead of the configured ones")
    common.add_argument("--out", help="output directory (default: current directory)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker processes for per-seed parallelism")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text, graph=False):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=fn)
        if graph:
            p.add_argument("--graph", help="directory with vertices.csv and edges.csv")
        return p

    add("generate", cmd_generate, "sample a graph and write it as CSV")
    add("percolate", cmd_percolate, "run the process once", graph=True)
    add("sweep", cmd_sweep, "sweep the initial density over multiples of rho_c")
    p = add("predict", cmd_predict, "print closed-form predictions")
    p.add_argument("--distance", type=float, help="max-norm distance from the centre")
    p.add_argument("--weight", type=float, help="vertex weight")
    p = add("infection-times", cmd_infection_times,
            "compare predicted and empirical activation rounds", graph=True)
    p.add_argument("--weight-floor", type=float, default=None,
                   help="minimum weight of compared vertices (default ln ln n)")
    p.add_argument("--domain", choices=("relaxed", "strict"), default="relaxed")
    add("speed-trace", cmd_speed_trace, "per-round envelope diagnostics", graph=True)
    p = add("contain", cmd_contain, "quarantine by cutting an envelope boundary", graph=True)
    p.add_argument("--round", type=int, default=2, help="round after which to cut")
    p = add("validate", cmd_validate, "statistical checks of the model and sampler")
    p.add_argument("--skip-sampler", action="store_true",
                   help="skip the fast-vs-reference sampler comparison")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None and not 0 <= args.seed < 2 ** 64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_CONFIG
    try:
        args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ConfigError, InvalidArgument) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
