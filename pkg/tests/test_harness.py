import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from girgbp import ConfigError, GirgParams, init_bootstrap, sample_girg
from girgbp.cli import main
from girgbp.csvio import load_graph, read_infection, read_table, write_graph
from girgbp.harness import (ExperimentConfig, check_degree_factor, dump_config,
                            infection_times, load_config, speed_trace, sweep)

C_NORM = 1 / 576


def write_config(tmp_path, **kw):
    data = {"n": 2000, "nu": 100, "kernel_c": C_NORM, "rho_multiplier": 10, "seeds": [1, 2]}
    data.update(kw)
    data = {k: v for k, v in data.items() if v is not None}
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data))
    return str(path)


def run_cli(*argv):
    return main([str(a) for a in argv])


# ---- configuration -----------------------------------------------------------

def test_config_roundtrip_examples(tmp_path):
    cfg = ExperimentConfig(n=1e5, nu=1e3, alpha=math.inf, rho=0.01, sweep_multipliers=(0.1, 1),
                           seeds=(3, 2 ** 64 - 1), max_rounds=7)
    path = tmp_path / "c.json"
    path.write_text(dump_config(cfg))
    assert load_config(str(path)) == cfg
    assert json.loads(dump_config(cfg))["alpha"] == "inf"


@settings(max_examples=100, deadline=None)
@given(n=st.floats(10, 1e9), d=st.integers(1, 4), beta=st.floats(2.01, 2.99),
       alpha=st.one_of(st.just(math.inf), st.floats(1.01, 10)), mult=st.floats(0, 100),
       seeds=st.lists(st.integers(0, 2 ** 64 - 1), min_size=1, max_size=5),
       sweep_m=st.lists(st.floats(0, 50), max_size=4))
def test_config_roundtrip_property(n, d, beta, alpha, mult, seeds, sweep_m):
    cfg = ExperimentConfig(n=n, nu=min(5.0, n), d=d, beta=beta, alpha=alpha,
                           rho_multiplier=mult, seeds=tuple(seeds),
                           sweep_multipliers=tuple(sweep_m))
    assert ExperimentConfig.from_dict(json.loads(dump_config(cfg))) == cfg


@pytest.mark.parametrize("bad", [
    {"n": 100, "nu": 10, "rho": 0.1, "rho_multiplier": 1},
    {"n": 100, "nu": 10, "seeds": []},
    {"n": 100, "nu": 10, "bogus": 1},
    {"nu": 10},
    {"n": 100, "nu": 200},
    {"n": 100, "nu": 10, "beta": 3.5},
    {"n": 100, "nu": 10, "sweep_multipliers": [-1]},
    {"n": 100, "nu": 10, "k": 1},
    {"n": 100, "nu": 10, "seeds": [-1]},
    {"n": 100, "nu": 10, "alpha": "big"},
])
def test_config_errors(bad):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(bad)


# ---- CSV ---------------------------------------------------------------------

def test_graph_roundtrip_exact(tmp_path):
    p = GirgParams(n=3000, d=3, c=0.01)
    g = sample_girg(p, 7)
    write_graph(g, tmp_path)
    assert load_graph(tmp_path, p) == g
    header, _ = read_table(tmp_path / "vertices.csv")
    assert header == ["id", "weight", "x0", "x1", "x2"]
    assert (tmp_path / "edges.csv").read_text().startswith("u,v\n")


# ---- experiment drivers ------------------------------------------------------

def test_sweep_records(tmp_path):
    cfg = load_config(write_config(tmp_path, sweep_multipliers=[0, 1, 10], seeds=[1, 2, 3]))
    res = sweep(cfg)
    assert len(res.records) == 9
    assert all(r.stalled for r in res.for_multiplier(0.0))
    for r in res.records:
        g = sample_girg(cfg.girg_params, r.seed)
        a0 = init_bootstrap(g, cfg.bootstrap_params(cfg.resolved_rho(r.rho_multiplier)),
                            r.seed).sum()
        assert r.stalled == (r.fraction == a0 / g.n_vertices)
    assert sweep(cfg, threads=2) == res


def test_infection_times_excludes_start_ball(tmp_path):
    cfg = load_config(write_config(tmp_path, n=20000, nu=100))
    res = infection_times(cfg, 1)
    assert np.all(res.distance > cfg.start_ball.radius)
    assert np.all(res.weight >= math.log(math.log(cfg.n)))
    with pytest.warns(UserWarning):
        infection_times(cfg, 1, weight_floor=0.0)


def test_speed_trace_columns(tmp_path):
    cfg = load_config(write_config(tmp_path, n=20000, nu=30))
    rows = speed_trace(cfg, 1)
    assert rows[0].round == 0 and rows[0].max_active_distance <= cfg.start_ball.radius
    assert all(0.0 <= r.heavy_fraction_active <= 1.0 for r in rows)
    assert all(r.radius_lower <= r.radius_upper for r in rows)


def test_degree_factor_check():
    g = sample_girg(GirgParams(n=1e5, c=C_NORM), 0)
    assert check_degree_factor(g).passed


# ---- CLI -----------------------------------------------------------------------

def test_cli_generate(tmp_path, capsys):
    cfg = write_config(tmp_path, n=1000)
    assert run_cli("generate", "--config", cfg, "--out", tmp_path / "a") == 0
    out = capsys.readouterr().out
    m = int(out.split()[0].split("=")[1])
    assert 850 <= m <= 1150
    assert run_cli("generate", "--config", cfg, "--out", tmp_path / "b") == 0
    assert (tmp_path / "a/vertices.csv").read_bytes() == (tmp_path / "b/vertices.csv").read_bytes()
    assert (tmp_path / "a/edges.csv").read_bytes() == (tmp_path / "b/edges.csv").read_bytes()


def test_cli_dimension_mismatch(tmp_path):
    cfg = write_config(tmp_path, n=500)
    assert run_cli("generate", "--config", cfg, "--out", tmp_path / "g") == 0
    cfg3 = write_config(tmp_path, n=500, d=3)
    assert run_cli("percolate", "--config", cfg3, "--graph", tmp_path / "g",
                   "--out", tmp_path / "p") == 1


def test_cli_percolate_rho_zero(tmp_path):
    cfg = write_config(tmp_path, rho_multiplier=None, rho=0.0)
    assert run_cli("percolate", "--config", cfg, "--out", tmp_path) == 0
    _, rows = read_table(tmp_path / "trace.csv")
    assert len(rows) == 1 and rows[0][:3] == ["0", "0", "0"]


def test_cli_percolate_toy_path(tmp_path):
    g = tmp_path / "g"
    g.mkdir()
    (g / "vertices.csv").write_text("id,weight,x0\n0,1,0\n1,1,0.3\n2,1,0.02\n")
    (g / "edges.csv").write_text("u,v\n0,1\n1,2\n")
    cfg = write_config(tmp_path, n=3, nu=1.2, d=1, rho_multiplier=None, rho=1.0)
    assert run_cli("percolate", "--config", cfg, "--graph", g, "--out", tmp_path / "o") == 0
    assert read_infection(tmp_path / "o/infection.csv").tolist() == [0, 1, 0]
    assert (tmp_path / "o/infection.csv").read_text().startswith("id,infection_round\n")


def test_cli_determinism(tmp_path):
    cfg = write_config(tmp_path, sweep_multipliers=[1, 10], seeds=[4, 5, 6])
    outs = []
    for tag, threads in (("a", 1), ("b", 1), ("c", 2)):
        out = tmp_path / tag
        assert run_cli("percolate", "--config", cfg, "--out", out) == 0
        assert run_cli("sweep", "--config", cfg, "--out", out, "--threads", threads) == 0
        outs.append(out)
    for name in ("infection.csv", "trace.csv"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
    assert (outs[0] / "sweep.csv").read_bytes() == (outs[2] / "sweep.csv").read_bytes()
    header, _ = read_table(outs[0] / "sweep.csv")
    assert header == ["rho_multiplier", "seed", "fraction", "stalled", "rounds_to_10pct"]
    header, _ = read_table(outs[0] / "trace.csv")
    assert header == ["round", "newly_active", "cumulative_active", "max_active_distance"]


def test_cli_seed_override(tmp_path):
    cfg = write_config(tmp_path)
    run_cli("percolate", "--config", cfg, "--seed", 2, "--out", tmp_path / "a")
    run_cli("percolate", "--config", cfg, "--seed", 3, "--out", tmp_path / "b")
    assert (tmp_path / "a/infection.csv").read_bytes() != (tmp_path / "b/infection.csv").read_bytes()


def test_cli_predict(tmp_path, capsys):
    cfg = write_config(tmp_path, n=1e9, nu=1e3)
    assert run_cli("predict", "--config", cfg, "--distance", 0.1, "--weight", 10) == 0
    out = capsys.readouterr().out
    values = dict(tok.split("=") for tok in out.split() if tok.count("=") == 1)
    assert float(values["i_infinity"]) == pytest.approx(5.959, abs=2e-3)
    assert float(values["ell"]) == pytest.approx(4.030, abs=1e-3)
    cfg = write_config(tmp_path, n=1e9, nu=1e4)
    run_cli("predict", "--config", cfg)
    assert "rho_c=0.00215443" in capsys.readouterr().out


def test_cli_infection_times(tmp_path, capsys):
    cfg = write_config(tmp_path, n=20000)
    assert run_cli("infection-times", "--config", cfg, "--out", tmp_path, "--weight-floor", 0) == 0
    assert "warning" in capsys.readouterr().err
    header, rows = read_table(tmp_path / "infection_times.csv")
    assert header == ["id", "distance", "weight", "ell_prediction", "empirical_round"]
    assert rows


def test_cli_speed_trace_and_contain(tmp_path):
    cfg = write_config(tmp_path, n=20000, nu=30)
    assert run_cli("speed-trace", "--config", cfg, "--out", tmp_path) == 0
    header, rows = read_table(tmp_path / "envelope.csv")
    assert header[:3] == ["seed", "round", "max_active_distance"]
    assert run_cli("contain", "--config", cfg, "--out", tmp_path, "--round", 1) == 0
    header, rows = read_table(tmp_path / "quarantine.csv")
    assert header == ["seed", "round_i", "nu_upper_i", "cut_size", "interior_edges",
                      "contained", "escaped_before_cut"]
    assert len(rows) == 2
    assert run_cli("contain", "--config", cfg, "--graph", tmp_path / "missing") == 1


def test_cli_error_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 100, "nu": 10, "rho": 0.1, "rho_multiplier": 1}')
    assert run_cli("percolate", "--config", bad) == 1
    bad.write_text("{not json")
    assert run_cli("percolate", "--config", bad) == 1
    cfg = write_config(tmp_path)
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert run_cli("generate", "--config", cfg, "--out", blocker / "sub") == 2


def test_cli_validate_failure_exit(tmp_path, capsys):
    # at this size the overweight-vertex count is typically nonzero: exit 3
    cfg = write_config(tmp_path, n=1e4, nu=10, seeds=[0, 1, 2])
    code = run_cli("validate", "--config", cfg, "--skip-sampler")
    out = capsys.readouterr().out
    assert ("FAIL" in out) == (code == 3)
    assert code in (0, 3)
