"""Stop an outbreak by cutting the edges around a predicted envelope.

A tiny start region (nu = 4) keeps the upper envelope smaller than the
torus for one round, so the cut is real.  Run with
``python3 demos/04_quarantine.py``.
"""

from girgbp import degree_normalized_kernel_constant, nu_upper, predicted_cut_exponent
from girgbp.harness import ExperimentConfig, contain, cut_scaling

config = ExperimentConfig(
    n=2e5, nu=4.0, d=2, alpha=2.0, beta=2.5, k=2, rho=1.0,
    kernel_c=degree_normalized_kernel_constant(2, 2.0, 2.5), seeds=tuple(range(6)))

print(f"upper envelope mass after round 1: {nu_upper(1, config.constants):.0f} "
      f"of {config.n:.0f}")
for seed in config.seeds:
    rep = contain(config, seed, round_i=1)
    print(f"seed {seed}: cut {rep.cut_size:5d} edges vs {rep.interior_edge_count:6d} inside, "
          f"contained={rep.contained}, escaped before the cut={rep.escaped_before_cut}, "
          f"final active {rep.final_active_count}")

fit, cuts = cut_scaling(config, masses=[1e2, 1e3, 1e4, 1e5], seeds=range(3))
print(f"\nmean cut sizes {[round(x) for x in cuts]}")
print(f"fitted growth exponent {fit.slope:.2f}; predicted "
      f"{predicted_cut_exponent(config.beta, config.d):.2f}")
