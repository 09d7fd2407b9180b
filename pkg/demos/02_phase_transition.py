"""Sweep the initial density through the critical value.

Below the critical density the process usually dies inside the start ball;
above it a constant fraction of the graph gets infected within a few rounds.
Run with ``python3 demos/02_phase_transition.py``.
"""

from collections import defaultdict

from girgbp import degree_normalized_kernel_constant, i_infinity
from girgbp.harness import ExperimentConfig, sweep

config = ExperimentConfig(
    n=1e5, nu=1e3, d=2, alpha=2.0, beta=2.5, k=2,
    kernel_c=degree_normalized_kernel_constant(2, 2.0, 2.5),
    sweep_multipliers=(0.1, 1.0, 10.0), seeds=tuple(range(8)))

print(f"critical density {config.rho_c:.4g}; predicted rounds to a constant fraction "
      f"{i_infinity(config.constants):.2f}")
result = sweep(config)

by_mult = defaultdict(list)
for rec in result.records:
    by_mult[rec.rho_multiplier].append(rec)
for m, recs in by_mult.items():
    stalled = sum(r.stalled for r in recs)
    fracs = " ".join(f"{r.fraction:.2f}" for r in recs)
    rounds = [r.rounds_to_10pct for r in recs if r.rounds_to_10pct >= 0]
    print(f"\nrho = {m:g} x critical: {stalled}/{len(recs)} stalled")
    print(f"  final fractions: {fracs}")
    if rounds:
        print(f"  rounds to reach 10%: {rounds}")
