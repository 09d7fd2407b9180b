"""Sample a GIRG and look at its degree structure.

Run with ``python3 demos/01_sampling.py``.
"""

import time

import numpy as np

from girgbp import GirgParams, degree_normalized_kernel_constant, sample_girg
from girgbp.harness import degree_weight_buckets

# A kernel constant that makes the expected degree of a vertex equal its weight.
c = degree_normalized_kernel_constant(d=2, alpha=2.0, beta=2.5)
params = GirgParams(n=200_000, d=2, alpha=2.0, beta=2.5, c=c)

start = time.perf_counter()
g = sample_girg(params, seed=1)
print(f"sampled {g.n_vertices} vertices and {g.n_edges} edges "
      f"in {time.perf_counter() - start:.1f}s")
print(f"heaviest vertex: weight {g.weights.max():.0f}, degree {g.degrees[g.weights.argmax()]}")

# Mean degree per dyadic weight bucket should track the weight itself.
mids, means, counts = degree_weight_buckets(g)
print("\nweight bucket  vertices  mean degree  degree/weight")
for m, d, k in zip(mids, means, counts):
    print(f"{m:13.1f} {k:9d} {d:12.2f} {d / m:14.3f}")

slope = np.polyfit(np.log(mids), np.log(means), 1)[0]
print(f"\nlog-log slope of degree against weight: {slope:.3f}")
