"""Counter-based random numbers keyed by integers.

Every draw is a pure function of ``(seed, stream, a, b)``.  The mixing
function is the SplitMix64 finalizer applied to successive key words, which
makes per-pair and per-vertex draws independent of evaluation order and of
how work is split between workers.
"""

import numpy as np

__all__ = ["mix64", "keyed_bits", "keyed_uniform", "derive_seed",
           "STREAM_EDGES", "STREAM_BOOTSTRAP", "STREAM_VERTICES", "STREAM_FAST"]

STREAM_VERTICES = 1
STREAM_EDGES = 2
STREAM_BOOTSTRAP = 3
STREAM_FAST = 4

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def _u64(x):
    if isinstance(x, (int, np.integer)):
        return np.uint64(int(x) & _MASK64)
    return np.asarray(x).astype(np.uint64)


def mix64(z):
    """SplitMix64 output function; works elementwise on uint64 arrays."""
    z = _u64(z)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def keyed_bits(seed, stream, a, b=0):
    """64 random bits determined by the key ``(seed, stream, a, b)``."""
    with np.errstate(over="ignore"):
        h = mix64(_u64(seed) + _GOLDEN * _u64(stream + 1))
        h = mix64(h ^ (_u64(a) + _GOLDEN))
        h = mix64(h ^ (_u64(b) * _M1 + _GOLDEN))
    return h


def keyed_uniform(seed, stream, a, b=0):
    """Uniform draws in [0, 1) with 53 bits of resolution."""
    bits = keyed_bits(seed, stream, a, b)
    return (bits >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def derive_seed(seed, stream, bits=64):
    """A child seed for a conventional generator (numpy, numba)."""
    h = int(keyed_bits(seed, stream, 0, 0))
    return h >> (64 - bits)
