"""Seed derivation and generator construction.

Every random draw in the package goes through :func:`make_rng`, which wraps
numpy's counter-based Philox bit generator. Independent streams for sweep
points and trials come from :func:`derive_seed`, a SplitMix64 chain over the
base seed and the integer indices, so results never depend on which worker
ran which trial.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One SplitMix64 step: advance ``x`` by the golden gamma and finalize."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(base_seed: int, *indices: int) -> int:
    """Mix ``base_seed`` with a tuple of indices into a 64-bit seed."""
    h = splitmix64(int(base_seed) & _MASK)
    for idx in indices:
        h = splitmix64(h ^ (int(idx) & _MASK))
    return h


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed) & _MASK))
