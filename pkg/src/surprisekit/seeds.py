"""Deterministic child-seed derivation.

Randomized steps (permutation trials, dropout passes, mutation candidates)
derive an independent child seed from (parent seed, index) with a
splitmix64-style mixer, so trials can run in any order or in parallel and
still reproduce bit-identically for a fixed parent seed.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 scramble step on a 64-bit integer."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def mix(seed: int, *indices: int) -> int:
    """Derive a child seed from a parent seed and one or more indices."""
    state = splitmix64(seed & _MASK64)
    for idx in indices:
        state = splitmix64(state ^ (idx & _MASK64))
    return state


def float_bits(x: float) -> int:
    """Bit pattern of a float64, for mixing real-valued parameters into seeds."""
    return int(np.float64(x).view(np.uint64))


def rng_for(seed: int, *indices: int) -> np.random.Generator:
    """Generator seeded by ``mix(seed, *indices)``."""
    return np.random.default_rng(mix(seed, *indices))
