"""Seed handling for reproducible sampling.

All stochastic operations take either an integer seed, a
``numpy.random.SeedSequence`` or a ready ``Generator``. Monte Carlo
drivers derive one child stream per iteration from the master seed, so
results are bit-identical no matter how iterations are scheduled across
workers.
"""

from __future__ import annotations

import numpy as np

SeedLike = "int | np.random.SeedSequence | np.random.Generator"


def as_generator(seed) -> np.random.Generator:
    """Return a Generator for an int seed, a SeedSequence or a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    return np.random.default_rng(int(seed))


def as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        raise TypeError("cannot derive substreams from a live Generator; pass a seed")
    return np.random.SeedSequence(int(seed))


def substreams(seed, n: int) -> list[np.random.SeedSequence]:
    """n independent child streams, deterministic in (seed, n ordering)."""
    return as_seed_sequence(seed).spawn(n)
