"""Counter-based random streams keyed by (seed, sample index).

Every sample draws from its own Philox stream, so ensembles are reproducible
and independent of how samples are distributed over workers.
"""
from __future__ import annotations

import numpy as np


def stream(seed, index):
    """Generator for sample ``index`` of the run seeded with ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss))


def as_generator(rng):
    """Accept ``None``, an int seed or a Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.Generator(np.random.Philox(rng))
