"""Reproducible parallel random streams.

Each Monte Carlo sample gets its own generator derived from (master seed,
sample index), so results are identical for any worker partition and any
evaluation order.
"""

from __future__ import annotations

import numpy as np


def master_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed))


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for one sample, stable across worker counts."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(index,))
    )
