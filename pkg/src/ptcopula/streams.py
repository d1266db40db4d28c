"""Keyed random substreams.

Every stochastic step in a simulation draws from a generator derived from the
root seed plus a tuple key, so results do not depend on the order in which
replications or lines are processed.
"""
from __future__ import annotations

import numpy as np

GENERATOR_NAME = "numpy.PCG64"

# top-level key namespaces
MARGIN = 0
JOINT = 1
META = 2


def substream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def as_generator(rng: np.random.Generator | int | None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)
