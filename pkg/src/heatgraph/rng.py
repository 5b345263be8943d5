"""Seeding helpers.

Every random quantity in the package is derived from a single 64-bit seed.
Independent streams (per experiment cell, per signal batch, ...) are obtained
by spawning namespaced children of the master seed, so results are
bit-reproducible given (seed, config) and safe to draw in parallel.
"""

import numpy as np


def rng_from_seed(seed):
    """Counter-based generator for an integer seed."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def derive_seed(seed, *key):
    """Stable child seed for the (seed, key...) namespace.

    Distinct keys give statistically independent streams; identical keys give
    identical streams.
    """
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
