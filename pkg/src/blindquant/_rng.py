"""Seeded random streams.

Every Monte Carlo consumer draws from a substream keyed by integers so that
results do not depend on evaluation order or worker count.
"""

import numpy as np


def make_rng(seed=None):
    """Coerce ``seed`` (int, SeedSequence, Generator or None) to a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.default_rng(seed)


def substream(seed, *keys):
    """Independent generator for the substream ``(seed, *keys)``."""
    entropy = [int(seed)] + [int(k) for k in keys]
    if any(e < 0 for e in entropy):
        raise ValueError("seed and stream keys must be non-negative")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
