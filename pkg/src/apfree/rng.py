"""Seeded random streams.

All randomness goes through numpy's Philox4x64-10 counter-based bit
generator, keyed by a SeedSequence built from ``(seed, *stream)``. Distinct
stream tuples give independent generators, so per-trial streams do not
depend on execution order or thread count.
"""

import numpy as np

GENERATOR_ID = "numpy.Philox4x64-10/SeedSequence"


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    entropy = [int(seed), *(int(s) for s in stream)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
