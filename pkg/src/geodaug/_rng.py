"""Seeded random number generation.

All stochastic operations in this package take an explicit seed (or an
already-constructed Generator) and route through these helpers, so results
are bit-reproducible across runs and batch-level work can be forked into
independent streams.
"""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np

SeedLike = Union[int, np.random.Generator, np.random.SeedSequence]


def make_rng(seed: SeedLike) -> np.random.Generator:
    """Build a counter-based (Philox) generator from a seed.

    Passing an existing Generator returns it unchanged, which lets callers
    thread one stream through a pipeline.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    if not isinstance(seed, (int, np.integer)):
        raise ValueError(f"seed must be an int, Generator or SeedSequence, got {type(seed).__name__}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def spawn_rngs(seed: SeedLike, n: int) -> Sequence[np.random.Generator]:
    """Fork `n` independent generators from one seed.

    Children are derived through SeedSequence spawning, so distinct batches
    never share a stream regardless of how many draws each consumes.
    """
    if isinstance(seed, np.random.Generator):
        # Fork from the generator's own bit stream.
        children = seed.bit_generator.seed_seq.spawn(n)  # type: ignore[union-attr]
    else:
        base = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(int(seed))
        children = base.spawn(n)
    return [np.random.Generator(np.random.Philox(c)) for c in children]
