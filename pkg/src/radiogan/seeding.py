"""Deterministic random-stream derivation shared by every sampling code path.

All randomness in the package flows from one integer seed through named
substreams, so that independent concerns (SNR schedule, latent draws, dropout
masks, ...) never perturb each other and every run is exactly reproducible.
"""

from __future__ import annotations

import zlib

import numpy as np


def substream(seed: int, *labels: str) -> np.random.Generator:
    """Return an independent generator for the given seed and label path.

    The same ``(seed, labels)`` pair always yields a generator in an identical
    state, across runs and platforms; distinct label paths yield statistically
    independent streams.
    """
    key = tuple(zlib.crc32(label.encode("utf-8")) for label in labels)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def as_generator(seed: int | np.random.Generator) -> np.random.Generator:
    """Coerce an integer seed (or pass through a Generator) to a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
