"""Named, counter-based random streams.

Every consumer of randomness takes an explicit ``numpy.random.Generator``.
Streams are Philox generators keyed by the master seed plus a stream name and
an optional chunk index, so a given (seed, name, index) always yields the same
sequence no matter how work is scheduled across processes.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _name_words(name: str) -> list[int]:
    digest = hashlib.sha256(name.encode()).digest()
    return [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)]


def stream(seed: int, name: str = "main", index: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(*_name_words(name), int(index)))
    return np.random.Generator(np.random.Philox(ss))


def as_generator(rng) -> np.random.Generator:
    """Accept a Generator, an int seed or None."""
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None:
        return stream(0)
    return stream(int(rng))
