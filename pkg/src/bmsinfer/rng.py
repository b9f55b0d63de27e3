"""Counter-based seed derivation.

Every random component gets its own generator derived from the master seed and
a tuple of keys, so any stage can be re-run in isolation and the result does
not depend on the order in which stages execute.
"""

from __future__ import annotations

import zlib

import numpy as np


def _key(part) -> int:
    if isinstance(part, (bool, np.bool_)):
        return int(part)
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise ValueError(f"seed keys must be non-negative, got {part}")
        return int(part)
    if isinstance(part, float):
        part = repr(part)
    return zlib.crc32(str(part).encode("utf-8"))


def derive_seed(seed: int, *keys) -> int:
    """Return a 63-bit integer seed for the stream identified by ``keys``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(_key(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0]) >> 1


def rng_for(seed: int, *keys) -> np.random.Generator:
    """Independent generator for the stream ``(seed, *keys)``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(_key(k) for k in keys)))
