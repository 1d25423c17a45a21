"""Deterministic random streams.

Every stream is derived from one root seed through ``SeedSequence`` spawn
keys and drives a counter-based Philox generator, so a stream depends only
on ``(seed, key)`` and never on scheduling order.
"""

from __future__ import annotations

import zlib

import numpy as np


def _key(part) -> int:
    if isinstance(part, int):
        return part
    return zlib.crc32(str(part).encode())


def stream(seed: int, *key) -> np.random.Generator:
    """Generator for the sub-stream ``key`` (ints or strings) of ``seed``."""
    ss = np.random.SeedSequence(seed, spawn_key=tuple(_key(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))
