"""
Seeded random sub-streams.

Every consumer (link model, each node's keys, each handshake, traffic) draws
from its own stream derived from the scenario seed and a tag, so adding a
node or a traffic item never shifts another consumer's sequence.
"""

from __future__ import annotations

import random
import zlib

SEED_MASK = (1 << 64) - 1


def _derive_seed(seed: int, tag: str) -> int:
    # Stable across processes; the built-in hash() is salted per run
    crc = zlib.crc32(tag.encode("utf-8")) & 0xFFFFFFFF
    return ((int(seed) & SEED_MASK) << 32) ^ crc


def derive_rng(seed: int, tag: str) -> random.Random:
    return random.Random(_derive_seed(seed, tag))


def derive_bytes(seed: int, tag: str, size: int) -> bytes:
    return derive_rng(seed, tag).getrandbits(8 * size).to_bytes(size, "big")
