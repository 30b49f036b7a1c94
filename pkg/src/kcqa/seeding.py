"""Per-instance random-stream derivation.

Every randomized transform derives an independent 64-bit seed per instance
from (global_seed, qid), so results do not depend on instance order, worker
scheduling, or how many instances precede the current one.
"""

from __future__ import annotations

import random

MASK64 = (1 << 64) - 1

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3

_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15


def fnv1a64(text: str) -> int:
    """64-bit FNV-1a hash of the UTF-8 encoding of ``text``."""
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & MASK64
    return h


def splitmix64(seed: int) -> int:
    """One output of the splitmix64 generator started at ``seed``."""
    z = (seed + _SPLITMIX_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_instance_seed(global_seed: int, qid: str) -> int:
    """Seed for one instance's random stream: splitmix64(global_seed XOR fnv1a64(qid))."""
    return splitmix64((global_seed ^ fnv1a64(qid)) & MASK64)


def instance_rng(global_seed: int, qid: str) -> tuple[int, random.Random]:
    """Derived seed plus a generator seeded with it (the seed goes in the record)."""
    seed = derive_instance_seed(global_seed, qid)
    return seed, random.Random(seed)
