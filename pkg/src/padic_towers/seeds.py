"""Deterministic stream splitting for seeded randomness.

Every consumer of randomness draws from a substream derived from the master
seed and a stable string key, so results do not depend on evaluation order.
"""
from __future__ import annotations

import hashlib
import random


def substream(seed: int, *key: object) -> random.Random:
    """Return an RNG keyed by ``seed`` and a stable tuple of key parts."""
    material = "|".join(str(part) for part in key)
    digest = hashlib.sha256(f"{seed}|{material}".encode()).digest()
    return random.Random(int.from_bytes(digest[:16], "big"))
