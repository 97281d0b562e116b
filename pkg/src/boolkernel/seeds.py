"""Deterministic seed derivation for reproducible experiments.

All randomness in the package flows through `random.Random` (the
CPython Mersenne Twister) seeded either directly or through
`derive_seed`, which hashes a master seed and a stream label with
SHA-256 and keeps the low 64 bits. Identical (master, label) pairs give
identical streams on any platform.
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(master: int, label: str) -> int:
    digest = hashlib.sha256(f"{master}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def stream(master: int, label: str) -> random.Random:
    return random.Random(derive_seed(master, label))
