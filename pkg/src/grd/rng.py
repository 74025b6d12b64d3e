"""Seed derivation for every randomized component.

All randomness flows from a single user-facing seed. Consumers never share
a generator; each derives its own stream from ``(seed, *path)`` where the
path names the purpose (e.g. ``derive_rng(seed, "train-channel", 17)``).
Adding or reordering consumers therefore cannot perturb unrelated streams,
and the same (seed, path) always yields the same stream.
"""

from __future__ import annotations

import zlib

import numpy as np


def _entropy_words(seed: int, path: tuple[str | int, ...]) -> list[int]:
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    words = [int(seed)]
    for part in path:
        if isinstance(part, str):
            words.append(zlib.crc32(part.encode("utf-8")))
        else:
            words.append(int(part) & 0xFFFFFFFF)
    return words


def derive_rng(seed: int, *path: str | int) -> np.random.Generator:
    """Return the generator for the stream named by ``path`` under ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(_entropy_words(seed, path)))


def derive_seed(seed: int, *path: str | int) -> int:
    """Collapse ``(seed, *path)`` to a single derived integer seed."""
    seq = np.random.SeedSequence(_entropy_words(seed, path))
    return int(seq.generate_state(1, np.uint64)[0])
