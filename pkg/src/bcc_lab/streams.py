"""Deterministic RNG stream derivation.

Every experiment derives its generators from a single 64-bit root seed
through ``stream_rng(root_seed, *path)``.  The path is a sequence of
labels (strings or ints); strings are hashed to 64-bit ints with
blake2s, so the mapping is stable across platforms and sessions.
Independent trials use paths that differ only in the trial index, which
makes trial dispatch order-independent: running trials sequentially,
shuffled, or on a worker pool yields identical per-trial results.
"""

from __future__ import annotations

import hashlib

import numpy as np

DEFAULT_ROOT_SEED = 20250217


def _as_entropy(part: int | str) -> int:
    if isinstance(part, str):
        digest = hashlib.blake2s(part.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "big")
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFFFFFFFFFF
    raise TypeError(f"stream path parts must be int or str, got {type(part)!r}")


def stream_seed_sequence(root_seed: int, *path: int | str) -> np.random.SeedSequence:
    entropy = [_as_entropy(root_seed)] + [_as_entropy(p) for p in path]
    return np.random.SeedSequence(entropy)


def stream_rng(root_seed: int, *path: int | str) -> np.random.Generator:
    """Generator for the stream named by (root_seed, *path)."""
    return np.random.default_rng(stream_seed_sequence(root_seed, *path))
