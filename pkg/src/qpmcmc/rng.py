"""Reproducible random streams.

Every experiment derives its streams from a single 64-bit seed. A stream for
``(seed, experiment, replicate)`` is obtained by hashing the experiment label
into an integer and feeding all three into :class:`numpy.random.SeedSequence`,
so replicate ``k`` of an experiment is the same regardless of how many other
replicates ran, or in which order.
"""

from __future__ import annotations

import zlib

import numpy as np

SEED_MASK = (1 << 64) - 1


def _label_key(label: str | int) -> int:
    if isinstance(label, (int, np.integer)):
        return int(label) & SEED_MASK
    return zlib.crc32(str(label).encode("utf-8"))


def seed_sequence(seed: int, *labels: str | int) -> np.random.SeedSequence:
    entropy = [int(seed) & SEED_MASK] + [_label_key(label) for label in labels]
    return np.random.SeedSequence(entropy)


def make_rng(seed: int, *labels: str | int) -> np.random.Generator:
    """Generator for the stream identified by ``(seed, *labels)``."""
    return np.random.default_rng(seed_sequence(seed, *labels))


def spawn(rng_or_seq: np.random.Generator | np.random.SeedSequence, n: int) -> list[np.random.Generator]:
    """Split a stream into ``n`` independent child generators."""
    if isinstance(rng_or_seq, np.random.SeedSequence):
        return [np.random.default_rng(s) for s in rng_or_seq.spawn(n)]
    return list(rng_or_seq.spawn(n))


def uniform_index(rng: np.random.Generator, k: int) -> int:
    """Uniform draw from ``{0..k-1}`` via one double; several times cheaper
    than ``Generator.integers`` in scalar hot loops."""
    return min(int(rng.random() * k), k - 1)


def derive_seed(seed: int, *labels: str | int) -> int:
    """64-bit integer seed for the stream ``(seed, *labels)``."""
    return int(seed_sequence(seed, *labels).generate_state(1, np.uint64)[0])
