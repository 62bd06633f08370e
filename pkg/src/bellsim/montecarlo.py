"""Deterministic chunked Monte Carlo streams.

Seeded sampling operations split the sample index range into fixed chunks
of 65536.  Chunk i draws from an independent Philox stream keyed by
(seed, i), and per-chunk results are combined in chunk index order, so a
result is bit-identical no matter how chunks are scheduled across
workers.  Philox is a 64-bit counter-based generator with a stable bit
stream (pinned via the numpy dependency).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

CHUNK_SIZE = 65536

_R = TypeVar("_R")


def chunk_generator(seed: int, chunk_index: int) -> np.random.Generator:
    """Independent Philox stream for one chunk of one seeded operation."""
    key = np.array([seed % (1 << 64), chunk_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def chunk_sizes(n: int) -> list[int]:
    """Fixed partition of n samples into CHUNK_SIZE-sized chunks."""
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    full, rest = divmod(n, CHUNK_SIZE)
    return [CHUNK_SIZE] * full + ([rest] if rest else [])


def map_chunks(
    n: int,
    seed: int,
    fn: Callable[[np.random.Generator, int], _R],
    workers: int = 1,
) -> list[_R]:
    """Run fn(rng, count) on every chunk; results come back in chunk order.

    The worker count only affects scheduling, never the results.
    """
    jobs = [(chunk_generator(seed, i), c) for i, c in enumerate(chunk_sizes(n))]
    if workers <= 1 or len(jobs) == 1:
        return [fn(rng, count) for rng, count in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(job[0], job[1]), jobs))
