"""Reproducible random streams and worker-count policy.

Every random draw in the package comes from a Philox generator keyed by a
``SeedSequence(seed, spawn_key=ids)``.  A stream is therefore a pure function
of ``(seed, *ids)``, which makes results independent of how work is scheduled
across threads.
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

__all__ = ["substream", "worker_count", "parallel_map"]


def substream(seed: int, *ids: int) -> np.random.Generator:
    """Independent Philox generator for the stream ``(seed, *ids)``."""
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=tuple(int(i) for i in ids))
    return np.random.Generator(np.random.Philox(ss))


def worker_count() -> int:
    """Thread count: ``RVNORM_THREADS`` if set, else the CPU count (max 8)."""
    env = os.environ.get("RVNORM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, min(8, os.cpu_count() or 1))


def parallel_map(fn, items):
    """``list(map(fn, items))`` on a thread pool; output order follows input order."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
