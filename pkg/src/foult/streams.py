"""Reproducible random substreams and a deterministic parallel map.

Every stochastic routine in the package draws from a substream identified by
(master seed, path index, stream index).  Substreams are derived with
numpy's splittable SeedSequence mechanism, so ensembles are identical for
any execution order and any worker count.
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

_MAX_AUTO_WORKERS = 8


def substream(master_seed, path_index=0, stream_index=0):
    """Generator for the (path_index, stream_index) substream of a master seed."""
    seq = np.random.SeedSequence(int(master_seed), spawn_key=(int(path_index), int(stream_index)))
    return np.random.default_rng(seq)


def worker_count(requested=None):
    """Resolve the worker count: explicit argument, else FOULT_THREADS, else auto."""
    if requested is None:
        raw = os.environ.get("FOULT_THREADS", "0")
        try:
            requested = int(raw)
        except ValueError:
            raise ValueError(f"FOULT_THREADS must be an integer, got {raw!r}")
    if requested < 0:
        raise ValueError(f"worker count must be >= 0, got {requested}")
    if requested == 0:
        return min(os.cpu_count() or 1, _MAX_AUTO_WORKERS)
    return requested


def map_indexed(fn, n, workers=None):
    """Apply fn(i) for i in range(n), returning results in index order.

    Work items are independent (each draws from its own substream), so the
    result list is identical for any worker count.
    """
    workers = worker_count(workers)
    if workers == 1 or n <= 1:
        return [fn(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n)))
