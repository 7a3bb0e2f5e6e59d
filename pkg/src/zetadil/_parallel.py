"""Chunked thread-parallel evaluation with schedule-independent results."""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

WORKERS_ENV = "ZETADIL_WORKERS"
CHUNK = 4096


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "").strip()
    if raw:
        n = int(raw)
        if n < 1:
            raise ValueError(f"{WORKERS_ENV} must be >= 1, got {n}")
        return n
    return os.cpu_count() or 1


def map_chunks(func, points: np.ndarray, chunk: int = CHUNK, workers=None):
    """Apply ``func`` to fixed-size chunks of a 1-D array and concatenate.

    Chunk boundaries depend only on ``chunk``, and ``func`` must compute each
    point independently, so the output never depends on the worker count.
    ``func`` returns a tuple of arrays aligned with its input.
    """
    points = np.asarray(points)
    bounds = [(i, min(i + chunk, points.size)) for i in range(0, points.size, chunk)]
    if not bounds:
        return func(points)
    workers = worker_count() if workers is None else workers
    parts = [points[i:j] for i, j in bounds]
    if workers == 1 or len(parts) == 1:
        results = [func(p) for p in parts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(func, parts))
    return tuple(np.concatenate(cols) for cols in zip(*results))
