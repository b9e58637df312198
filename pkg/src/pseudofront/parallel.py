"""Chunked thread-pool map; the worker count comes from PSEUDOFRONT_THREADS."""

import os
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "PSEUDOFRONT_THREADS"


def thread_count(default=1):
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return default
    try:
        n = int(raw)
    except ValueError:
        return default
    return max(1, n)


def chunk_slices(n, chunk):
    return [slice(s, min(s + chunk, n)) for s in range(0, n, chunk)]


def chunked_map(fn, n, chunk=4096, threads=None):
    """Apply ``fn(slice)`` over ``range(n)`` in chunks; results in chunk order."""
    slices = chunk_slices(n, chunk)
    threads = thread_count() if threads is None else max(1, int(threads))
    if threads == 1 or len(slices) == 1:
        return [fn(s) for s in slices]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, slices))
