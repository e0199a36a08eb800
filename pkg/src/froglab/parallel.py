"""Replicate pool.

Replicate i always draws from substream i of the master seed, and results come
back in replicate order, so any reduction over them is identical for every
thread count.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

ENV_THREADS = "FROGLAB_THREADS"


def default_threads() -> int:
    raw = os.environ.get(ENV_THREADS, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_THREADS} must be an integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{ENV_THREADS} must be positive")
    return n


def _run_chunk(fn: Callable, args: tuple, start: int, stop: int) -> list:
    return [fn(i, *args) for i in range(start, stop)]


def _chunks(total: int, size: int) -> list[tuple[int, int]]:
    return [(s, min(s + size, total)) for s in range(0, total, size)]


def map_replicates(fn: Callable, replicates: int, args: Sequence = (), threads: int | None = None,
                   chunk: int | None = None) -> list:
    """``[fn(i, *args) for i in range(replicates)]``, possibly across processes.

    ``fn`` must be a module-level function so it can be pickled.
    """
    if replicates < 0:
        raise ValueError("replicates must be nonnegative")
    threads = default_threads() if threads is None else threads
    if threads < 1:
        raise ValueError("threads must be positive")
    args = tuple(args)
    if threads == 1 or replicates < 2:
        return _run_chunk(fn, args, 0, replicates)
    size = chunk or max(1, min(1000, -(-replicates // (threads * 8))))
    spans = _chunks(replicates, size)
    out: list = []
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(_run_chunk, fn, args, a, b) for a, b in spans]
        for fut in futures:
            out.extend(fut.result())
    return out
