"""Deterministic reductions and worker-count-independent parallel mapping.

Every summation that defines a library result goes through
``pairwise_sum`` so the floating-point tree shape is fixed by the data
alone.  ``parallel_map`` distributes *independent* work items over a
thread pool and reassembles results in submission order, so outputs are
bit-identical for any worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

WORKERS_ENV = "GRUSHIN_WORKERS"


def default_workers() -> int:
    """Worker count from the GRUSHIN_WORKERS environment variable (default 1)."""
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def pairwise_sum(values, axis: int = 0):
    """Sum along ``axis`` with a fixed-shape binary tree.

    The tree is a function of the axis length only, never of execution
    order, so results are reproducible to the last bit.
    """
    a = np.asarray(values)
    a = np.moveaxis(a, axis, 0)
    if a.shape[0] == 0:
        return np.zeros(a.shape[1:], dtype=a.dtype)
    while a.shape[0] > 1:
        if a.shape[0] % 2:
            a = np.concatenate([a[:-1:2] + a[1::2], a[-1:]], axis=0)
        else:
            a = a[0::2] + a[1::2]
    return a[0]


def pairwise_dot(weights, values):
    """Weighted sum Σ w_i v_i with the pairwise tree (weights broadcast on axis 0)."""
    w = np.asarray(weights)
    v = np.asarray(values)
    return pairwise_sum(v * w.reshape((-1,) + (1,) * (v.ndim - 1)), axis=0)


def parallel_map(fn, items, workers: int | None = None) -> list:
    """Map a pure function over items, preserving order.

    ``fn`` must not mutate shared state.  With ``workers > 1`` the items
    run on a thread pool; the result list is identical to the serial one.
    """
    items = list(items)
    n = default_workers() if workers is None else max(1, int(workers))
    if n == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
