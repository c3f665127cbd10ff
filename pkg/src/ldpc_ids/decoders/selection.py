"""Max-priority selection over edges.

:func:`tree_build` / :func:`tree_update` maintain a tournament (winner) tree:
``tree[1]`` holds the id of the edge with the largest ``prio``, leaves sit at
``tree[size + e]`` and padding leaves hold -1. Left subtrees always carry
lower ids, so keeping the left child on equal priority breaks ties towards
the lowest edge id. Each routine returns the number of priority comparisons
it made, for the operation audit.

:func:`linear_argmax` is the exhaustive scan used in audit mode and by tests.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def tree_size(n):
    size = 1
    while size < n:
        size *= 2
    return size


@njit(cache=True, inline="always")
def _winner(prio, a, b):
    if b < 0:
        return a, 0
    if a < 0:
        return b, 0
    if prio[b] > prio[a]:
        return b, 1
    return a, 1


@njit(cache=True)
def tree_build(tree, prio):
    size = len(tree) // 2
    n = len(prio)
    for i in range(size):
        tree[size + i] = i if i < n else -1
    n_cmp = 0
    for i in range(size - 1, 0, -1):
        w, c = _winner(prio, tree[2 * i], tree[2 * i + 1])
        tree[i] = w
        n_cmp += c
    return n_cmp


@njit(cache=True, inline="always")
def tree_update(tree, prio, e):
    """Re-establish winners on the path above leaf ``e`` after ``prio[e]`` changed."""
    size = len(tree) // 2
    i = (size + e) >> 1
    n_cmp = 0
    while i >= 1:
        old = tree[i]
        w, c = _winner(prio, tree[2 * i], tree[2 * i + 1])
        n_cmp += c
        tree[i] = w
        # above here nothing changes unless this node's winner or its priority did
        if w == old and w != e:
            break
        i >>= 1
    return n_cmp


@njit(cache=True)
def linear_argmax(prio):
    """Lowest-id maximum; always ``len(prio) - 1`` comparisons."""
    best = 0
    top = prio[0]
    for e in range(1, len(prio)):
        if prio[e] > top:
            top = prio[e]
            best = e
    return best


class ResidualTable:
    """Per-edge residuals, commit counts and max selection.

    ``priority(e)`` is ``weight * decay**update_count[e] * residual[e]``, where
    ``weight`` carries the per-row layer factor of the weighted schedule.
    """

    def __init__(self, n_edges: int, decay: float = 1.0):
        if not 0.0 < decay <= 1.0:
            raise ValueError(f"decay must lie in (0, 1], got {decay}")
        self.decay = decay
        self.residual = np.zeros(n_edges)
        self.update_count = np.zeros(n_edges, dtype=np.int64)
        self.prio = np.zeros(n_edges)
        self.tree = np.empty(2 * tree_size(n_edges), dtype=np.int64)
        self.comparisons = int(tree_build(self.tree, self.prio))

    def __len__(self) -> int:
        return len(self.residual)

    def priority(self, e: int) -> float:
        return float(self.prio[e])

    def set(self, e: int, residual: float, weight: float = 1.0) -> None:
        if residual < 0:
            raise ValueError("residuals are nonnegative")
        self.residual[e] = residual
        self.prio[e] = weight * self.decay ** self.update_count[e] * residual
        self.comparisons += int(_update(self.tree, self.prio, e))

    def commit(self, e: int) -> None:
        self.update_count[e] += 1
        self.residual[e] = 0.0
        self.prio[e] = 0.0
        self.comparisons += int(_update(self.tree, self.prio, e))

    def argmax(self) -> int:
        return int(self.tree[1])

    def argmax_linear(self) -> int:
        self.comparisons += len(self.prio) - 1
        return int(linear_argmax(self.prio))


@njit(cache=True)
def _update(tree, prio, e):
    return tree_update(tree, prio, e)
