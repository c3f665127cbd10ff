"""Edge-indexed Tanner graph view of a parity-check matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import ParityCheckMatrix


@dataclass(frozen=True, eq=False)
class TannerGraph:
    """Bipartite check/variable adjacency with dense edge ids.

    Edge ids follow a row-major scan of H, so the edges of check ``i`` are the
    contiguous range ``check_ptr[i]:check_ptr[i + 1]``. ``var_edges`` lists the
    edges of each variable in ascending check order.
    """

    n_vars: int
    n_checks: int
    edge_check: np.ndarray
    edge_var: np.ndarray
    check_ptr: np.ndarray
    var_ptr: np.ndarray
    var_edges: np.ndarray

    @property
    def n_edges(self) -> int:
        return len(self.edge_var)

    def check_edges(self, i: int) -> np.ndarray:
        return np.arange(self.check_ptr[i], self.check_ptr[i + 1])

    def var_edge_list(self, j: int) -> np.ndarray:
        return self.var_edges[self.var_ptr[j]:self.var_ptr[j + 1]]

    def check_degrees(self) -> np.ndarray:
        return np.diff(self.check_ptr)

    def var_degrees(self) -> np.ndarray:
        return np.diff(self.var_ptr)

    def neighbors_excluding(self, node: int, excluded_edge: int, side: str = "check") -> np.ndarray:
        """Edges incident to ``node`` (a check or a variable) other than ``excluded_edge``."""
        if side == "check":
            edges = self.check_edges(node)
        elif side == "var":
            edges = self.var_edge_list(node)
        else:
            raise ValueError(f"side must be 'check' or 'var', got {side!r}")
        keep = edges != excluded_edge
        if keep.all():
            raise ValueError(f"edge {excluded_edge} is not incident to {side} node {node}")
        return edges[keep]

    def entries(self) -> set[tuple[int, int]]:
        return set(zip(self.edge_check.tolist(), self.edge_var.tolist()))

    def edge_id(self, i: int, j: int) -> int:
        lo, hi = self.check_ptr[i], self.check_ptr[i + 1]
        hit = np.nonzero(self.edge_var[lo:hi] == j)[0]
        if hit.size == 0:
            raise KeyError((i, j))
        return int(lo + hit[0])


def build_graph(h: ParityCheckMatrix) -> TannerGraph:
    if np.any(h.row_degrees() == 0):
        raise ValueError("parity-check matrix has an empty row")
    edge_check = np.repeat(np.arange(h.m, dtype=np.int64), h.row_degrees())
    edge_var = np.asarray(h.row_cols, dtype=np.int64).copy()
    # stable sort keeps ascending check order within each variable
    var_edges = np.argsort(edge_var, kind="stable").astype(np.int64)
    var_ptr = np.zeros(h.n + 1, dtype=np.int64)
    np.cumsum(np.bincount(edge_var, minlength=h.n), out=var_ptr[1:])
    arrays = [edge_check, edge_var, np.asarray(h.row_ptr, dtype=np.int64).copy(), var_ptr, var_edges]
    for a in arrays:
        a.setflags(write=False)
    return TannerGraph(h.n, h.m, *arrays)
