"""Semi-discrete systems split into unknown and Dirichlet parts.

Assemblies address every grid node (i, j), 0 <= i, j <= N+1, through the
extended index i*(N+2) + j.  Only rows of interior cells are kept; columns are
split into the N^2 unknowns (row-major, matching the unknown vector
[U_11, U_12, ..., U_1N, U_21, ..., U_NN]) and the Dirichlet boundary nodes, so
the boundary vector at any time level is one sparse mat-vec.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np
import scipy.sparse as sps

from .grid import TensorGrid
from .linalg import SparseOperator


class BoundaryProvider(Protocol):
    def __call__(self, x: np.ndarray, y: np.ndarray, tau: float) -> np.ndarray: ...


def ext_index(grid: TensorGrid, i, j):
    return np.asarray(i) * (grid.n + 2) + np.asarray(j)


def _node_maps(n: int):
    m = n + 2
    ii, jj = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    ii, jj = ii.ravel(), jj.ravel()
    interior = (ii >= 1) & (ii <= n) & (jj >= 1) & (jj <= n)
    to_int = np.full(m * m, -1, dtype=np.int64)
    to_int[interior] = (ii[interior] - 1) * n + (jj[interior] - 1)
    bnd = np.flatnonzero(~interior)
    to_bnd = np.full(m * m, -1, dtype=np.int64)
    to_bnd[bnd] = np.arange(bnd.size)
    return to_int, to_bnd, ii[bnd], jj[bnd]


@dataclass(frozen=True)
class SplitOperator:
    """Operator acting on interior unknowns plus a map from boundary data."""

    grid: TensorGrid
    interior: SparseOperator
    boundary: sps.csr_matrix
    boundary_i: np.ndarray
    boundary_j: np.ndarray

    @classmethod
    def from_ext_triplets(cls, grid: TensorGrid, rows, cols, vals) -> "SplitOperator":
        """Build from triplets in extended indices; rows must be interior cells."""
        n = grid.n
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        vals = np.asarray(vals, dtype=float).ravel()
        to_int, to_bnd, bi, bj = _node_maps(n)
        r = to_int[rows]
        if np.any(r < 0):
            raise IndexError("assembly produced a row for a boundary node")
        ci = to_int[cols]
        is_int = ci >= 0
        a = sps.coo_matrix((vals[is_int], (r[is_int], ci[is_int])), shape=(n * n, n * n)).tocsr()
        b = sps.coo_matrix(
            (vals[~is_int], (r[~is_int], to_bnd[cols[~is_int]])), shape=(n * n, bi.size)
        ).tocsr()
        for m in (a, b):
            m.sum_duplicates()
            m.eliminate_zeros()
        return cls(grid, SparseOperator(a), b, bi, bj)

    def __add__(self, other: "SplitOperator") -> "SplitOperator":
        return SplitOperator(
            self.grid,
            self.interior + other.interior,
            (self.boundary + other.boundary).tocsr(),
            self.boundary_i,
            self.boundary_j,
        )

    def boundary_points(self) -> tuple[np.ndarray, np.ndarray]:
        return self.grid.axis_x.nodes[self.boundary_i], self.grid.axis_y.nodes[self.boundary_j]

    def boundary_vector(self, bc: Callable, tau: float = 0.0) -> np.ndarray:
        x, y = self.boundary_points()
        return self.boundary @ np.asarray(bc(x, y, tau), dtype=float)

    def with_boundary(self, bc: Callable, tau: float = 0.0) -> tuple[SparseOperator, np.ndarray]:
        return self.interior, self.boundary_vector(bc, tau)

    def ext_row(self, i: int, j: int) -> dict[tuple[int, int], float]:
        """Row of cell (i, j) keyed by node (k, l), boundary nodes included."""
        n = self.grid.n
        k = (i - 1) * n + (j - 1)
        out = {}
        for col, v in self.interior.row(k).items():
            out[(col // n + 1, col % n + 1)] = v
        b = self.boundary
        for pos in range(b.indptr[k], b.indptr[k + 1]):
            c = b.indices[pos]
            key = (int(self.boundary_i[c]), int(self.boundary_j[c]))
            out[key] = out.get(key, 0.0) + float(b.data[pos])
        return out
