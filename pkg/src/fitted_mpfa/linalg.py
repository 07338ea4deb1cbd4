"""Sparse operators and linear solves.

Thin layer over scipy.sparse: triplet accumulation, CSR storage, a reusable LU
factorization and a BiCGSTAB fallback for systems too large to factor.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sps
import scipy.sparse.linalg as spla

logger = logging.getLogger(__name__)


class SolveError(RuntimeError):
    """A linear solve failed or did not reach the residual target."""

    def __init__(self, msg: str, residual: float = float("nan")):
        super().__init__(f"{msg} (residual {residual:.3e})")
        self.residual = residual


class TripletBuffer:
    """Collects (row, col, value) triplets; duplicates are summed on finalize."""

    def __init__(self, size: int):
        self.size = int(size)
        self._rows: list[np.ndarray] = []
        self._cols: list[np.ndarray] = []
        self._vals: list[np.ndarray] = []

    def add(self, rows, cols, vals) -> None:
        rows, cols, vals = np.broadcast_arrays(np.asarray(rows), np.asarray(cols), np.asarray(vals, float))
        self._rows.append(rows.ravel())
        self._cols.append(cols.ravel())
        self._vals.append(vals.ravel())

    def finalize(self) -> "SparseOperator":
        if not self._rows:
            return SparseOperator(sps.csr_matrix((self.size, self.size)))
        return _from_arrays(
            np.concatenate(self._rows), np.concatenate(self._cols), np.concatenate(self._vals), self.size
        )


def _from_arrays(rows, cols, vals, size) -> "SparseOperator":
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    if rows.size and (rows.min() < 0 or cols.min() < 0 or rows.max() >= size or cols.max() >= size):
        raise IndexError(f"triplet index outside 0..{size - 1}")
    mat = sps.coo_matrix((np.asarray(vals, float), (rows, cols)), shape=(size, size)).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()
    return SparseOperator(mat)


def assemble(triplets, size: int) -> "SparseOperator":
    """Build an operator from an iterable of (row, col, value); duplicates add up."""
    trip = list(triplets)
    if not trip:
        return SparseOperator(sps.csr_matrix((size, size)))
    rows, cols, vals = (np.array(t) for t in zip(*trip))
    return _from_arrays(rows, cols, vals, size)


@dataclass(frozen=True)
class SparseOperator:
    matrix: sps.csr_matrix

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, vec):
        return self.matrix @ vec

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        return SparseOperator((self.matrix + other.matrix).tocsr())

    def scaled_rows(self, s) -> "SparseOperator":
        return SparseOperator((sps.diags(s) @ self.matrix).tocsr())

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def row(self, k: int) -> dict[int, float]:
        m = self.matrix
        lo, hi = m.indptr[k], m.indptr[k + 1]
        return dict(zip(m.indices[lo:hi].tolist(), m.data[lo:hi].tolist()))

    def norm_inf(self) -> float:
        return float(abs(self.matrix).sum(axis=1).max()) if self.matrix.nnz else 0.0

    def dump(self, path) -> None:
        """Write the sparsity pattern as 'row col value' lines."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        np.savetxt(path, np.column_stack([coo.row[order], coo.col[order], coo.data[order]]),
                   fmt=["%d", "%d", "%.17g"], header="row col value")


def _residual_ok(mat, x, rhs, norm_a):
    res = float(np.max(np.abs(mat @ x - rhs))) if rhs.size else 0.0
    bound = 1e-10 * (norm_a * float(np.max(np.abs(x), initial=0.0)) + float(np.max(np.abs(rhs), initial=0.0)))
    return res, res <= bound or res == 0.0


class Factorized:
    """Factorization of a fixed operator, reusable across right-hand sides."""

    def __init__(self, op: SparseOperator, method: str = "lu", tol: float = 1e-12):
        self.op = op
        self.method = method
        self.tol = tol
        self._norm = op.norm_inf()
        mat = op.matrix.tocsc()
        if method == "lu":
            try:
                self._lu = spla.splu(mat)
            except RuntimeError as exc:
                raise SolveError(f"singular operator: {exc}") from exc
        elif method == "bicgstab":
            self._ilu = spla.spilu(mat, drop_tol=1e-6, fill_factor=20)
            self._mat = mat
        else:
            raise ValueError(f"unknown solve method {method!r}")

    def solve(self, rhs) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=float)
        if self.method == "lu":
            x = self._lu.solve(rhs)
        else:
            pre = spla.LinearOperator(self._mat.shape, self._ilu.solve)
            x, info = spla.bicgstab(self._mat, rhs, rtol=self.tol, atol=0.0, M=pre, maxiter=5000)
            if info != 0:
                res = float(np.max(np.abs(self._mat @ x - rhs)))
                raise SolveError(f"BiCGSTAB did not converge (info={info})", res)
        if not np.all(np.isfinite(x)):
            raise SolveError("non-finite solution, operator is singular")
        res, ok = _residual_ok(self.op.matrix, x, rhs, self._norm)
        if not ok and self.method == "lu":
            # one step of iterative refinement before giving up
            x = x + self._lu.solve(rhs - self.op.matrix @ x)
            res, ok = _residual_ok(self.op.matrix, x, rhs, self._norm)
        if not ok:
            raise SolveError("residual above tolerance", res)
        return x


def factorize(op: SparseOperator, method: str = "lu") -> Factorized:
    return Factorized(op, method)


def solve(op: SparseOperator, rhs, method: str = "lu") -> np.ndarray:
    return Factorized(op, method).solve(rhs)
