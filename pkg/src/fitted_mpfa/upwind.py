"""Upwind discretizations of the convection term div(f U), f = (p x, q y).

First order: face fluxes with the donor-cell selection (own value when the
outward normal velocity is positive, neighbour value otherwise).  Second
order: cell-centred quadrature meas * (p_i U_x + q_j U_y + omega U) with
one-sided three-point derivatives on non-uniform spacing; rows next to the
boundary fall back to the first-order fluxes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sps

from .grid import TensorGrid
from .linalg import SparseOperator
from .model import ModelParams
from .system import SplitOperator, ext_index

FLUX_RULES = ("donor", "literal", "transport")
VELOCITY_POINTS = ("node", "face")


@dataclass(frozen=True)
class DerivStencil3:
    """U'(x_0) ~ a U(x_0 + h1 + h2) + b U(x_0 + h1) + c U(x_0)."""

    a: float
    b: float
    c: float


def deriv_coeffs_3pt(h1, h2) -> DerivStencil3:
    """One-sided three-point first-derivative weights for spacings h1 (near) and h2 (far)."""
    h1 = np.asarray(h1, dtype=float)
    h2 = np.asarray(h2, dtype=float)
    if np.any(h1 <= 0) or np.any(h2 <= 0):
        raise ValueError("spacings must be positive")
    a = -h1 / (h2 * (h1 + h2))
    b = (h1 + h2) / (h1 * h2)
    c = -(a + b)
    return DerivStencil3(a, b, c)


def face_velocities(axis, slope: float, where: str = "node") -> np.ndarray:
    """Normal velocity on the faces x_{k+1/2}, k = 0..N.

    ``where='node'`` evaluates at x_{k+1} (the printed convention), ``'face'``
    at the face itself.
    """
    n = axis.n
    if where == "node":
        pts = axis.nodes[1 : n + 2]
    elif where == "face":
        pts = axis.midpoints[1 : n + 2]
    else:
        raise ValueError(f"velocity point must be one of {VELOCITY_POINTS}, got {where!r}")
    return slope * pts


def _donor_weights(v, rule: str):
    if rule == "donor":
        return np.maximum(v, 0.0), np.minimum(v, 0.0)
    if rule == "literal":
        return v * np.maximum(v, 0.0), v * np.minimum(v, 0.0)
    if rule == "transport":
        # upstream with respect to the transport direction -f of dU/dtau = div(f U)
        return np.minimum(v, 0.0), np.maximum(v, 0.0)
    raise ValueError(f"flux rule must be one of {FLUX_RULES}, got {rule!r}")


def upwind1_triplets(grid: TensorGrid, params: ModelParams, rule: str = "donor", where: str = "node",
                     skip_axis_faces: bool = False):
    """Extended-index triplets of the first-order face fluxes.

    The flux through the face between low cell L and high cell H (along +x or
    +y) is len * (wL U_L + wH U_H); it leaves L and enters H.
    """
    n = grid.n
    coef = params.coefficients()
    ax, ay = grid.axis_x, grid.axis_y
    rows, cols, vals = [], [], []
    inner = np.arange(1, n + 1)

    def is_cell(i, j):
        return (i >= 1) & (i <= n) & (j >= 1) & (j <= n)

    def add(lo_i, lo_j, hi_i, hi_j, length, v):
        wl, wh = _donor_weights(v, rule)
        lo, hi = ext_index(grid, lo_i, lo_j), ext_index(grid, hi_i, hi_j)
        for row, sign, keep in ((lo, 1.0, is_cell(lo_i, lo_j)), (hi, -1.0, is_cell(hi_i, hi_j))):
            if skip_axis_faces:
                keep = keep & ~((lo_i == 0) | (lo_j == 0))
            for col, w in ((lo, wl), (hi, wh)):
                rows.append(row[keep])
                cols.append(col[keep])
                vals.append((sign * length * w)[keep])

    # x-faces: between (k, j) and (k+1, j), k = 0..N, j = 1..N
    k, j = np.meshgrid(np.arange(0, n + 1), inner, indexing="ij")
    vx = face_velocities(ax, coef.p_coef, where)[k]
    add(k, j, k + 1, j, ay.widths[j], vx)
    # y-faces: between (i, k) and (i, k+1)
    i, k = np.meshgrid(inner, np.arange(0, n + 1), indexing="ij")
    vy = face_velocities(ay, coef.q_coef, where)[k]
    add(i, k, i, k + 1, ax.widths[i], vy)
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


def upwind1_system(grid: TensorGrid, params: ModelParams, rule: str = "donor", where: str = "node",
                   skip_axis_faces: bool = False) -> SplitOperator:
    return SplitOperator.from_ext_triplets(grid, *upwind1_triplets(grid, params, rule, where, skip_axis_faces))


def _second_order_1d(axis, slope: float):
    """Per-node (offsets, weights) of slope * x_i * U_x for interior nodes i = 2..N-1.

    Returns an (N-2, 3) offset array and matching weights.
    """
    n = axis.n
    i = np.arange(2, n)
    v = slope * axis.nodes[i]
    offs = np.zeros((i.size, 3), dtype=np.int64)
    w = np.zeros((i.size, 3))
    if slope > 0:
        st = deriv_coeffs_3pt(axis.spacing(i + 1), axis.spacing(i + 2))
        offs[:] = (2, 1, 0)
        w[:] = np.stack([st.a, st.b, st.c], -1) * v[:, None]
    elif slope < 0:
        st = deriv_coeffs_3pt(axis.spacing(i), axis.spacing(i - 1))
        offs[:] = (-2, -1, 0)
        w[:] = -np.stack([st.a, st.b, st.c], -1) * v[:, None]
    return i, offs, w


def upwind2_system(grid: TensorGrid, params: ModelParams, rule: str = "donor", where: str = "node") -> SplitOperator:
    """Second-order upwind convection; ``rule``/``where`` govern the boundary-adjacent rows."""
    n = grid.n
    if n < 4:
        raise ValueError("second-order upwinding needs N >= 4")
    coef = params.coefficients()
    ax, ay = grid.axis_x, grid.axis_y
    ix, offx, wx = _second_order_1d(ax, coef.p_coef)
    jy, offy, wy = _second_order_1d(ay, coef.q_coef)
    # rows (i, j) with 2 <= i, j <= N-1
    I, J = np.meshgrid(ix, jy, indexing="ij")
    meas = ax.widths[I] * ay.widths[J]
    row = ext_index(grid, I, J)
    rows, cols, vals = [row], [row], [meas * coef.omega]
    for t in range(3):
        rows.append(row)
        cols.append(ext_index(grid, I + offx[:, None, t], J))
        vals.append(meas * wx[:, None, t])
        rows.append(row)
        cols.append(ext_index(grid, I, J + offy[None, :, t]))
        vals.append(meas * wy[None, :, t])
    interior = SplitOperator.from_ext_triplets(
        grid, np.concatenate([r.ravel() for r in rows]), np.concatenate([c.ravel() for c in cols]),
        np.concatenate([v.ravel() for v in vals]),
    )
    edge_rows = boundary_adjacent_rows(n)
    first = upwind1_system(grid, params, rule, where)
    return select_rows(first, edge_rows) + interior


def boundary_adjacent_rows(n: int) -> np.ndarray:
    """Boolean mask over unknowns: True where i or j is 1 or N."""
    i, j = np.meshgrid(np.arange(1, n + 1), np.arange(1, n + 1), indexing="ij")
    return ((i == 1) | (i == n) | (j == 1) | (j == n)).ravel()


def select_rows(op: SplitOperator, mask) -> SplitOperator:
    """Keep the rows where ``mask`` is True, zero the others."""
    d = sps.diags(np.asarray(mask, dtype=float))
    a = (d @ op.interior.matrix).tocsr()
    b = (d @ op.boundary).tocsr()
    a.eliminate_zeros()
    b.eliminate_zeros()
    return SplitOperator(op.grid, SparseOperator(a), b, op.boundary_i, op.boundary_j)


def assemble_upwind1(grid, params, bc, tau: float = 0.0, rule: str = "donor", where: str = "node"):
    return upwind1_system(grid, params, rule, where).with_boundary(bc, tau)


def assemble_upwind2(grid, params, bc, tau: float = 0.0, rule: str = "donor", where: str = "node"):
    return upwind2_system(grid, params, rule, where).with_boundary(bc, tau)
