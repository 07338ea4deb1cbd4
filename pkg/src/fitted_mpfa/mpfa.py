"""MPFA O-method for the diffusion term div(M grad U).

Every interior grid vertex (x_{i-1/2}, y_{j-1/2}) carries an interaction volume
R_ij = [x_{i-1}, x_i] x [y_{j-1}, y_j] overlapping cells

    1: (i-1, j-1)   2: (i, j-1)   3: (i-1, j)   4: (i, j)

and four half edges: 1 between cells 1|2, 2 between 3|4 (both vertical, normal
+x), 3 between 1|3, 4 between 2|4 (both horizontal, normal +y).  The solution
is linear on each sub-triangle (cell centre, two continuity points); fluxes are
matched across every half edge, the continuity-point values are eliminated and
what remains is the 4x4 transmissibility T with f = T u.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import TensorGrid
from .model import ModelParams, averaged_tensor_field
from .system import SplitOperator, ext_index

# half edge p -> (cell on the low side, cell on the high side), local 0-based
HALF_EDGE_CELLS = ((0, 1), (2, 3), (0, 2), (1, 3))
HALF_EDGE_NORMALS = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]])
# cell k -> the two continuity points of its sub-triangle, local 0-based
CELL_POINTS = ((0, 2), (0, 3), (1, 2), (1, 3))


class SingularInteractionError(np.linalg.LinAlgError):
    def __init__(self, volumes):
        self.volumes = [tuple(int(v) for v in vol) for vol in volumes]
        super().__init__(f"singular local continuity system in interaction volume(s) {self.volumes[:5]}")


def _outer_normals(tri):
    """Outer normals, scaled by edge length, of the edge opposite each vertex."""
    nu = np.empty_like(tri)
    for k in range(3):
        a, b = tri[..., (k + 1) % 3, :], tri[..., (k + 2) % 3, :]
        e = b - a
        n = np.stack([e[..., 1], -e[..., 0]], axis=-1)
        to_vertex = tri[..., k, :] - a
        flip = np.sum(n * to_vertex, axis=-1) > 0
        nu[..., k, :] = np.where(flip[..., None], -n, n)
    return nu


def _signed_area(tri):
    d1 = tri[..., 1, :] - tri[..., 0, :]
    d2 = tri[..., 2, :] - tri[..., 0, :]
    return 0.5 * (d1[..., 0] * d2[..., 1] - d1[..., 1] * d2[..., 0])


def triangle_gradient_weights(vertices) -> np.ndarray:
    """Weights W, shape (..., 2, 3), with grad f = W @ f(vertices) for linear f.

    Built from the length-scaled outer normals nu_k of the edges opposite the
    vertices: grad f = -1/(2A) [(f_2 - f_1) nu_2 + (f_3 - f_1) nu_3].
    """
    tri = np.asarray(vertices, dtype=float)
    area = np.abs(_signed_area(tri))
    span = np.ptp(tri, axis=-2).max(axis=-1)
    if np.any(area <= 1e-14 * span**2) or np.any(span == 0):
        raise ValueError("degenerate triangle")
    nu = _outer_normals(tri)
    w = np.empty(tri.shape[:-2] + (2, 3))
    scale = -1.0 / (2.0 * area)[..., None]
    w[..., :, 1] = scale * nu[..., 1, :]
    w[..., :, 2] = scale * nu[..., 2, :]
    w[..., :, 0] = -(w[..., :, 1] + w[..., :, 2])
    return w


def triangle_gradient(vertices, values) -> np.ndarray:
    """Gradient of the linear interpolant of ``values`` on a triangle."""
    return triangle_gradient_weights(vertices) @ np.asarray(values, dtype=float)


@dataclass(frozen=True)
class LocalGeometry:
    """Geometry of one or many interaction volumes (leading batch axes)."""

    centers: np.ndarray  # (..., 4, 2) cell centres x_1..x_4
    points: np.ndarray  # (..., 4, 2) continuity points xbar_1..xbar_4
    lengths: np.ndarray  # (..., 4) half-edge lengths Gamma_p

    @classmethod
    def from_grid(cls, grid: TensorGrid, i=None, j=None) -> "LocalGeometry":
        """Interaction volume R_ij, or all of them (shape (N+1, N+1, ...)) by default."""
        ax, ay = grid.axis_x, grid.axis_y
        if i is None:
            i, j = np.meshgrid(np.arange(1, grid.n + 2), np.arange(1, grid.n + 2), indexing="ij")
        i, j = np.asarray(i), np.asarray(j)
        if np.any((i < 1) | (i > grid.n + 1) | (j < 1) | (j > grid.n + 1)):
            raise IndexError("interaction volume index outside 1..N+1")
        x0, x1 = ax.nodes[i - 1], ax.nodes[i]
        y0, y1 = ay.nodes[j - 1], ay.nodes[j]
        xm, ym = ax.midpoints[i], ay.midpoints[j]  # x_{i-1/2}, y_{j-1/2}
        centers = np.stack(
            [np.stack([x0, y0], -1), np.stack([x1, y0], -1), np.stack([x0, y1], -1), np.stack([x1, y1], -1)], -2
        )
        points = np.stack(
            [np.stack([xm, y0], -1), np.stack([xm, y1], -1), np.stack([x0, ym], -1), np.stack([x1, ym], -1)], -2
        )
        lengths = np.stack([ym - y0, y1 - ym, xm - x0, x1 - xm], -1)
        return cls(centers, points, lengths)

    def normals(self) -> np.ndarray:
        return np.broadcast_to(HALF_EDGE_NORMALS, self.lengths.shape + (2,))

    def triangles(self) -> np.ndarray:
        """(..., 4, 3, 2): for each cell, its centre and its two continuity points."""
        tri = np.empty(self.centers.shape[:-2] + (4, 3, 2))
        for k, (a, b) in enumerate(CELL_POINTS):
            tri[..., k, 0, :] = self.centers[..., k, :]
            tri[..., k, 1, :] = self.points[..., a, :]
            tri[..., k, 2, :] = self.points[..., b, :]
        return tri


@dataclass(frozen=True)
class LocalTransmissibility:
    T: np.ndarray  # (..., 4, 4)
    A: np.ndarray  # continuity matrix, A v = B u
    B: np.ndarray
    C: np.ndarray  # flux from the low side: f = C v + F u
    F: np.ndarray
    C_high: np.ndarray  # flux from the high side
    F_high: np.ndarray

    def fluxes(self, u) -> np.ndarray:
        return np.einsum("...pk,...k->...p", self.T, u)

    def edge_values(self, u) -> np.ndarray:
        return np.linalg.solve(self.A, np.einsum("...pk,...k->...p", self.B, u)[..., None])[..., 0]


def _one_sided_flux_maps(geom: LocalGeometry, tensors):
    """Coefficients of each half-edge flux, seen from either adjacent cell.

    Returns (CV, CU) with shape (..., 4 edges, 2 sides, 4): the flux through edge
    p evaluated in its side-s cell is CV[p, s] @ v + CU[p, s] @ u.
    """
    batch = geom.lengths.shape[:-1]
    w = triangle_gradient_weights(geom.triangles())  # (..., 4 cells, 2, 3)
    # gradient of cell k as maps on v (continuity values) and u (cell values)
    gv = np.zeros(batch + (4, 2, 4))
    gu = np.zeros(batch + (4, 2, 4))
    for k, (a, b) in enumerate(CELL_POINTS):
        gu[..., k, :, k] = w[..., k, :, 0]
        gv[..., k, :, a] = w[..., k, :, 1]
        gv[..., k, :, b] = w[..., k, :, 2]
    normals = geom.normals()
    cv = np.empty(batch + (4, 2, 4))
    cu = np.empty(batch + (4, 2, 4))
    for p, cells in enumerate(HALF_EDGE_CELLS):
        for s, k in enumerate(cells):
            # Gamma_p n_p^T M_k
            row = geom.lengths[..., p, None] * np.einsum("...i,...ij->...j", normals[..., p, :], tensors[..., k, :, :])
            cv[..., p, s, :] = np.einsum("...i,...ij->...j", row, gv[..., k, :, :])
            cu[..., p, s, :] = np.einsum("...i,...ij->...j", row, gu[..., k, :, :])
    return cv, cu


def local_transmissibility(geom: LocalGeometry, tensors, cond_limit: float = 1e14) -> LocalTransmissibility:
    """Transmissibility T = C A^{-1} B + F of one or many interaction volumes.

    ``tensors`` has shape (..., 4, 2, 2): the averaged tensors of cells 1..4.
    """
    tensors = np.asarray(tensors, dtype=float)
    cv, cu = _one_sided_flux_maps(geom, tensors)
    a = cv[..., 0, :] - cv[..., 1, :]
    b = cu[..., 1, :] - cu[..., 0, :]
    cond = np.linalg.cond(a)
    bad = ~np.isfinite(cond) | (cond > cond_limit)
    if np.any(bad):
        raise SingularInteractionError(np.argwhere(np.atleast_1d(bad)) + 1)
    c, f = cv[..., 0, :], cu[..., 0, :]
    t = c @ np.linalg.solve(a, b) + f
    return LocalTransmissibility(t, a, b, c, f, cv[..., 1, :], cu[..., 1, :])


def transmissibility_field(grid: TensorGrid, params: ModelParams, boundary: str = "half") -> LocalTransmissibility:
    """Transmissibilities of all interaction volumes, indexed [i-1, j-1] for R_ij."""
    m = averaged_tensor_field(params, grid, boundary)  # cells 0..N+1
    n1 = grid.n + 1
    tens = np.stack([m[:n1, :n1], m[1:, :n1], m[:n1, 1:], m[1:, 1:]], axis=2)
    return local_transmissibility(LocalGeometry.from_grid(grid), tens)


def half_edge_triplets(grid: TensorGrid, T: np.ndarray, skip_axis_faces: bool = False):
    """Cell-balance triplets (extended indices) of all half-edge fluxes.

    A half-edge flux leaves its low-side cell and enters its high-side cell; only
    rows of interior cells are emitted.  With ``skip_axis_faces`` the half edges
    lying on the faces x = x_{1/2} and y = y_{1/2} are left out of the balance
    of the adjacent interior cells (the fitted scheme supplies those fluxes).
    """
    n = grid.n
    n1 = n + 1
    i, j = np.meshgrid(np.arange(1, n1 + 1), np.arange(1, n1 + 1), indexing="ij")
    ci = np.stack([i - 1, i, i - 1, i], -1)
    cj = np.stack([j - 1, j - 1, j, j], -1)
    cols = ext_index(grid, ci, cj)  # (N+1, N+1, 4)
    rows, cc, vals = [], [], []
    for p, (lo, hi) in enumerate(HALF_EDGE_CELLS):
        on_axis = (ci[..., lo] == 0) if p < 2 else (cj[..., lo] == 0)
        for side, sign in ((lo, 1.0), (hi, -1.0)):
            oi, oj = ci[..., side], cj[..., side]
            keep = (oi >= 1) & (oi <= n) & (oj >= 1) & (oj <= n)
            if skip_axis_faces:
                keep &= ~on_axis
            rows.append(np.repeat(cols[..., side][keep], 4))
            cc.append(cols[keep].ravel())
            vals.append(sign * T[..., p, :][keep].ravel())
    return np.concatenate(rows), np.concatenate(cc), np.concatenate(vals)


def diffusion_system(grid: TensorGrid, params: ModelParams, skip_axis_faces: bool = False,
                     boundary: str = "half") -> SplitOperator:
    """MPFA diffusion operator of every interior cell, boundary columns split off."""
    trans = transmissibility_field(grid, params, boundary)
    rows, cols, vals = half_edge_triplets(grid, trans.T, skip_axis_faces)
    return SplitOperator.from_ext_triplets(grid, rows, cols, vals)


def assemble_diffusion(grid: TensorGrid, params: ModelParams, bc, tau: float = 0.0, boundary: str = "half"):
    """(A_mp, F_mp) with the Dirichlet data of ``bc`` at time level ``tau``."""
    return diffusion_system(grid, params, boundary=boundary).with_boundary(bc, tau)
