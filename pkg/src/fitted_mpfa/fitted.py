"""Fitted MPFA: fitted finite-volume fluxes on the edges along the axes.

The faces x = x_{1/2} (west faces of cells (1, j)) and y = y_{1/2} (south faces
of cells (i, 1)) lie in the region where the tensor degenerates.  There the
total flux (M grad U + f U) . n is taken from the fitted two-point solution;
every other face keeps the MPFA diffusion and upwind convection fluxes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import TensorGrid
from .model import ModelParams
from .mpfa import diffusion_system
from .system import SplitOperator, ext_index
from .upwind import select_rows, upwind1_system, upwind2_system


@dataclass(frozen=True)
class FittedFluxCoeffs:
    """Flux through one degeneracy edge, oriented along +x / +y.

    flux = owner * U_owner + neighbor * U_along + axis * U_axis, where U_along is
    the next value along the edge direction and U_axis the Dirichlet value on
    the axis.
    """

    owner: float
    neighbor: float
    axis: float


def fitted_south_flux(grid: TensorGrid, params: ModelParams, i) -> FittedFluxCoeffs:
    """Flux through the south face of cell (i, 1) (vectorized over ``i``)."""
    i = np.asarray(i)
    if np.any((i < 1) | (i > grid.n)):
        raise IndexError(f"i outside 1..{grid.n}")
    e = 0.5 * params.sigma2**2
    k = params.r - params.sigma2**2 - 0.5 * params.cross
    hp = 0.5 * params.cross * grid.axis_x.nodes[i]
    h = grid.axis_x.widths[i]
    y1 = grid.axis_y.nodes[1]
    return FittedFluxCoeffs(
        owner=0.5 * y1 * (0.5 * h * (e + k) - hp),
        neighbor=0.5 * hp * y1,
        axis=-0.25 * y1 * h * (e - k),
    )


def fitted_west_flux(grid: TensorGrid, params: ModelParams, j) -> FittedFluxCoeffs:
    """Flux through the west face of cell (1, j); mirror of :func:`fitted_south_flux`."""
    j = np.asarray(j)
    if np.any((j < 1) | (j > grid.n)):
        raise IndexError(f"j outside 1..{grid.n}")
    a = 0.5 * params.sigma1**2
    b = params.r - params.sigma1**2 - 0.5 * params.cross
    d = 0.5 * params.cross * grid.axis_y.nodes[j]
    l = grid.axis_y.widths[j]
    x1 = grid.axis_x.nodes[1]
    return FittedFluxCoeffs(
        owner=0.5 * x1 * (0.5 * l * (a + b) - d),
        neighbor=0.5 * d * x1,
        axis=-0.25 * l * x1 * (a - b),
    )


def fitted_edge_system(grid: TensorGrid, params: ModelParams) -> SplitOperator:
    """Balance contributions of the fitted fluxes (each edge is an inflow face, sign -1)."""
    n = grid.n
    idx = np.arange(1, n + 1)
    s = fitted_south_flux(grid, params, idx)
    w = fitted_west_flux(grid, params, idx)
    one = np.ones(n, dtype=np.int64)
    south_row = ext_index(grid, idx, one)
    west_row = ext_index(grid, one, idx)
    rows = np.concatenate([south_row] * 3 + [west_row] * 3)
    cols = np.concatenate([
        south_row, ext_index(grid, idx + 1, one), ext_index(grid, idx, 0 * one),
        west_row, ext_index(grid, one, idx + 1), ext_index(grid, 0 * one, idx),
    ])
    vals = -np.concatenate([s.owner, s.neighbor, s.axis, w.owner, w.neighbor, w.axis])
    return SplitOperator.from_ext_triplets(grid, rows, cols, vals)


def degeneracy_rows(n: int) -> np.ndarray:
    """Mask over unknowns of the rows touched by the fitted fluxes (i == 1 or j == 1)."""
    i, j = np.meshgrid(np.arange(1, n + 1), np.arange(1, n + 1), indexing="ij")
    return ((i == 1) | (j == 1)).ravel()


def fitted_system(grid: TensorGrid, params: ModelParams, order: int = 1, rule: str = "donor",
                  where: str = "node", boundary: str = "half") -> SplitOperator:
    """Spatial operator Z (order 1) or Y (order 2), without the reaction term."""
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order!r}")
    diff = diffusion_system(grid, params, skip_axis_faces=True, boundary=boundary)
    conv_edge = upwind1_system(grid, params, rule, where, skip_axis_faces=True)
    if order == 1:
        conv = conv_edge
    else:
        mask = degeneracy_rows(grid.n)
        conv = select_rows(upwind2_system(grid, params, rule, where), ~mask) + select_rows(conv_edge, mask)
    return diff + conv + fitted_edge_system(grid, params)


def assemble_fitted(grid, params, bc, order: int = 1, tau: float = 0.0, rule: str = "donor", where: str = "node",
                    boundary: str = "half"):
    return fitted_system(grid, params, order, rule, where, boundary).with_boundary(bc, tau)
