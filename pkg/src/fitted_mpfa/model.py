"""Model constants and the coefficients of the divergence-form PDE

    dU/dtau = div(M grad U) + div(f U) + lambda U

with M = 1/2 [[s1^2 x^2, rho s1 s2 x y], [rho s1 s2 x y, s2^2 y^2]],
f = (p x, q y) and lambda = -3r + s1^2 + s2^2 + rho s1 s2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import TensorGrid


@dataclass(frozen=True)
class ModelParams:
    sigma1: float
    sigma2: float
    rho: float
    r: float
    strike: float
    maturity: float

    def __post_init__(self):
        if not (self.sigma1 > 0 and self.sigma2 > 0):
            raise ValueError("volatilities must be positive")
        if not abs(self.rho) < 1:
            raise ValueError(f"|rho| must be < 1, got {self.rho!r}")
        if not self.strike > 0:
            raise ValueError("strike must be positive")
        if not self.maturity > 0:
            raise ValueError("maturity must be positive")

    @property
    def cross(self) -> float:
        """rho * sigma1 * sigma2."""
        return self.rho * self.sigma1 * self.sigma2

    def coefficients(self) -> "PdeCoefficients":
        return PdeCoefficients.from_params(self)


@dataclass(frozen=True)
class PdeCoefficients:
    lam: float
    p_coef: float
    q_coef: float
    omega: float

    @classmethod
    def from_params(cls, prm: ModelParams) -> "PdeCoefficients":
        s1, s2, c, r = prm.sigma1, prm.sigma2, prm.cross, prm.r
        p = r - s1**2 - 0.5 * c
        q = r - s2**2 - 0.5 * c
        return cls(lam=-3.0 * r + s1**2 + s2**2 + c, p_coef=p, q_coef=q, omega=p + q)


def tensor(params: ModelParams, x, y) -> np.ndarray:
    """Pointwise diffusion tensor M(x, y), shape (..., 2, 2)."""
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    out = np.empty(x.shape + (2, 2))
    out[..., 0, 0] = 0.5 * params.sigma1**2 * x**2
    out[..., 1, 1] = 0.5 * params.sigma2**2 * y**2
    out[..., 0, 1] = out[..., 1, 0] = 0.5 * params.cross * x * y
    return out


def _cell_average_tensors(params: ModelParams, xlo, xhi, ylo, yhi) -> np.ndarray:
    out = np.empty(np.broadcast(xlo, ylo).shape + (2, 2))
    # (b^3 - a^3)/(b - a) written without the division
    out[..., 0, 0] = params.sigma1**2 / 6.0 * (xhi**2 + xhi * xlo + xlo**2)
    out[..., 1, 1] = params.sigma2**2 / 6.0 * (yhi**2 + yhi * ylo + ylo**2)
    out[..., 0, 1] = out[..., 1, 0] = params.cross / 8.0 * (xhi + xlo) * (yhi + ylo)
    return out


BOUNDARY_TENSORS = ("half", "mirror")


def _cell_bounds(axis, boundary: str):
    """Lower/upper faces of cells 0..N+1.

    The boundary cells 0 and N+1 are half cells of the mesh.  With
    ``boundary='mirror'`` their tensor is averaged over the half cell reflected
    about the boundary node, which centres it on the node like every interior
    average; ``'half'`` averages over the half cell itself.
    """
    lo = axis.midpoints[:-1].copy()
    hi = axis.midpoints[1:].copy()
    if boundary == "mirror":
        lo[0] = 2.0 * axis.nodes[0] - hi[0]
        hi[-1] = 2.0 * axis.nodes[-1] - lo[-1]
    elif boundary != "half":
        raise ValueError(f"boundary tensor must be one of {BOUNDARY_TENSORS}, got {boundary!r}")
    return lo, hi


def averaged_tensor(params: ModelParams, grid: TensorGrid, i: int, j: int, boundary: str = "half") -> np.ndarray:
    """Cell average of M over C_ij.

    Indices 0 and N+1 address the boundary cells, whose tensors enter the
    interaction volumes along the domain edges (see :func:`_cell_bounds`).
    """
    n = grid.n
    if not (0 <= i <= n + 1 and 0 <= j <= n + 1):
        raise IndexError(f"cell ({i}, {j}) outside 0..{n + 1}")
    xlo, xhi = _cell_bounds(grid.axis_x, boundary)
    ylo, yhi = _cell_bounds(grid.axis_y, boundary)
    return _cell_average_tensors(params, xlo[i], xhi[i], ylo[j], yhi[j])


def averaged_tensor_field(params: ModelParams, grid: TensorGrid, boundary: str = "half") -> np.ndarray:
    """Averaged tensors of every cell 0..N+1 in both directions, shape (N+2, N+2, 2, 2)."""
    xlo, xhi = _cell_bounds(grid.axis_x, boundary)
    ylo, yhi = _cell_bounds(grid.axis_y, boundary)
    return _cell_average_tensors(params, xlo[:, None], xhi[:, None], ylo[None, :], yhi[None, :])


def velocity(params: ModelParams, x, y) -> np.ndarray:
    """Convective field f(x, y) = (p x, q y)."""
    c = params.coefficients()
    return np.stack(np.broadcast_arrays(c.p_coef * np.asarray(x, float), c.q_coef * np.asarray(y, float)), axis=-1)
