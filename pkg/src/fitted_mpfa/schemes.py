"""Scheme selection: the four spatial discretizations as semi-discrete systems

    dU/dtau = A U + F(tau),   A = L^{-1} S + lambda I,   F = L^{-1} B u_bd(tau)

where S is the assembled cell-balance operator (diffusion + convection), B its
boundary columns and L = diag(meas(C_ij)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sps

from .fitted import fitted_system
from .grid import TensorGrid
from .linalg import SparseOperator
from .model import BOUNDARY_TENSORS, ModelParams
from .mpfa import diffusion_system
from .system import SplitOperator
from .upwind import FLUX_RULES, VELOCITY_POINTS, upwind1_system, upwind2_system

SCHEMES = ("mpfa-up1", "mpfa-up2", "fitted-mpfa-up1", "fitted-mpfa-up2")


@dataclass(frozen=True)
class SchemeOptions:
    """Discretization choices the method description leaves open."""

    rule: str = "donor"  # first-order face flux selection
    where: str = "node"  # face velocity evaluation point
    boundary_tensor: str = "half"  # averaging of the boundary-cell tensors

    def __post_init__(self):
        for name, val, allowed in (("rule", self.rule, FLUX_RULES), ("where", self.where, VELOCITY_POINTS),
                                   ("boundary_tensor", self.boundary_tensor, BOUNDARY_TENSORS)):
            if val not in allowed:
                raise ValueError(f"{name} must be one of {allowed}, got {val!r}")


def parse_scheme(name: str) -> tuple[bool, int]:
    """'fitted-mpfa-up2' -> (fitted=True, order=2)."""
    if name not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}, got {name!r}")
    return name.startswith("fitted"), int(name[-1])


def spatial_operator(name: str, grid: TensorGrid, params: ModelParams,
                     options: SchemeOptions = SchemeOptions()) -> SplitOperator:
    """Cell-balance operator S (no reaction term) of the named scheme."""
    fitted, order = parse_scheme(name)
    o = options
    if fitted:
        return fitted_system(grid, params, order, o.rule, o.where, o.boundary_tensor)
    if order == 1:
        conv = upwind1_system(grid, params, o.rule, o.where)
    else:
        conv = upwind2_system(grid, params, o.rule, o.where)
    return diffusion_system(grid, params, boundary=o.boundary_tensor) + conv


@dataclass(frozen=True)
class SemiDiscrete:
    """A and the (scaled) boundary map of dU/dtau = A U + F(tau)."""

    grid: TensorGrid
    A: SparseOperator
    split: SplitOperator

    def forcing(self, bc, tau: float) -> np.ndarray:
        return self.split.boundary_vector(bc, tau)


def semi_discrete(name: str, grid: TensorGrid, params: ModelParams,
                  options: SchemeOptions = SchemeOptions()) -> SemiDiscrete:
    s = spatial_operator(name, grid, params, options)
    dinv = sps.diags(1.0 / grid.measures().ravel())
    lam = params.coefficients().lam
    a = (dinv @ s.interior.matrix + lam * sps.identity(grid.n**2, format="csr")).tocsr()
    b = (dinv @ s.boundary).tocsr()
    split = SplitOperator(grid, SparseOperator(a), b, s.boundary_i, s.boundary_j)
    return SemiDiscrete(grid, split.interior, split)
