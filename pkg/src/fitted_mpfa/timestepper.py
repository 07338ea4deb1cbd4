"""theta-method time integration of dU/dtau = A U + F(tau)."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sps

from .analytic import payoff
from .linalg import Factorized, SolveError, SparseOperator
from .schemes import SemiDiscrete

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ThetaScheme:
    theta: float
    dtau: float
    n_steps: int

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must lie in [0, 1], got {self.theta!r}")
        if not self.dtau > 0:
            raise ValueError(f"dtau must be positive, got {self.dtau!r}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ValueError(f"n_steps must be a positive integer, got {self.n_steps!r}")

    @classmethod
    def covering(cls, theta: float, maturity: float, dtau: float) -> "ThetaScheme":
        """Smallest number of equal steps no longer than ``dtau`` that reach ``maturity``."""
        n = max(1, math.ceil(maturity / dtau - 1e-9))
        return cls(theta, maturity / n, n)

    @property
    def final_time(self) -> float:
        return self.dtau * self.n_steps


def _operators(scheme: ThetaScheme, A: SparseOperator):
    eye = sps.identity(A.size, format="csr")
    lhs = SparseOperator((eye - scheme.theta * scheme.dtau * A.matrix).tocsr())
    rhs = (eye + (1.0 - scheme.theta) * scheme.dtau * A.matrix).tocsr()
    return lhs, rhs


def _rhs(scheme, rhs_mat, un, fn, fn1):
    th, dt = scheme.theta, scheme.dtau
    return rhs_mat @ un + th * dt * np.asarray(fn1) + (1.0 - th) * dt * np.asarray(fn)


def step(scheme: ThetaScheme, A: SparseOperator, Un, Fn, Fn1) -> np.ndarray:
    """One theta step: (I - th dt A)^{-1} [(I + (1-th) dt A) U^n + th dt F^{n+1} + (1-th) dt F^n]."""
    lhs, rhs = _operators(scheme, A)
    return Factorized(lhs).solve(_rhs(scheme, rhs, np.asarray(Un, float), Fn, Fn1))


@dataclass
class StepDiagnostics:
    tau: float
    residual: float
    u_min: float
    u_max: float


@dataclass
class RunResult:
    values: np.ndarray  # U at tau = T, row-major over (i, j)
    diagnostics: list[StepDiagnostics] = field(default_factory=list)
    bound_violations: int = 0


def initial_values(system: SemiDiscrete, strike: float) -> np.ndarray:
    x, y = system.grid.centers()
    return payoff(x, y, strike).ravel()


def run(scheme: ThetaScheme, system: SemiDiscrete, bc, strike: float, method: str = "lu") -> RunResult:
    """Advance the payoff from tau = 0 to scheme.final_time.

    The implicit matrix is factorized once.  Each step records the relative
    residual of its solve and the solution range; values outside the range of
    the payoff and boundary data by more than 1e-6 K are logged.
    """
    lhs, rhs_mat = _operators(scheme, system.A)
    try:
        fac = Factorized(lhs, method=method)
    except (SolveError, RuntimeError) as exc:
        raise SolveError(f"factorization of the implicit matrix failed before step 1: {exc}") from exc
    u = initial_values(system, strike)
    bx, by = system.split.boundary_points()
    tol = 1e-6 * strike
    lo = float(np.min(u))
    hi = float(np.max(u))
    f_now = system.forcing(bc, 0.0)
    result = RunResult(u)
    for n in range(scheme.n_steps):
        tau1 = (n + 1) * scheme.dtau
        f_next = system.forcing(bc, tau1)
        b = _rhs(scheme, rhs_mat, u, f_now, f_next)
        try:
            u = fac.solve(b)
        except SolveError as exc:
            raise SolveError(f"step {n + 1} (tau={tau1:.6g}): {exc}", exc.residual) from exc
        if not np.all(np.isfinite(u)):
            raise SolveError(f"step {n + 1} (tau={tau1:.6g}): non-finite solution")
        res = float(np.linalg.norm(lhs @ u - b, np.inf) / max(np.linalg.norm(b, np.inf), 1e-300))
        bvals = np.asarray(bc(bx, by, tau1), float)
        lo = min(lo, float(bvals.min()))
        hi = max(hi, float(bvals.max()))
        umin, umax = float(u.min()), float(u.max())
        if umin < lo - tol or umax > hi + tol:
            result.bound_violations += 1
            logger.debug("step %d: solution range [%.6g, %.6g] leaves data range [%.6g, %.6g]",
                           n + 1, umin, umax, lo, hi)
        result.diagnostics.append(StepDiagnostics(tau1, res, umin, umax))
        f_now = f_next
    if result.bound_violations:
        logger.warning("solution left the payoff/boundary data range (tol %.3g) in %d of %d steps",
                       tol, result.bound_violations, scheme.n_steps)
    result.values = u
    return result


def dump_grid_function(path, grid, values) -> None:
    """Write 'x y value' rows over the interior cell centres."""
    x, y = grid.centers()
    np.savetxt(path, np.column_stack([x.ravel(), y.ravel(), np.asarray(values).ravel()]),
               fmt="%.12g", header="x y value")
