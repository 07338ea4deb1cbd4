"""Relative discrete L2 error weighted by cell measure."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import TensorGrid


@dataclass(frozen=True)
class ErrorReport:
    rel_l2: float
    max_abs: float
    n: int
    scheme: str = ""
    seconds: float = 0.0


def rel_l2_error(numeric, analytic, grid: TensorGrid, scheme: str = "", seconds: float = 0.0) -> ErrorReport:
    """sqrt(sum meas (U - U_ana)^2) / sqrt(sum meas U_ana^2) over interior cells.

    Sums use math.fsum so the result does not depend on summation order.
    """
    n = grid.n
    u = np.asarray(numeric, dtype=float).reshape(-1)
    ua = np.asarray(analytic, dtype=float).reshape(-1)
    if u.size != n * n or ua.size != n * n:
        raise ValueError(f"expected {n * n} values, got {u.size} and {ua.size}")
    meas = grid.measures().ravel()
    den = math.fsum(meas * ua * ua)
    if den == 0.0:
        raise ZeroDivisionError("analytic field is identically zero")
    diff = u - ua
    num = math.fsum(meas * diff * diff)
    return ErrorReport(math.sqrt(num / den), float(np.max(np.abs(diff))), n, scheme, seconds)
