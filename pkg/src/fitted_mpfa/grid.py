"""Truncated non-uniform tensor-product mesh.

Each axis stores the nodes x_0..x_{N+1}: x_0 = 0 and x_{N+1} = x_max are the
Dirichlet boundary nodes, x_1..x_N are the centres of the interior control
volumes.  Midpoints x_{i-1/2} = (x_{i-1} + x_i)/2 for i = 1..N+1, padded with
x_{-1/2} = x_0 and x_{N+3/2} = x_{N+1}, so every node (boundary nodes included)
owns the interval [x_{i-1/2}, x_{i+1/2}] of width h_i.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class Axis1D:
    nodes: np.ndarray
    midpoints: np.ndarray = field(init=False, repr=False)
    widths: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 4:
            raise ValueError("an axis needs at least 2 interior nodes plus 2 boundary nodes")
        if nodes[0] != 0.0:
            raise ValueError(f"first node must be 0, got {nodes[0]!r}")
        if np.any(np.diff(nodes) <= 0.0):
            raise ValueError("nodes must be strictly increasing")
        # midpoints[k] holds x_{k-1/2} for k = 0..N+2
        mid = np.empty(nodes.size + 1)
        mid[0] = nodes[0]
        mid[1:-1] = 0.5 * (nodes[:-1] + nodes[1:])
        mid[-1] = nodes[-1]
        nodes.setflags(write=False)
        mid.setflags(write=False)
        widths = np.diff(mid)
        widths.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "midpoints", mid)
        object.__setattr__(self, "widths", widths)

    @property
    def n(self) -> int:
        """Number of interior cells N."""
        return self.nodes.size - 2

    @property
    def x_max(self) -> float:
        return float(self.nodes[-1])

    def lo(self, i):
        """x_{i-1/2}, the lower face of the cell around node i (i = 0..N+1)."""
        return self.midpoints[i]

    def hi(self, i):
        """x_{i+1/2}, the upper face of the cell around node i."""
        return self.midpoints[np.asarray(i) + 1]

    def width(self, i):
        return self.widths[i]

    def spacing(self, k):
        """Node distance x_k - x_{k-1}."""
        k = np.asarray(k)
        return self.nodes[k] - self.nodes[k - 1]

    def save(self, path) -> None:
        """Write the axis as a two-column text file: node index, coordinate."""
        idx = np.arange(self.nodes.size)
        np.savetxt(path, np.column_stack([idx, self.nodes]), fmt=["%d", "%.17g"],
                   header="index x")

    @classmethod
    def load(cls, path) -> "Axis1D":
        data = np.loadtxt(Path(path), ndmin=2)
        return cls(data[:, 1])


def build_uniform(n_cells: int, x_max: float) -> Axis1D:
    """Equally spaced nodes x_k = k * x_max / (N + 1), k = 0..N+1."""
    if int(n_cells) != n_cells or n_cells < 3:
        raise ValueError(f"n_cells must be an integer >= 3, got {n_cells!r}")
    if not x_max > 0:
        raise ValueError(f"x_max must be positive, got {x_max!r}")
    n_cells = int(n_cells)
    nodes = np.arange(n_cells + 2) * (x_max / (n_cells + 1))
    nodes[-1] = x_max
    return Axis1D(nodes)


def _grading_density(u, anchors, strength):
    # node density relative to the far field: 1 + strength at each anchor,
    # decaying geometrically with distance
    dens = np.ones_like(u)
    for a in anchors:
        dens += strength * np.exp(-np.abs(u - a) / 0.08)
    return dens


def build_graded(n_cells: int, x_max: float, focus: float, strength: float) -> Axis1D:
    """Nodes clustered around 0 and around ``focus``.

    The node map is the inverse of the cumulative node density
    1 + strength * (exp(-|s|/w) + exp(-|s - focus|/w)) on the unit interval, so
    ``strength`` is roughly the ratio of the coarsest to the finest spacing and
    ``strength == 0`` gives exactly :func:`build_uniform`.
    """
    if not 0.0 < focus < x_max:
        raise ValueError(f"focus must lie in (0, {x_max}), got {focus!r}")
    if strength < 0:
        raise ValueError(f"strength must be non-negative, got {strength!r}")
    uniform = build_uniform(n_cells, x_max)
    if strength == 0:
        return uniform

    fine = np.linspace(0.0, 1.0, 20001)
    dens = _grading_density(fine, (0.0, focus / x_max), strength)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(fine))])
    cum /= cum[-1]
    targets = uniform.nodes / x_max
    nodes = np.interp(targets, cum, fine) * x_max
    nodes[0], nodes[-1] = 0.0, x_max
    return Axis1D(nodes)


@dataclass(frozen=True)
class TensorGrid:
    axis_x: Axis1D
    axis_y: Axis1D

    def __post_init__(self):
        if self.axis_x.n != self.axis_y.n:
            raise ValueError("both axes must have the same number of interior cells")

    @property
    def n(self) -> int:
        return self.axis_x.n

    @classmethod
    def uniform(cls, n_cells: int, x_max: float, y_max: float | None = None) -> "TensorGrid":
        return cls(build_uniform(n_cells, x_max), build_uniform(n_cells, x_max if y_max is None else y_max))

    def _check(self, i, j):
        n = self.n
        if not (1 <= i <= n and 1 <= j <= n):
            raise IndexError(f"cell ({i}, {j}) outside 1..{n}")

    def cell_measure(self, i: int, j: int) -> float:
        self._check(i, j)
        return float(self.axis_x.widths[i] * self.axis_y.widths[j])

    def measures(self) -> np.ndarray:
        """(N, N) array of h_i * l_j over interior cells, indexed [i-1, j-1]."""
        n = self.n
        return np.outer(self.axis_x.widths[1 : n + 1], self.axis_y.widths[1 : n + 1])

    def centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Meshgrid (ij indexing) of interior cell centres."""
        n = self.n
        return np.meshgrid(self.axis_x.nodes[1 : n + 1], self.axis_y.nodes[1 : n + 1], indexing="ij")

    def interaction_cells(self, i: int, j: int) -> list[tuple[int, int]]:
        """Cells overlapped by the interaction volume R_ij, in local order 1..4."""
        if not (1 <= i <= self.n + 1 and 1 <= j <= self.n + 1):
            raise IndexError(f"interaction volume ({i}, {j}) outside 1..{self.n + 1}")
        return [(i - 1, j - 1), (i, j - 1), (i - 1, j), (i, j)]

    def index(self, i, j):
        """Row-major unknown index of interior cell (i, j), 1-based cell indices."""
        return (np.asarray(i) - 1) * self.n + (np.asarray(j) - 1)
