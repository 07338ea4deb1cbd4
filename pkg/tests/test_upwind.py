import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from fitted_mpfa.grid import TensorGrid
from fitted_mpfa.model import ModelParams
from fitted_mpfa.upwind import (
    FLUX_RULES, deriv_coeffs_3pt, face_velocities, upwind1_system, upwind2_system, boundary_adjacent_rows,
)

from conftest import graded_grid, model_params


@given(st.floats(1e-3, 10), st.floats(1e-3, 10), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_three_point_exact_for_quadratics(h1, h2, c0, c1, c2):
    s = deriv_coeffs_3pt(h1, h2)
    u = lambda t: c0 + c1 * t + c2 * t * t
    approx = s.a * u(h1 + h2) + s.b * u(h1) + s.c * u(0.0)
    scale = 1 + abs(c1) + abs(c2) * (h1 + h2) + abs(c0) / min(h1, h2)
    assert approx == pytest.approx(c1, abs=1e-12 * scale * (1 + max(h1, h2) / min(h1, h2)))


def test_uniform_spacing_weights():
    s = deriv_coeffs_3pt(1.0, 1.0)
    assert (s.a, s.b, s.c) == pytest.approx((-0.5, 2.0, -1.5))


@pytest.mark.parametrize("h", [(0.0, 1.0), (1.0, -1.0)])
def test_spacing_must_be_positive(h):
    with pytest.raises(ValueError):
        deriv_coeffs_3pt(*h)


def test_face_velocity_points():
    g = TensorGrid.uniform(4, 5.0)
    np.testing.assert_allclose(face_velocities(g.axis_x, 2.0, "node"), 2 * np.array([1, 2, 3, 4, 5.0]))
    np.testing.assert_allclose(face_velocities(g.axis_x, 2.0, "face"), 2 * np.array([0.5, 1.5, 2.5, 3.5, 4.5]))
    with pytest.raises(ValueError):
        face_velocities(g.axis_x, 2.0, "cell")


@given(model_params())
def test_first_order_conservative(p):
    # total flux of all unknown columns plus boundary columns sums to the net boundary flux;
    # with U = 1 each row is the discrete divergence of f over its cell
    g = TensorGrid.uniform(6, 10.0)
    op = upwind1_system(g, p, "donor", "face")
    a, f = op.with_boundary(lambda x, y, t: np.ones_like(x))
    total = (a @ np.ones(36) + f).reshape(6, 6)
    np.testing.assert_allclose(total, p.coefficients().omega * g.measures(), rtol=1e-12, atol=1e-12)


def test_donor_selection_pattern():
    # p < 0: every x-face flux takes the high-side value
    p = ModelParams(0.5, 0.5, 0.0, 0.0, 1, 1)
    assert p.coefficients().p_coef < 0
    g = TensorGrid.uniform(5, 10.0)
    row = upwind1_system(g, p, "donor").ext_row(3, 3)
    assert (2, 3) not in row and (4, 3) in row


def test_literal_squares_velocity():
    p = ModelParams(0.5, 0.5, 0.0, 0.0, 1, 1)
    g = TensorGrid.uniform(5, 10.0)
    v = face_velocities(g.axis_x, p.coefficients().p_coef)
    donor = upwind1_system(g, p, "donor").ext_row(3, 3)
    literal = upwind1_system(g, p, "literal").ext_row(3, 3)
    assert literal[(4, 3)] == pytest.approx(donor[(4, 3)] * v[3])
    with pytest.raises(ValueError):
        upwind1_system(g, p, "central")


def test_transport_rule_is_mirror_of_donor():
    p = ModelParams(0.5, 0.5, 0.0, 0.0, 1, 1)
    g = TensorGrid.uniform(5, 10.0)
    row = upwind1_system(g, p, "transport").ext_row(3, 3)
    assert (2, 3) in row and (4, 3) not in row


@pytest.mark.parametrize("grid", [TensorGrid.uniform(9, 10.0), graded_grid(9, 10.0, 4.0, 2.0)])
def test_second_order_exact_on_quadratics(grid):
    p = ModelParams(0.5, 0.3, 0.2, 0.05, 1, 1)
    c = p.coefficients()
    op = upwind2_system(grid, p)
    u = lambda x, y: 1 + x - 0.3 * y + 0.2 * x * x + 0.1 * y * y
    x, y = grid.centers()
    bx, by = op.boundary_points()
    lhs = (op.interior @ u(x, y).ravel() + op.boundary @ u(bx, by)).reshape(9, 9)
    exact = grid.measures() * (c.p_coef * x * (1 + 0.4 * x) + c.q_coef * y * (-0.3 + 0.2 * y) + c.omega * u(x, y))
    inner = ~boundary_adjacent_rows(9).reshape(9, 9)
    np.testing.assert_allclose(lhs[inner], exact[inner], rtol=1e-11)


def test_second_order_needs_four_cells():
    with pytest.raises(ValueError):
        upwind2_system(TensorGrid.uniform(3, 1.0), ModelParams(0.3, 0.3, 0, 0.1, 1, 1))


def test_second_order_boundary_rows_are_first_order():
    p = ModelParams(0.3, 0.3, 0.4, 0.1, 100, 1)
    g = TensorGrid.uniform(7, 300.0)
    a2 = upwind2_system(g, p).interior.toarray()
    a1 = upwind1_system(g, p).interior.toarray()
    mask = boundary_adjacent_rows(7)
    np.testing.assert_array_equal(a2[mask], a1[mask])
