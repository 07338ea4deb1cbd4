import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from fitted_mpfa.grid import TensorGrid
from fitted_mpfa.model import ModelParams
from fitted_mpfa.mpfa import (
    LocalGeometry, SingularInteractionError, assemble_diffusion, diffusion_system, half_edge_triplets,
    local_transmissibility, transmissibility_field, triangle_gradient, triangle_gradient_weights,
)
from fitted_mpfa.system import SplitOperator

from conftest import graded_grid, model_params


@st.composite
def triangles(draw):
    pts = np.array(draw(st.lists(st.floats(-10, 10), min_size=6, max_size=6))).reshape(3, 2)
    d1, d2 = pts[1] - pts[0], pts[2] - pts[0]
    area = 0.5 * abs(d1[0] * d2[1] - d1[1] * d2[0])
    span = np.ptp(pts, axis=0).max()
    from hypothesis import assume
    assume(span > 1e-3 and area > 1e-3 * span**2)
    return pts


@given(triangles(), st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
def test_gradient_exact_for_linear(tri, c, gx, gy):
    vals = c + gx * tri[:, 0] + gy * tri[:, 1]
    np.testing.assert_allclose(triangle_gradient(tri, vals), [gx, gy], atol=1e-8 * (1 + abs(c) + abs(gx) + abs(gy)))


def test_degenerate_triangle_rejected():
    with pytest.raises(ValueError):
        triangle_gradient_weights(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]))


def _grid_iv(n=5, x_max=6.0):
    g = TensorGrid.uniform(n, x_max)
    return g, LocalGeometry.from_grid(g, 3, 3)


def test_identity_tensor_gives_tpfa():
    g, geom = _grid_iv()
    t = local_transmissibility(geom, np.broadcast_to(np.eye(2), (4, 2, 2))).T
    dx = g.axis_x.spacing(1)
    half = 0.5 * dx
    # f_p = Gamma_p (u_high - u_low) / dx, no cross coupling
    expected = np.zeros((4, 4))
    for p, (lo, hi) in enumerate(((0, 1), (2, 3), (0, 2), (1, 3))):
        expected[p, lo], expected[p, hi] = -half / dx, half / dx
    np.testing.assert_allclose(t, expected, atol=1e-14)


def test_both_sides_agree_on_random_spd(rng):
    _, geom = _grid_iv()
    for _ in range(20):
        b = rng.normal(size=(4, 2, 2))
        tens = b @ np.swapaxes(b, -1, -2) + 0.1 * np.eye(2)
        lt = local_transmissibility(geom, tens)
        u = rng.normal(size=4)
        v = lt.edge_values(u)
        low = lt.C @ v + lt.F @ u
        high = lt.C_high @ v + lt.F_high @ u
        np.testing.assert_allclose(low, high, rtol=1e-10, atol=1e-12)
        np.testing.assert_allclose(lt.fluxes(u), low, rtol=1e-10, atol=1e-12)


def test_linear_field_flux_exact_for_constant_tensor(rng):
    _, geom = _grid_iv()
    b = rng.normal(size=(2, 2))
    k = b @ b.T + 0.5 * np.eye(2)
    lt = local_transmissibility(geom, np.broadcast_to(k, (4, 2, 2)))
    grad = np.array([0.7, -1.3])
    u = geom.centers @ grad
    expected = geom.lengths * (np.array([[1, 0], [1, 0], [0, 1], [0, 1]]) @ (k @ grad))
    np.testing.assert_allclose(lt.fluxes(u), expected, rtol=1e-12)


def test_zero_tensor_is_singular():
    _, geom = _grid_iv()
    with pytest.raises(SingularInteractionError):
        local_transmissibility(geom, np.zeros((4, 2, 2)))


@given(model_params())
def test_constant_annihilation(p):
    for g in (TensorGrid.uniform(6, 300.0), graded_grid(6)):
        op = diffusion_system(g, p)
        a, f = op.with_boundary(lambda x, y, t: np.ones_like(x))
        res = np.abs(a @ np.ones(36) + f).max()
        assert res <= 1e-11 * a.norm_inf()


def test_rho_zero_has_no_corner_coupling():
    p = ModelParams(0.3, 0.4, 0.0, 0.1, 100, 1)
    g = TensorGrid.uniform(7, 300.0)
    op = diffusion_system(g, p)
    scale = op.interior.norm_inf()
    for i in range(2, 7):
        for j in range(2, 7):
            row = op.ext_row(i, j)
            for di in (-1, 1):
                for dj in (-1, 1):
                    assert abs(row.get((i + di, j + dj), 0.0)) <= 1e-12 * scale


def test_diagonal_tensors_symmetric_operator():
    p = ModelParams(0.3, 0.4, 0.0, 0.1, 100, 1)
    a = diffusion_system(TensorGrid.uniform(8, 300.0), p).interior.toarray()
    assert np.abs(a - a.T).max() <= 1e-12 * np.abs(a).sum(1).max()


def test_nine_point_stencil():
    p = ModelParams(0.3, 0.4, 0.5, 0.1, 100, 1)
    op = diffusion_system(TensorGrid.uniform(7, 300.0), p)
    row = op.ext_row(4, 4)
    assert set(row) == {(4 + a, 4 + b) for a in (-1, 0, 1) for b in (-1, 0, 1)}


def test_skip_axis_faces_only_changes_axis_rows():
    p = ModelParams(0.3, 0.4, 0.5, 0.1, 100, 1)
    g = TensorGrid.uniform(6, 300.0)
    full = diffusion_system(g, p).interior.toarray()
    cut = diffusion_system(g, p, skip_axis_faces=True).interior.toarray()
    diff_rows = {divmod(k, 6) for k in np.flatnonzero(np.abs(full - cut).max(1) > 0)}
    assert diff_rows == {(i, j) for i in range(6) for j in range(6) if i == 0 or j == 0}


def test_assemble_diffusion_boundary_vector_linear_bc():
    p = ModelParams(0.3, 0.4, 0.5, 0.1, 100, 1)
    g = TensorGrid.uniform(5, 300.0)
    a, f = assemble_diffusion(g, p, lambda x, y, t: 2 * x + y)
    assert f.shape == (25,) and np.all(np.isfinite(f))
