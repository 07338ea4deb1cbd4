import numpy as np
import pytest
import sympy as sp
from hypothesis import given
import hypothesis.strategies as st

from fitted_mpfa.fitted import (
    assemble_fitted, degeneracy_rows, fitted_south_flux, fitted_system, fitted_west_flux,
)
from fitted_mpfa.grid import TensorGrid
from fitted_mpfa.model import ModelParams
from fitted_mpfa.mpfa import diffusion_system
from fitted_mpfa.upwind import upwind1_system, upwind2_system

from conftest import model_params


def _south_oracle(params, h, y1, xi, xnext):
    """Re-derive the south-edge flux: linear U on (0, y1), midpoint rule in x,
    forward difference in x, everything evaluated at y = y1/2."""
    u0, u1, un = sp.symbols("u0 u1 un")
    y = sp.Symbol("y")
    e = sp.Rational(1, 2) * sp.nsimplify(params.sigma2) ** 2
    k = sp.nsimplify(params.r) - sp.nsimplify(params.sigma2) ** 2 - sp.nsimplify(params.cross) / 2
    hp = sp.nsimplify(params.cross) / 2 * sp.nsimplify(xi)
    U = u0 + (u1 - u0) * y / y1
    flux = y * (e * y * sp.diff(U, y) + k * U) + y * hp * (un - u1) / (sp.nsimplify(xnext) - sp.nsimplify(xi))
    total = sp.expand(sp.nsimplify(h) * flux.subs(y, sp.nsimplify(y1) / 2))
    return [float(total.coeff(s)) for s in (u1, un, u0)]


def test_south_flux_table1_values():
    p = ModelParams(0.3, 0.3, 0.5, 0.1, 100, 1 / 6)
    g = TensorGrid.uniform(49, 300.0)
    c = fitted_south_flux(g, p, 1)
    assert g.axis_x.widths[1] == pytest.approx(6.0) and g.axis_y.nodes[1] == pytest.approx(6.0)
    ref = _south_oracle(p, 6, 6, 6, 12)
    np.testing.assert_allclose([c.owner, c.neighbor, c.axis], ref, rtol=1e-12)


@given(model_params(), st.integers(1, 8))
def test_south_flux_matches_two_point_derivation(p, i):
    g = TensorGrid.uniform(8, 50.0)
    c = fitted_south_flux(g, p, i)
    ax = g.axis_x
    ref = _south_oracle(p, ax.widths[i], g.axis_y.nodes[1], ax.nodes[i], ax.nodes[i + 1])
    np.testing.assert_allclose([c.owner, c.neighbor, c.axis], ref, rtol=1e-10, atol=1e-12)


def test_rho_zero_kills_neighbor():
    p = ModelParams(0.3, 0.4, 0.0, 0.1, 100, 1)
    g = TensorGrid.uniform(6, 300.0)
    assert np.all(fitted_south_flux(g, p, np.arange(1, 7)).neighbor == 0)
    assert np.all(fitted_west_flux(g, p, np.arange(1, 7)).neighbor == 0)


def test_e_equals_k_kills_axis_value():
    s2, cross = 0.4, 0.5 * 0.3 * 0.4
    p = ModelParams(0.3, s2, 0.5, 1.5 * s2**2 + 0.5 * cross, 100, 1)
    g = TensorGrid.uniform(6, 300.0)
    c = fitted_south_flux(g, p, 3)
    assert abs(c.axis) <= 1e-14 * abs(c.owner)


@given(model_params())
def test_west_is_mirror_of_south(p):
    g = TensorGrid.uniform(6, 300.0)
    swapped = ModelParams(p.sigma2, p.sigma1, p.rho, p.r, p.strike, p.maturity)
    idx = np.arange(1, 7)
    w = fitted_west_flux(g, p, idx)
    s = fitted_south_flux(g, swapped, idx)
    np.testing.assert_allclose([w.owner, w.neighbor, w.axis], [s.owner, s.neighbor, s.axis], rtol=1e-14)


def test_cross_terms_linear_in_rho():
    g = TensorGrid.uniform(6, 300.0)
    vals = [fitted_south_flux(g, ModelParams(0.3, 0.3, rho, 0.1, 100, 1), 2).neighbor for rho in (1e-3, 2e-3)]
    assert vals[1] == pytest.approx(2 * vals[0], rel=1e-12)


def test_index_range():
    g = TensorGrid.uniform(6, 300.0)
    p = ModelParams(0.3, 0.3, 0.5, 0.1, 100, 1)
    with pytest.raises(IndexError):
        fitted_south_flux(g, p, 0)
    with pytest.raises(IndexError):
        fitted_west_flux(g, p, 7)
    with pytest.raises(ValueError):
        fitted_system(g, p, order=3)


@pytest.mark.parametrize("order", [1, 2])
def test_differing_rows_are_exactly_the_degeneracy_rows(order):
    p = ModelParams(0.3, 0.45, 0.5, 0.1, 100, 1)
    g = TensorGrid.uniform(6, 300.0)
    conv = upwind1_system(g, p) if order == 1 else upwind2_system(g, p)
    plain = diffusion_system(g, p) + conv
    fit = fitted_system(g, p, order)
    d = np.abs(fit.interior.toarray() - plain.interior.toarray()).max(1)
    d += np.abs((fit.boundary - plain.boundary).toarray()).max(1)
    np.testing.assert_array_equal(d > 1e-13 * plain.interior.norm_inf(), degeneracy_rows(6))


def test_constant_field_rows_match_per_row_quadrature():
    # U = 1: diffusion vanishes, every face contributes its normal velocity times its length
    p = ModelParams(0.3, 0.45, 0.5, 0.1, 100, 1)
    n = 6
    g = TensorGrid.uniform(n, 300.0)
    a, f = assemble_fitted(g, p, lambda x, y, t: np.ones_like(x), order=1)
    got = (a @ np.ones(n * n) + f).reshape(n, n)
    c = p.coefficients()
    ax, ay = g.axis_x, g.axis_y
    want = np.empty((n, n))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            west = ax.nodes[1] / 2 if i == 1 else ax.nodes[i]  # fitted edge sits at x_1/2
            south = ay.nodes[1] / 2 if j == 1 else ay.nodes[j]
            want[i - 1, j - 1] = (c.p_coef * (ax.nodes[i + 1] - west) * ay.widths[j]
                                  + c.q_coef * (ay.nodes[j + 1] - south) * ax.widths[i])
    np.testing.assert_allclose(got, want, rtol=1e-11, atol=1e-11)
