import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bubbletower import build_mesh
from bubbletower.fem import (
    DirichletOperator,
    dirichlet_solve,
    gauss_values_of_nodal,
    h1_project_out,
    load_vector,
    mass_tridiag,
    stiffness_tridiag,
)
from bubbletower.quadrature import h1_inner

import oracles


def test_stiffness_matches_h1_inner():
    mesh = build_mesh(1e-2, 1.0, points_per_decade=24)
    rng = np.random.default_rng(3)
    u = rng.standard_normal(mesh.n_nodes)
    v = rng.standard_normal(mesh.n_nodes)
    u[0] = u[-1] = v[0] = v[-1] = 0.0
    diag, off = stiffness_tridiag(mesh)
    quad_form = float(u @ (diag * v) + u[:-1] @ (off * v[1:]) + u[1:] @ (off * v[:-1]))
    assert quad_form == pytest.approx(h1_inner(u, v, mesh), rel=1e-12)


def test_mass_matrix_row_sums_integrate_weight():
    # hats sum to one, so 1^T M 1 is the integral of the weight
    mesh = build_mesh(1e-2, 2.0, points_per_decade=32)
    diag, off = mass_tridiag(mesh, lambda r: np.exp(-r))
    total = float(diag.sum() + 2.0 * off.sum())
    F = lambda r: -math.exp(-r) * (r**3 + 3 * r**2 + 6 * r + 6)
    assert total == pytest.approx(oracles.SPHERE3_AREA * (F(2.0) - F(1e-2)), rel=1e-10)


def test_load_vector_total_integrates_source():
    mesh = build_mesh(1e-2, 2.0, points_per_decade=32)
    b = load_vector(mesh, lambda r: np.exp(-r))
    F = lambda r: -math.exp(-r) * (r**3 + 3 * r**2 + 6 * r + 6)
    assert float(b.sum()) == pytest.approx(
        oracles.SPHERE3_AREA * (F(2.0) - F(1e-2)), rel=1e-10
    )


def test_gauss_values_reproduce_linear_data():
    mesh = build_mesh(1e-2, 1.0, points_per_decade=16)
    u = 2.0 * mesh.nodes + 1.0
    from bubbletower.quadrature import panel_points

    rq, *_ = panel_points(mesh, 8)
    assert np.allclose(gauss_values_of_nodal(mesh, u), 2.0 * rq + 1.0, rtol=1e-13)


def manufactured_pair(a, b):
    # u = (r-a)(b-r), g = -u'' - 3 u'/r in the radial 4-D Laplacian
    u = lambda r: (r - a) * (b - r)
    g = lambda r: 2.0 - 3.0 * (a + b - 2.0 * r) / r
    return u, g


def test_dirichlet_solve_manufactured_solution():
    a, b = 0.1, 1.0
    u, g = manufactured_pair(a, b)
    errs = []
    for ppd in (32, 64):
        mesh = build_mesh(a, b, points_per_decade=ppd)
        v = dirichlet_solve(g, mesh)
        errs.append(np.max(np.abs(v - u(mesh.nodes))))
    assert errs[0] < 2e-3
    assert errs[1] < errs[0] / 3.0  # second-order elements


def test_operator_solve_inverts_apply():
    mesh = build_mesh(1e-3, 1.0, points_per_decade=32)
    op = DirichletOperator.build(mesh)
    rng = np.random.default_rng(11)
    x = rng.standard_normal(op.n_interior)
    assert np.allclose(op.solve(op.apply(x)), x, rtol=1e-10, atol=1e-12)


@given(seed=st.integers(0, 9999))
@settings(max_examples=15, deadline=None)
def test_projection_annihilates_basis_components(seed):
    mesh = build_mesh(1e-3, 1.0, points_per_decade=24)
    op = DirichletOperator.build(mesh)
    rng = np.random.default_rng(seed)
    basis = [rng.standard_normal(op.n_interior) for _ in range(3)]
    vec = rng.standard_normal(op.n_interior)
    out = h1_project_out(op, vec, basis)
    for a in basis:
        assert abs(op.inner(out, a)) < 1e-8 * op.norm(vec) * op.norm(a)
    # projecting twice changes nothing
    again = h1_project_out(op, out, basis)
    assert np.allclose(again, out, atol=1e-10 * np.max(np.abs(out)))


def test_projection_rejects_degenerate_basis():
    mesh = build_mesh(1e-3, 1.0, points_per_decade=16)
    op = DirichletOperator.build(mesh)
    v = np.ones(op.n_interior)
    with pytest.raises(ArithmeticError):
        h1_project_out(op, v.copy(), [v, v * (1.0 + 1e-15)])
