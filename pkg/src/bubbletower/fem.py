"""Weighted P1 finite elements for the radial Laplacian on the annulus.

The weak problem is |S^3| int u' v' r^3 dr = |S^3| int g v r^3 dr over
functions vanishing at both radii. Piecewise-linear elements on the graded
mesh give a symmetric positive definite tridiagonal stiffness matrix whose
off-ball weight r^3 is integrated exactly; loads and weighted mass matrices
use per-element Gauss panels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky_banded, cho_solve_banded

from . import kernels
from .constants import SPHERE3_AREA
from .mesh import GradedMesh
from .quadrature import gauss_rule, panel_points

LOAD_GAUSS_ORDER = 8


def stiffness_tridiag(mesh: GradedMesh) -> tuple[np.ndarray, np.ndarray]:
    """Tridiagonal (diag, off) of the r^3-weighted stiffness, all nodes.

    Element contribution is q_e / h_e^2 with q_e the exact integral of r^3,
    scaled by |S^3|.
    """
    nodes = mesh.nodes
    h = np.diff(nodes)
    q = SPHERE3_AREA * 0.25 * np.diff(nodes**4)
    w = q / h**2
    diag = np.zeros(mesh.n_nodes)
    diag[:-1] += w
    diag[1:] += w
    return diag, -w


def mass_tridiag(mesh: GradedMesh, weight) -> tuple[np.ndarray, np.ndarray]:
    """Tridiagonal (diag, off) of the weighted mass matrix, all nodes.

    weight is a callable on radii or per-Gauss-point values of shape
    (n_elems, order).
    """
    rq, half, gx, gw = panel_points(mesh, LOAD_GAUSS_ORDER)
    if callable(weight):
        wvals = np.asarray(weight(rq.ravel()), dtype=float).reshape(rq.shape)
    else:
        wvals = np.asarray(weight, dtype=float)
        if wvals.shape != rq.shape:
            raise ValueError("weight values must match panel Gauss points")
    diag = np.empty(mesh.n_nodes)
    off = np.empty(mesh.n_nodes - 1)
    kernels.mass_tridiag(mesh.nodes, wvals, gx, gw, diag, off)
    return SPHERE3_AREA * diag, SPHERE3_AREA * off


def load_vector(mesh: GradedMesh, g) -> np.ndarray:
    """Weighted load <g, phi_a> for every node, via per-element Gauss."""
    rq, half, gx, gw = panel_points(mesh, LOAD_GAUSS_ORDER)
    if callable(g):
        gvals = np.asarray(g(rq.ravel()), dtype=float).reshape(rq.shape)
    else:
        gvals = np.asarray(g, dtype=float)
        if gvals.shape != rq.shape:
            raise ValueError("load values must match panel Gauss points")
    out = np.empty(mesh.n_nodes)
    kernels.load_vector(mesh.nodes, gvals, gx, gw, out)
    return SPHERE3_AREA * out


def gauss_values_of_nodal(mesh: GradedMesh, u: np.ndarray) -> np.ndarray:
    """P1 interpolant of nodal data at the panel Gauss points."""
    gx, _ = gauss_rule(LOAD_GAUSS_ORDER)
    lam = 0.5 * (1.0 + gx)
    ua = u[:-1, None]
    ub = u[1:, None]
    return ua + (ub - ua) * lam[None, :]


@dataclass
class DirichletOperator:
    """Factorized interior stiffness operator of one mesh.

    Provides solves against interior load vectors and discrete H1 inner
    products; reused across Newton iterations and projections.
    """

    mesh: GradedMesh
    diag: np.ndarray
    off: np.ndarray
    _chol: tuple = None

    @classmethod
    def build(cls, mesh: GradedMesh) -> "DirichletOperator":
        diag, off = stiffness_tridiag(mesh)
        return cls(mesh=mesh, diag=diag[1:-1], off=off[1:-1])

    @property
    def n_interior(self) -> int:
        return self.diag.size

    def _factor(self):
        if self._chol is None:
            n = self.n_interior
            ab = np.zeros((2, n))
            ab[0, 1:] = self.off
            ab[1, :] = self.diag
            self._chol = cholesky_banded(ab)
        return self._chol

    def solve(self, rhs_interior: np.ndarray) -> np.ndarray:
        """Solve the interior stiffness system K x = rhs."""
        cb = self._factor()
        return cho_solve_banded((cb, False), rhs_interior)

    def apply(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        y[:-1] += self.off * x[1:]
        y[1:] += self.off * x[:-1]
        return y

    def inner(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(np.dot(x, self.apply(y)))

    def norm(self, x: np.ndarray) -> float:
        return float(np.sqrt(max(self.inner(x, x), 0.0)))


def dirichlet_solve(g, mesh: GradedMesh, operator: DirichletOperator = None) -> np.ndarray:
    """Solve -Laplace v = g radially with zero data at both radii.

    Returns nodal values on the full mesh (zeros at the endpoints). g is a
    radial callable or per-Gauss-point values.
    """
    op = operator if operator is not None else DirichletOperator.build(mesh)
    b = load_vector(mesh, g)[1:-1]
    v = np.zeros(mesh.n_nodes)
    v[1:-1] = op.solve(b)
    return v


def h1_project_out(
    op: DirichletOperator, vec: np.ndarray, basis: list[np.ndarray], cond_limit: float = 1e12
) -> np.ndarray:
    """Remove the H1(A)-span of the basis vectors from vec (interior data).

    Solves the Gram system of the basis in the stiffness inner product;
    refuses when the Gram matrix is ill-conditioned beyond cond_limit.
    """
    if not basis:
        return vec.copy()
    gram = np.array([[op.inner(a, b) for b in basis] for a in basis])
    cond = np.linalg.cond(gram)
    if cond > cond_limit:
        raise ArithmeticError(
            f"projection basis nearly degenerate: cond(gram) = {cond:.3e}"
        )
    rhs = np.array([op.inner(a, vec) for a in basis])
    coef = np.linalg.solve(gram, rhs)
    out = vec.copy()
    for c, a in zip(coef, basis):
        out -= c * a
    return out
