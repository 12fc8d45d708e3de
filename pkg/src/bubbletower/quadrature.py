"""Weighted radial quadrature and discrete norms on graded meshes.

Integrals over the pierced ball reduce to |S^3| * integral of f(r) r^3 dr.
Closed-form integrands are integrated with composite Gauss-Legendre panels
on the mesh intervals; sampled (piecewise linear) data falls back to the
trapezoid rule on the same weight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .constants import SPHERE3_AREA
from .mesh import GradedMesh

DEFAULT_GAUSS_ORDER = 8

_trapezoid = getattr(np, "trapezoid", np.trapz)

_gauss_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_rule(order: int = DEFAULT_GAUSS_ORDER) -> tuple[np.ndarray, np.ndarray]:
    if order not in _gauss_cache:
        gx, gw = np.polynomial.legendre.leggauss(order)
        _gauss_cache[order] = (gx, gw)
    return _gauss_cache[order]


def panel_points(mesh: GradedMesh, order: int = DEFAULT_GAUSS_ORDER):
    """Gauss points per mesh interval, shape (n_elems, order), plus scale."""
    gx, gw = gauss_rule(order)
    a = mesh.nodes[:-1]
    b = mesh.nodes[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    rq = mid[:, None] + half[:, None] * gx[None, :]
    return rq, half, gx, gw


@dataclass
class RadialGridFunction:
    """Piecewise-linear radial profile sampled on a graded mesh."""

    mesh: GradedMesh
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.mesh.n_nodes,):
            raise ValueError("values must match mesh nodes")

    def __call__(self, r):
        return np.interp(r, self.mesh.nodes, self.values)


def integrate_radial(f, mesh: GradedMesh, order: int = DEFAULT_GAUSS_ORDER) -> float:
    """Integral of f over the annulus, f radial: |S^3| * int f(r) r^3 dr.

    f may be a callable accepting ndarray input or a RadialGridFunction;
    sampled data uses the r^3-weighted trapezoid rule instead of panels.
    """
    if isinstance(f, RadialGridFunction):
        if f.mesh is not mesh and not np.array_equal(f.mesh.nodes, mesh.nodes):
            raise ValueError("grid function lives on a different mesh")
        r = mesh.nodes
        return SPHERE3_AREA * float(_trapezoid(f.values * r**3, r))
    rq, half, gx, gw = panel_points(mesh, order)
    fvals = np.asarray(f(rq.ravel()), dtype=float).reshape(rq.shape)
    return SPHERE3_AREA * kernels.panel_reduce(fvals * rq**3, half, gw)


def lp_norm(f, mesh: GradedMesh, p: float, order: int = DEFAULT_GAUSS_ORDER) -> float:
    """L^p norm over the annulus of a radial profile or sampled data."""
    if p <= 0:
        raise ValueError("p must be positive")
    if isinstance(f, RadialGridFunction):
        r = mesh.nodes
        val = float(_trapezoid(np.abs(f.values) ** p * r**3, r))
        return (SPHERE3_AREA * val) ** (1.0 / p)
    rq, half, gx, gw = panel_points(mesh, order)
    fvals = np.abs(np.asarray(f(rq.ravel()), dtype=float)).reshape(rq.shape)
    return (SPHERE3_AREA * kernels.panel_reduce(fvals**p * rq**3, half, gw)) ** (
        1.0 / p
    )


def h1_inner(u: np.ndarray, v: np.ndarray, mesh: GradedMesh) -> float:
    """Dirichlet inner product |S^3| * int u' v' r^3 dr of nodal data.

    u, v are nodal values of piecewise-linear functions; the integral of
    the piecewise-constant derivative product is exact.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != (mesh.n_nodes,) or v.shape != (mesh.n_nodes,):
        raise ValueError("nodal data must match mesh nodes")
    return SPHERE3_AREA * kernels.h1_seminorm_pairs(mesh.nodes, u, v)


def h1_norm(u: np.ndarray, mesh: GradedMesh) -> float:
    return float(np.sqrt(max(h1_inner(u, u, mesh), 0.0)))
