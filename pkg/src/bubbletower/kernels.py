"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

Everything in this module is array-in / array-out and allocation-light:
panel quadrature reduction, bubble-tower evaluation, and the per-element
integrals behind the weighted P1 assembly. The backend is chosen once at
import time: numba when importable, unless the environment variable
``BUBBLETOWER_NUMBA`` is set to ``0`` (any other value, or an import
failure, selects the numpy path). ``backend()`` reports the choice so
tests and the benchmark can compare both paths explicitly.
"""

from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("BUBBLETOWER_NUMBA", "1").strip()
_WANT_NUMBA = _FLAG != "0"

if _WANT_NUMBA:
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _HAVE_NUMBA = False
else:
    _HAVE_NUMBA = False


def backend() -> str:
    """Return the active backend name, "numba" or "numpy"."""
    return "numba" if _HAVE_NUMBA else "numpy"


# ----------------------------------------------------------------------
# numpy reference implementations
# ----------------------------------------------------------------------

def _tower_values_np(r, deltas, alpha4, out):
    out[:] = 0.0
    for d in deltas:
        out += alpha4 * d / (d * d + r * r)
    return out


def _panel_reduce_np(fvals, jac, gw):
    # fvals: (n_panels, ng) integrand*weight values, jac: (n_panels,) half-widths
    return float(np.dot(fvals @ gw, jac))


def _mass_tridiag_np(nodes, wvals, gx, gw, diag, off):
    """Per-element Gauss integrals of w(r) * phi_a * phi_b * r^3.

    wvals holds w at the panel Gauss points, shape (n_elems, ng).
    Writes the tridiagonal (diag, off) of the assembled matrix.
    """
    a = nodes[:-1]
    b = nodes[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    rq = mid[:, None] + half[:, None] * gx[None, :]
    lam = 0.5 * (1.0 + gx)  # hat of the right node on the element
    base = wvals * rq**3
    waa = base @ (gw * (1.0 - lam) ** 2)
    wbb = base @ (gw * lam**2)
    wab = base @ (gw * lam * (1.0 - lam))
    diag[:] = 0.0
    diag[:-1] += half * waa
    diag[1:] += half * wbb
    off[:] = half * wab
    return diag, off


def _load_vector_np(nodes, gvals, gx, gw, out):
    """Per-element Gauss integrals of g(r) * phi_a * r^3 summed into nodes."""
    a = nodes[:-1]
    b = nodes[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    rq = mid[:, None] + half[:, None] * gx[None, :]
    lam = 0.5 * (1.0 + gx)
    base = gvals * rq**3
    la = base @ (gw * (1.0 - lam))
    lb = base @ (gw * lam)
    out[:] = 0.0
    out[:-1] += half * la
    out[1:] += half * lb
    return out


def _h1_seminorm_pairs_np(nodes, u, v):
    du = np.diff(u) / np.diff(nodes)
    dv = np.diff(v) / np.diff(nodes)
    q = 0.25 * np.diff(nodes**4)
    return float(np.dot(du * dv, q))


# ----------------------------------------------------------------------
# numba twins
# ----------------------------------------------------------------------

if _HAVE_NUMBA:

    @njit(cache=True)
    def _tower_values_nb(r, deltas, alpha4, out):
        n = r.shape[0]
        for i in range(n):
            acc = 0.0
            ri2 = r[i] * r[i]
            for j in range(deltas.shape[0]):
                d = deltas[j]
                acc += alpha4 * d / (d * d + ri2)
            out[i] = acc
        return out

    @njit(cache=True)
    def _panel_reduce_nb(fvals, jac, gw):
        total = 0.0
        for p in range(fvals.shape[0]):
            acc = 0.0
            for q in range(fvals.shape[1]):
                acc += fvals[p, q] * gw[q]
            total += acc * jac[p]
        return total

    @njit(cache=True)
    def _mass_tridiag_nb(nodes, wvals, gx, gw, diag, off):
        ne = nodes.shape[0] - 1
        ng = gx.shape[0]
        for i in range(nodes.shape[0]):
            diag[i] = 0.0
        for e in range(ne):
            a = nodes[e]
            b = nodes[e + 1]
            half = 0.5 * (b - a)
            mid = 0.5 * (a + b)
            waa = 0.0
            wbb = 0.0
            wab = 0.0
            for q in range(ng):
                rq = mid + half * gx[q]
                lam = 0.5 * (1.0 + gx[q])
                base = wvals[e, q] * rq**3 * gw[q]
                waa += base * (1.0 - lam) * (1.0 - lam)
                wbb += base * lam * lam
                wab += base * lam * (1.0 - lam)
            diag[e] += half * waa
            diag[e + 1] += half * wbb
            off[e] = half * wab
        return diag, off

    @njit(cache=True)
    def _load_vector_nb(nodes, gvals, gx, gw, out):
        ne = nodes.shape[0] - 1
        ng = gx.shape[0]
        for i in range(nodes.shape[0]):
            out[i] = 0.0
        for e in range(ne):
            a = nodes[e]
            b = nodes[e + 1]
            half = 0.5 * (b - a)
            mid = 0.5 * (a + b)
            la = 0.0
            lb = 0.0
            for q in range(ng):
                rq = mid + half * gx[q]
                lam = 0.5 * (1.0 + gx[q])
                base = gvals[e, q] * rq**3 * gw[q]
                la += base * (1.0 - lam)
                lb += base * lam
            out[e] += half * la
            out[e + 1] += half * lb
        return out

    @njit(cache=True)
    def _h1_seminorm_pairs_nb(nodes, u, v):
        total = 0.0
        for e in range(nodes.shape[0] - 1):
            h = nodes[e + 1] - nodes[e]
            du = (u[e + 1] - u[e]) / h
            dv = (v[e + 1] - v[e]) / h
            q = 0.25 * (nodes[e + 1] ** 4 - nodes[e] ** 4)
            total += du * dv * q
        return total

    tower_values = _tower_values_nb
    panel_reduce = _panel_reduce_nb
    mass_tridiag = _mass_tridiag_nb
    load_vector = _load_vector_nb
    h1_seminorm_pairs = _h1_seminorm_pairs_nb
else:
    tower_values = _tower_values_np
    panel_reduce = _panel_reduce_np
    mass_tridiag = _mass_tridiag_np
    load_vector = _load_vector_np
    h1_seminorm_pairs = _h1_seminorm_pairs_np

# numpy implementations stay importable under fixed names so the benchmark
# and the backend-equivalence tests can call both paths side by side.
NUMPY_IMPLS = {
    "tower_values": _tower_values_np,
    "panel_reduce": _panel_reduce_np,
    "mass_tridiag": _mass_tridiag_np,
    "load_vector": _load_vector_np,
    "h1_seminorm_pairs": _h1_seminorm_pairs_np,
}

ACTIVE_IMPLS = {
    "tower_values": tower_values,
    "panel_reduce": panel_reduce,
    "mass_tridiag": mass_tridiag,
    "load_vector": load_vector,
    "h1_seminorm_pairs": h1_seminorm_pairs,
}


def warmup() -> None:
    """Trigger JIT compilation of every kernel on tiny inputs."""
    nodes = np.array([0.5, 1.0, 2.0])
    u = np.array([0.0, 1.0, 0.0])
    gx = np.array([-0.577350269189626, 0.577350269189626])
    gw = np.array([1.0, 1.0])
    out3 = np.empty(3)
    tower_values(nodes, np.array([0.3]), 2.0, out3)
    panel_reduce(np.ones((2, 2)), np.ones(2), gw)
    mass_tridiag(nodes, np.ones((2, 2)), gx, gw, np.empty(3), np.empty(2))
    load_vector(nodes, np.ones((2, 2)), gx, gw, out3)
    h1_seminorm_pairs(nodes, u, u)
