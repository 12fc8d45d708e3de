"""Damped Newton solution of the radial system from the tower ansatz.

The discrete unknowns are the m component profiles on the shared graded
mesh, interleaved node-major so the Jacobian is a narrow banded matrix.
Internally everything runs in normalized variables (self-interaction
coefficients scaled to one); the stored solution folds the 1/sqrt(mu)
prefactor back in, which makes the scaling equivariance exact by
construction rather than a solver property.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import cholesky, eigvalsh, solve_banded, solve_triangular
from scipy.optimize import least_squares

from .bubbles import TowerConfig, project_dbubble
from .constants import ALPHA4
from .fem import (
    DirichletOperator,
    gauss_values_of_nodal,
    load_vector,
    mass_tridiag,
)
from .mesh import GradedMesh, build_mesh
from .quadrature import RadialGridFunction, h1_norm, integrate_radial

MAX_TOWER_HEIGHT = 4
MIN_HOLE_RADIUS = 1e-9
MAX_POINTS_PER_DECADE = 256


class ConvergenceError(RuntimeError):
    """Newton failed; carries the residual history for diagnosis."""

    def __init__(self, message: str, history: list[float]):
        super().__init__(message)
        self.history = history


class PositivityError(RuntimeError):
    """A converged iterate has non-positive interior values."""


class RateFitError(RuntimeError):
    """Scale extraction left too much residual to trust the fit."""


class ContinuationError(RuntimeError):
    """A sweep solve failed; partial results are attached."""

    def __init__(self, eps: float, results: list, cause: Exception):
        super().__init__(f"continuation failed at eps={eps:g}: {cause}")
        self.eps = eps
        self.results = results
        self.cause = cause


def enforce_envelope(k: int, eps: float, points_per_decade: int) -> None:
    """Refuse runs outside the double-precision comfort zone."""
    if k > MAX_TOWER_HEIGHT:
        raise ValueError(
            f"tower height {k} exceeds the supported maximum {MAX_TOWER_HEIGHT}; "
            "scale separation would leave double precision"
        )
    if eps < MIN_HOLE_RADIUS:
        raise ValueError(
            f"hole radius {eps:g} below the supported minimum {MIN_HOLE_RADIUS:g}"
        )
    if points_per_decade > MAX_POINTS_PER_DECADE:
        raise ValueError(
            f"points_per_decade {points_per_decade} exceeds the supported "
            f"maximum {MAX_POINTS_PER_DECADE}"
        )


@dataclass(frozen=True)
class NewtonOptions:
    tol: float = 1e-10  # on the energy-norm residual, relative to the ansatz
    max_iters: int = 50
    backtrack_floor: float = 2.0**-20
    armijo: float = 1e-4
    check_jacobian: bool = False

    def __post_init__(self):
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True)
class SystemState:
    """Discrete m-component solution with convergence metadata."""

    config: TowerConfig
    mesh: GradedMesh
    u: tuple[RadialGridFunction, ...]
    residual_h1: float  # relative to the ansatz energy norm
    newton_iters: int
    converged: bool
    history: tuple[float, ...] = ()
    ansatz_norm: float = 0.0

    def normalized(self) -> np.ndarray:
        """Component profiles with the 1/sqrt(mu) prefactor removed."""
        mu = np.asarray(self.config.mu, dtype=float)
        return np.array(
            [math.sqrt(mu[i]) * self.u[i].values for i in range(len(self.u))]
        )


@dataclass(frozen=True)
class RateFit:
    deltas: tuple[float, ...]
    d: tuple[float, ...]
    residual_rel: float
    schedule_deltas: tuple[float, ...]


# ----------------------------------------------------------------------
# assembly in normalized variables
# ----------------------------------------------------------------------

def _ansatz_nodal(config: TowerConfig, mesh: GradedMesh) -> np.ndarray:
    """Normalized tower ansatz, full nodal values per component."""
    bubbles = config.projected_bubbles()
    rows = []
    for i in range(config.m):
        prof = config.component_callable(i, bubbles)
        vals = prof(mesh.nodes)
        vals[0] = 0.0
        vals[-1] = 0.0
        rows.append(vals)
    return np.array(rows)


def _source_gauss(v_gauss: np.ndarray, beta: float) -> np.ndarray:
    """f(v_i) + beta v_i sum_{j != i} v_j^2 at the panel Gauss points."""
    m = v_gauss.shape[0]
    clipped = np.maximum(v_gauss, 0.0)
    total_sq = np.sum(v_gauss**2, axis=0)
    out = np.empty_like(v_gauss)
    for i in range(m):
        out[i] = clipped[i] ** 3 + beta * v_gauss[i] * (total_sq - v_gauss[i] ** 2)
    return out


def residual_normalized(
    v: np.ndarray, op: DirichletOperator, mesh: GradedMesh, beta: float
) -> tuple[np.ndarray, float]:
    """Weak residual per component (interior) and its Riesz energy norm."""
    m = v.shape[0]
    v_gauss = np.array([gauss_values_of_nodal(mesh, v[i]) for i in range(m)])
    source = _source_gauss(v_gauss, beta)
    res = np.empty((m, op.n_interior))
    sq = 0.0
    for i in range(m):
        res[i] = op.apply(v[i][1:-1]) - load_vector(mesh, source[i])[1:-1]
        sq += float(np.dot(res[i], op.solve(res[i])))
    return res, math.sqrt(max(sq, 0.0))


def _jacobian_banded(
    v: np.ndarray, op: DirichletOperator, mesh: GradedMesh, beta: float
) -> np.ndarray:
    """Banded storage of the interleaved Jacobian K - M(v)."""
    m = v.shape[0]
    n = op.n_interior
    bw = 2 * m - 1
    ab = np.zeros((2 * bw + 1, m * n))
    v_gauss = np.array([gauss_values_of_nodal(mesh, v[i]) for i in range(m)])
    clipped = np.maximum(v_gauss, 0.0)
    total_sq = np.sum(v_gauss**2, axis=0)

    cols = np.arange(n)
    for i in range(m):
        for j in range(m):
            if i == j:
                w = 3.0 * clipped[i] ** 2 + beta * (total_sq - v_gauss[i] ** 2)
            else:
                w = 2.0 * beta * v_gauss[i] * v_gauss[j]
            md, mo = mass_tridiag(mesh, w)
            d = -md[1:-1]
            o = -mo[1:-1]
            if i == j:
                d = d + op.diag
                o = o + op.off
            ab[bw + i - j, cols * m + j] += d
            ab[bw + m + i - j, cols[:-1] * m + j] += o
            ab[bw - m + i - j, cols[1:] * m + j] += o
    return ab


def _coupling_mass_blocks(
    v: np.ndarray, mesh: GradedMesh, beta: float
) -> list[list[tuple[np.ndarray, np.ndarray]]]:
    """Interior tridiagonals of the linearization's mass part, per block."""
    m = v.shape[0]
    v_gauss = np.array([gauss_values_of_nodal(mesh, v[i]) for i in range(m)])
    clipped = np.maximum(v_gauss, 0.0)
    total_sq = np.sum(v_gauss**2, axis=0)
    blocks = []
    for i in range(m):
        row = []
        for j in range(m):
            if i == j:
                w = 3.0 * clipped[i] ** 2 + beta * (total_sq - v_gauss[i] ** 2)
            else:
                w = 2.0 * beta * v_gauss[i] * v_gauss[j]
            md, mo = mass_tridiag(mesh, w)
            row.append((md[1:-1], mo[1:-1]))
        blocks.append(row)
    return blocks


def _fd_jacobian_check(
    v: np.ndarray, op: DirichletOperator, mesh: GradedMesh, beta: float, rng
) -> float:
    """Relative gap between J·w and a centered difference of the residual."""
    m, n_full = v.shape
    w = rng.standard_normal((m, n_full))
    w[:, 0] = 0.0
    w[:, -1] = 0.0
    w /= np.sqrt(np.sum(w**2))
    h = 1e-6
    rp, _ = residual_normalized(v + h * w, op, mesh, beta)
    rm, _ = residual_normalized(v - h * w, op, mesh, beta)
    fd = (rp - rm) / (2.0 * h)
    ab = _jacobian_banded(v, op, mesh, beta)
    flat = np.empty(m * op.n_interior)
    for i in range(m):
        flat[i::m] = w[i][1:-1]
    bw = 2 * m - 1
    jw = _banded_matvec(ab, bw, flat)
    jw_comp = np.array([jw[i::m] for i in range(m)])
    return float(
        np.linalg.norm(jw_comp - fd) / max(np.linalg.norm(fd), 1e-300)
    )


def _banded_matvec(ab: np.ndarray, bw: int, x: np.ndarray) -> np.ndarray:
    n = x.size
    out = np.zeros(n)
    for off in range(-bw, bw + 1):
        band = ab[bw + off]
        if off >= 0:
            out[off:] += band[: n - off] * x[: n - off] if off else band * x
        else:
            out[: n + off] += band[-off:] * x[-off:]
    return out


# ----------------------------------------------------------------------
# Newton iteration
# ----------------------------------------------------------------------

def _energy_dot(a: np.ndarray, b: np.ndarray, op: DirichletOperator) -> float:
    return sum(op.inner(a[i][1:-1], b[i][1:-1]) for i in range(a.shape[0]))


def _rate_span_basis(
    config: TowerConfig,
    mesh: GradedMesh,
    op: DirichletOperator,
    deltas,
) -> list[np.ndarray]:
    """Energy-orthonormal nodal span of the tower's scale derivatives.

    These directions carry the smallest eigenvalues of the linearization,
    shrinking as the hole does, and dominate the Newton step once the
    scale separation is large. The span must track the iterate's actual
    scales, not the schedule, or it goes stale as the iterate drifts.
    """
    basis: list[np.ndarray] = []
    for i in range(config.m):
        for l in config.component_scale_indices(i):
            psi = project_dbubble(deltas[l - 1], config.eps, config.outer)
            z = np.zeros((config.m, mesh.n_nodes))
            z[i] = psi(mesh.nodes)
            z[i, 0] = 0.0
            z[i, -1] = 0.0
            for b in basis:
                z = z - _energy_dot(z, b, op) * b
            nrm = math.sqrt(max(_energy_dot(z, z, op), 0.0))
            if nrm > 0.0:
                basis.append(z / nrm)
    return basis


def newton_solve(
    config: TowerConfig,
    options: NewtonOptions | None = None,
    points_per_decade: int = 64,
    mesh: GradedMesh | None = None,
) -> SystemState:
    """Solve the system from the tower ansatz; normalized inside, mu folded out."""
    opts = options or NewtonOptions()
    enforce_envelope(config.k, config.eps, points_per_decade)
    if mesh is None:
        mesh = build_mesh(
            config.eps,
            config.outer,
            scales=tuple(config.deltas()),
            points_per_decade=points_per_decade,
        )
    op = DirichletOperator.build(mesh)
    beta = config.beta
    m = config.m

    v = _ansatz_nodal(config, mesh)
    ansatz_norm = math.sqrt(
        sum(op.inner(v[i][1:-1], v[i][1:-1]) for i in range(m))
    )
    rng = np.random.default_rng(0) if opts.check_jacobian else None

    res, rnorm = residual_normalized(v, op, mesh, beta)
    history = [rnorm / ansatz_norm]
    iters = 0
    theta = np.log(config.deltas())
    while history[-1] > opts.tol:
        if iters >= opts.max_iters:
            raise ConvergenceError(
                f"no convergence in {opts.max_iters} iterations "
                f"(relative residual {history[-1]:.3e})",
                history,
            )
        if opts.check_jacobian:
            gap = _fd_jacobian_check(v, op, mesh, beta, rng)
            if gap > 1e-4:
                raise ConvergenceError(
                    f"jacobian mismatch {gap:.3e} against finite differences",
                    history,
                )
        ab = _jacobian_banded(v, op, mesh, beta)
        bw = 2 * m - 1
        rhs = np.empty(m * op.n_interior)
        for i in range(m):
            rhs[i::m] = -res[i]
        step_flat = solve_banded((bw, bw), ab, rhs)
        step = np.zeros_like(v)
        for i in range(m):
            step[i][1:-1] = step_flat[i::m]

        t = 1.0
        accepted = False
        while t >= 0.25:
            trial = v + t * step
            res_t, rnorm_t = residual_normalized(trial, op, mesh, beta)
            if rnorm_t <= (1.0 - opts.armijo * t) * rnorm:
                v, res, rnorm = trial, res_t, rnorm_t
                accepted = True
                break
            t *= 0.5
        if not accepted:
            # Damping the joint step stalls when it is dominated by the
            # nearly-flat scale directions; split off that span and damp
            # the two parts separately. The transverse remainder sits
            # above an O(1) spectral gap and takes a full-length step,
            # while the flat part gets its own plain-decrease search.
            theta, _ = _fit_scale_logs(config, mesh, v, theta)
            rate_basis = _rate_span_basis(config, mesh, op, np.exp(theta))
            coeffs = [_energy_dot(step, b, op) for b in rate_basis]
            s_flat = np.zeros_like(step)
            for c, b in zip(coeffs, rate_basis):
                s_flat += c * b
            s_perp = step - s_flat
            t = 1.0
            while True:
                trial = v + t * s_perp
                res_t, rnorm_t = residual_normalized(trial, op, mesh, beta)
                if rnorm_t <= (1.0 - opts.armijo * t) * rnorm:
                    v, res, rnorm = trial, res_t, rnorm_t
                    break
                t *= 0.5
                if t < opts.backtrack_floor:
                    raise ConvergenceError(
                        "backtracking hit its floor without residual decrease",
                        history,
                    )
            t = 1.0
            while t >= opts.backtrack_floor:
                trial = v + t * s_flat
                res_t, rnorm_t = residual_normalized(trial, op, mesh, beta)
                if rnorm_t < rnorm:
                    v, res, rnorm = trial, res_t, rnorm_t
                    break
                t *= 0.5
        iters += 1
        history.append(rnorm / ansatz_norm)

    interior = v[:, 1:-1]
    if np.any(interior <= 0.0):
        worst = float(interior.min())
        raise PositivityError(
            f"converged iterate has non-positive interior values (min {worst:.3e})"
        )

    mu = np.asarray(config.mu, dtype=float)
    fields = tuple(
        RadialGridFunction(mesh, v[i] / math.sqrt(mu[i])) for i in range(m)
    )
    return SystemState(
        config=config,
        mesh=mesh,
        u=fields,
        residual_h1=history[-1],
        newton_iters=iters,
        converged=True,
        history=tuple(history),
        ansatz_norm=ansatz_norm,
    )


def assemble_residual(state: SystemState) -> tuple[np.ndarray, float]:
    """Weak residual of a state in normalized variables, plus its norm."""
    op = DirichletOperator.build(state.mesh)
    v = state.normalized()
    res, rnorm = residual_normalized(v, op, state.mesh, state.config.beta)
    return res, rnorm / (state.ansatz_norm or 1.0)


def assemble_jacobian(state: SystemState) -> np.ndarray:
    """Banded Jacobian of the normalized system at the state's iterate."""
    op = DirichletOperator.build(state.mesh)
    return _jacobian_banded(state.normalized(), op, state.mesh, state.config.beta)


# ----------------------------------------------------------------------
# rate extraction and corrector
# ----------------------------------------------------------------------

def _sample_indices(mesh: GradedMesh, lo: float, hi: float, cap: int = 160) -> np.ndarray:
    idx = np.where((mesh.nodes >= lo) & (mesh.nodes <= hi))[0]
    if idx.size > cap:
        stride = int(np.ceil(idx.size / cap))
        idx = idx[::stride]
    return idx


def _fit_scale_logs(
    config: TowerConfig,
    mesh: GradedMesh,
    v: np.ndarray,
    theta0: np.ndarray,
) -> tuple[np.ndarray, float]:
    """Least-squares log-scales of a raw bubble sum fitted to profiles.

    Samples radii where the raw bubble sum is actually the right local
    model. Boundary corrections are (eps/r)^2 and (r/R)^2 relative, so
    the global window [10 eps, R/10] keeps each at or below 1%. On top
    of that, the competitive coupling digs an order-one pointwise dent
    in component i around every OTHER component's concentration scale
    (small in energy, large in relative size). The dent response is
    flat inside the foreign scale and decays like (delta_l/r)^2 outside
    it, so its size relative to the local profile is
    min(1, (delta_l/r)^2) * model_i(delta_l) / model_i(r); radii where
    that bound exceeds dent_tol are dropped per component. This also
    drops the regions where the dent persists (inward for foreign
    scales below the component's own, outward for ones above).
    """
    schedule = config.deltas()
    radii = mesh.nodes
    groups = [config.component_scale_indices(i) for i in range(config.m)]
    lo = 10.0 * config.eps
    hi = 0.1 * config.outer
    dent_tol = 0.02

    def bubble_sum(i: int, r) -> np.ndarray:
        out = np.zeros_like(np.asarray(r, dtype=float))
        for j in groups[i]:
            dj = schedule[j - 1]
            out += ALPHA4 * dj / (dj**2 + np.asarray(r) ** 2)
        return out

    sample_idx = []
    for i in range(config.m):
        keep = (radii >= lo) & (radii <= hi)
        own = bubble_sum(i, radii)
        for l in range(1, config.k + 1):
            if l in groups[i]:
                continue
            dl = schedule[l - 1]
            tail = np.minimum(1.0, (dl / np.maximum(radii, dl * 1e-12)) ** 2)
            keep &= tail * float(bubble_sum(i, dl)) <= dent_tol * own
        idx = np.where(keep)[0]
        if idx.size > 160:
            idx = idx[:: int(np.ceil(idx.size / 160))]
        if idx.size < 4 + len(groups[i]):
            raise RateFitError(
                f"component {i + 1} has too few clean sample radii to fit"
            )
        sample_idx.append(idx)

    data = [v[i][sample_idx[i]] for i in range(config.m)]
    floor = [1e-3 * np.max(np.abs(d)) for d in data]

    def model_residual(theta: np.ndarray) -> np.ndarray:
        deltas = np.exp(theta)
        out = []
        for i in range(config.m):
            r_s = radii[sample_idx[i]]
            pred = np.zeros_like(r_s)
            for j in groups[i]:
                dj = deltas[j - 1]
                pred += ALPHA4 * dj / (dj**2 + r_s**2)
            out.append((pred - data[i]) / (np.abs(data[i]) + floor[i]))
        return np.concatenate(out)

    sol = least_squares(model_residual, theta0, method="lm", xtol=1e-14, ftol=1e-14)
    resid = model_residual(sol.x)
    return sol.x, float(np.sqrt(np.mean(resid**2)))


def extract_rates(state: SystemState) -> RateFit:
    """Fit the tower's concentration scales to the computed profiles.

    Nonlinear least squares in the logs of the scales, matching a raw
    bubble sum to each component at radii away from both boundaries, with
    residuals weighted relative to the local profile size.
    """
    config = state.config
    schedule = config.deltas()
    theta0 = np.log(schedule)
    theta, residual_rel = _fit_scale_logs(
        config, state.mesh, state.normalized(), theta0
    )
    fitted = np.exp(theta)
    if residual_rel > 0.2:
        raise RateFitError(
            f"rate fit residual {residual_rel:.3f} exceeds 20% of signal"
        )
    if np.any(np.diff(fitted) >= 0.0):
        raise RateFitError("fitted scales are not strictly decreasing")

    k = config.k
    eps = config.eps
    logterm = math.log(1.0 / eps)
    j = np.arange(1, k + 1, dtype=float)
    base = eps ** (j / (k + 1.0)) * logterm ** (0.5 - j / (k + 1.0))
    return RateFit(
        deltas=tuple(float(x) for x in fitted),
        d=tuple(float(x) for x in fitted / base),
        residual_rel=residual_rel,
        schedule_deltas=tuple(float(x) for x in schedule),
    )


def corrector_norm(state: SystemState, fit: RateFit | None = None) -> dict:
    """Energy norm of the remainder off the closest tower in energy.

    The pointwise fit's scales are first polished by minimizing the
    energy distance to the solution. That matters: a remainder taken at
    slightly-off scales contains a multiple of the tower's scale
    derivatives, which carry order-one energy per percent of mismatch
    and would mask the actual corrector. The polished remainder is
    energy-orthogonal to the scale derivatives, the same orthogonality
    the corrector is defined with.

    Works in normalized variables so the report is directly comparable
    across self-interaction coefficients.
    """
    if fit is None:
        fit = extract_rates(state)
    config = state.config
    mesh = state.mesh
    op = DirichletOperator.build(mesh)
    v = state.normalized()
    base = np.asarray(config.deltas()) / np.asarray(config.d)
    owner = np.empty(config.k, dtype=int)
    for i in range(config.m):
        for l in config.component_scale_indices(i):
            owner[l - 1] = i

    theta = np.log(np.asarray(fit.deltas))
    for _ in range(40):
        deltas = np.exp(theta)
        cfg_t = replace(config, d=tuple(deltas / base))
        resid = v - _ansatz_nodal(cfg_t, mesh)
        z = []
        for l in range(config.k):
            psi = project_dbubble(deltas[l], config.eps, config.outer)
            col = np.zeros_like(v)
            col[owner[l]] = deltas[l] * psi(mesh.nodes)
            col[owner[l], 0] = 0.0
            col[owner[l], -1] = 0.0
            z.append(col)
        gram = np.array([[_energy_dot(a, b, op) for b in z] for a in z])
        rhs = np.array([_energy_dot(resid, b, op) for b in z])
        dtheta = np.linalg.solve(gram, rhs)
        theta = theta + dtheta
        if np.max(np.abs(dtheta)) < 1e-13:
            break

    deltas = np.exp(theta)
    cfg_t = replace(config, d=tuple(deltas / base))
    tower = _ansatz_nodal(cfg_t, mesh)
    per = []
    for i in range(config.m):
        phi = v[i] - tower[i]
        per.append(h1_norm(phi, mesh))
    total = float(np.sqrt(np.sum(np.square(per))))
    eps = config.eps
    k = config.k
    delta1 = float(deltas[0])
    scale = eps ** (1.0 / (k + 1.0)) * math.log(1.0 / eps) ** (-1.0 / (k + 1.0))
    return {
        "per_component": [float(x) for x in per],
        "total": total,
        "over_delta1": total / delta1,
        "over_scale": total / scale,
        "delta1": delta1,
        "deltas_energy": [float(x) for x in deltas],
    }


# ----------------------------------------------------------------------
# continuation and spectral check
# ----------------------------------------------------------------------

def continuation_sweep(
    config: TowerConfig,
    eps_values,
    options: NewtonOptions | None = None,
    points_per_decade: int = 64,
    compute_sigma: bool = False,
) -> list[dict]:
    """Solve along a decreasing eps sequence, warm-starting the rates.

    Each solve regenerates the ansatz at the new eps with the previous
    fit's rate coefficients, since the solution family is parametrized by
    them. Failures abort the sweep but keep the finished rows attached to
    the raised error.
    """
    eps_values = [float(e) for e in eps_values]
    if any(b >= a for a, b in zip(eps_values, eps_values[1:])):
        raise ValueError("eps values must be strictly decreasing")
    results: list[dict] = []
    d_current = tuple(config.d)
    for eps in eps_values:
        cfg = replace(config, eps=eps, d=d_current)
        try:
            state = newton_solve(cfg, options, points_per_decade)
            fit = extract_rates(state)
            phi = corrector_norm(state, fit)
            row = {
                "eps": eps,
                "state": state,
                "fit": fit,
                "deltas": list(fit.deltas),
                "d": list(fit.d),
                "newton_iters": state.newton_iters,
                "residual_h1": state.residual_h1,
                "phi": phi,
            }
            if compute_sigma:
                sig = projected_linearization_sigma_min(state)
                row["sigma_min"] = sig["sigma_min"]
                row["sigma_min_unprojected"] = sig["sigma_min_unprojected"]
            results.append(row)
            d_current = fit.d
        except Exception as exc:  # propagate with partial results attached
            raise ContinuationError(eps, results, exc) from exc
    return results


def ansatz_state(
    config: TowerConfig, points_per_decade: int = 64
) -> SystemState:
    """Unconverged state holding the pure tower ansatz (mu folded in)."""
    enforce_envelope(config.k, config.eps, points_per_decade)
    mesh = build_mesh(
        config.eps,
        config.outer,
        scales=tuple(config.deltas()),
        points_per_decade=points_per_decade,
    )
    op = DirichletOperator.build(mesh)
    v = _ansatz_nodal(config, mesh)
    ansatz_norm = math.sqrt(
        sum(op.inner(v[i][1:-1], v[i][1:-1]) for i in range(config.m))
    )
    _, rnorm = residual_normalized(v, op, mesh, config.beta)
    mu = np.asarray(config.mu, dtype=float)
    fields = tuple(
        RadialGridFunction(mesh, v[i] / math.sqrt(mu[i])) for i in range(config.m)
    )
    return SystemState(
        config=config,
        mesh=mesh,
        u=fields,
        residual_h1=rnorm / ansatz_norm,
        newton_iters=0,
        converged=False,
        history=(rnorm / ansatz_norm,),
        ansatz_norm=ansatz_norm,
    )


def functional_energy(state: SystemState) -> float:
    """Value of the energy functional at the stored solution."""
    config = state.config
    mesh = state.mesh
    op = DirichletOperator.build(mesh)
    mu = config.mu
    us = [u.values for u in state.u]
    total = 0.0
    for i, ui in enumerate(us):
        total += 0.5 * op.inner(ui[1:-1], ui[1:-1])
        total -= 0.25 * mu[i] * integrate_radial(RadialGridFunction(mesh, ui**4), mesh)
    for i in range(len(us)):
        for j in range(i + 1, len(us)):
            quartic = RadialGridFunction(mesh, us[i] ** 2 * us[j] ** 2)
            total -= 0.5 * config.beta * integrate_radial(quartic, mesh)
    return float(total)


def _tridiag_dense(diag: np.ndarray, off: np.ndarray) -> np.ndarray:
    a = np.diag(diag)
    a += np.diag(off, 1)
    a += np.diag(off, -1)
    return a


def projected_linearization_sigma_min(state: SystemState) -> dict:
    """Smallest energy-relative singular value off the near-kernel span.

    Whitens the linearized quadratic form with the Cholesky factor of the
    stiffness, so singular values are plain eigenvalue magnitudes of a
    symmetric matrix; the near-kernel directions are the projected
    scale-derivative bubbles, removed by restricting to an orthonormal
    complement. The unrestricted minimum is reported for contrast.
    """
    config = state.config
    mesh = state.mesh
    op = DirichletOperator.build(mesh)
    v = state.normalized()
    m = config.m
    n = op.n_interior

    k_dense = _tridiag_dense(op.diag, op.off)
    chol_l = cholesky(k_dense, lower=True)
    blocks = _coupling_mass_blocks(v, mesh, config.beta)

    big = np.zeros((m * n, m * n))
    for i in range(m):
        big[i * n : (i + 1) * n, i * n : (i + 1) * n] = np.eye(n)
        for j in range(m):
            c = _tridiag_dense(*blocks[i][j])
            t1 = solve_triangular(chol_l, c, lower=True)
            t2 = solve_triangular(chol_l, t1.T, lower=True).T
            big[i * n : (i + 1) * n, j * n : (j + 1) * n] -= t2
    big = 0.5 * (big + big.T)

    deltas = config.deltas()
    kernel_cols = []
    for i in range(m):
        for l in config.component_scale_indices(i):
            psi = project_dbubble(deltas[l - 1], config.eps, config.outer)
            vec = np.zeros(m * n)
            vec[i * n : (i + 1) * n] = chol_l.T @ psi(mesh.nodes)[1:-1]
            kernel_cols.append(vec)
    kmat = np.column_stack(kernel_cols)
    q_full, _ = np.linalg.qr(kmat, mode="complete")
    comp = q_full[:, kmat.shape[1] :]

    restricted = comp.T @ big @ comp
    restricted = 0.5 * (restricted + restricted.T)
    sigma = float(np.min(np.abs(eigvalsh(restricted))))
    sigma_unproj = float(np.min(np.abs(eigvalsh(big))))
    return {
        "sigma_min": sigma,
        "sigma_min_unprojected": sigma_unproj,
        "n_dofs": m * n,
        "kernel_dim": kmat.shape[1],
    }
