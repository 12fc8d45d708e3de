"""Reduced energy of the tower ansatz and its limiting rate functional.

After the finite-dimensional reduction the energy of a k-scale tower is,
to leading order, k/4 times the quartic bubble integral plus a rate
functional Psi(x) = a1 x_1 + a2 / x_k + a3 sum x_{i+1}/x_i evaluated at the
squared rates, scaled by the eps power and log factor of the schedule.
Psi has a unique interior minimum available in closed form; the numeric
minimizer works in log coordinates and must land on the same point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bubbles import TowerConfig
from .constants import UniversalConstants, robin_center
from .mesh import build_mesh
from .quadrature import integrate_radial


@dataclass(frozen=True)
class PsiCoefficients:
    """Coefficients of the limiting rate functional for one tower setup."""

    k: int
    outer_weight: float  # a1: half the squared cubic integral times Robin value
    hole_weight: float  # a2: half the hole energy constant
    coupling_weight: float  # a3: |beta| pair constant / (2 (k+1))

    @classmethod
    def for_problem(cls, k: int, beta: float, outer: float) -> "PsiCoefficients":
        if k < 1:
            raise ValueError("k must be at least 1")
        if beta >= 0.0:
            raise ValueError("beta must be negative")
        uc = UniversalConstants.exact()
        a1 = 0.5 * uc.bubble_cubic_integral**2 * robin_center(outer)
        a2 = 0.5 * uc.hole_energy_constant
        a3 = abs(beta) * uc.pair_interaction_constant / (2.0 * (k + 1.0))
        return cls(k=k, outer_weight=a1, hole_weight=a2, coupling_weight=a3)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.outer_weight, self.hole_weight, self.coupling_weight)


def _check_x(coeffs: PsiCoefficients, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (coeffs.k,):
        raise ValueError(f"x must have length k = {coeffs.k}")
    if np.any(x <= 0.0):
        raise ValueError("x must be positive")
    return x


def psi_eval(coeffs: PsiCoefficients, x) -> float:
    x = _check_x(coeffs, x)
    a1, a2, a3 = coeffs.as_tuple()
    val = a1 * x[0] + a2 / x[-1]
    if coeffs.k > 1:
        val += a3 * float(np.sum(x[1:] / x[:-1]))
    return float(val)


def psi_grad(coeffs: PsiCoefficients, x) -> np.ndarray:
    x = _check_x(coeffs, x)
    a1, a2, a3 = coeffs.as_tuple()
    k = coeffs.k
    g = np.zeros(k)
    if k == 1:
        g[0] = a1 - a2 / x[0] ** 2
        return g
    g[0] = a1 - a3 * x[1] / x[0] ** 2
    for i in range(1, k - 1):
        g[i] = a3 * (1.0 / x[i - 1] - x[i + 1] / x[i] ** 2)
    g[k - 1] = -a2 / x[k - 1] ** 2 + a3 / x[k - 2]
    return g


def psi_hess(coeffs: PsiCoefficients, x) -> np.ndarray:
    x = _check_x(coeffs, x)
    a1, a2, a3 = coeffs.as_tuple()
    k = coeffs.k
    h = np.zeros((k, k))
    if k == 1:
        h[0, 0] = 2.0 * a2 / x[0] ** 3
        return h
    for i in range(k - 1):
        h[i, i] += 2.0 * a3 * x[i + 1] / x[i] ** 3
        h[i, i + 1] -= a3 / x[i] ** 2
        h[i + 1, i] -= a3 / x[i] ** 2
    h[k - 1, k - 1] += 2.0 * a2 / x[k - 1] ** 3
    return h


def theorem_rates(coeffs: PsiCoefficients) -> np.ndarray:
    """Optimal rates d_j straight from the closed-form product expression."""
    a1, a2, a3 = coeffs.as_tuple()
    k = coeffs.k
    j = np.arange(1, k + 1, dtype=float)
    # d_j^2 = (2 a2)^(j/(k+1)) (2 a1)^(j/(k+1) - 1) (2 a3)^(1 - 2 j/(k+1))
    # written through the original constants to stay a genuine cross-check
    t = j / (k + 1.0)
    d2 = (2.0 * a2) ** t * (2.0 * a1) ** (t - 1.0) * (2.0 * a3) ** (1.0 - 2.0 * t)
    return np.sqrt(d2)


def minimizer_closed_form(coeffs: PsiCoefficients) -> dict:
    """Unique critical point of Psi on the open cone, in closed form.

    x_i = (a2/a3)^(i/(k+1)) (a3/a1)^((k+1-i)/(k+1)); the optimal rates are
    the square roots. The independent product expression for the rates must
    agree to 1e-12 relative, else the coefficients are inconsistent.
    """
    a1, a2, a3 = coeffs.as_tuple()
    k = coeffs.k
    i = np.arange(1, k + 1, dtype=float)
    x = (a2 / a3) ** (i / (k + 1.0)) * (a3 / a1) ** ((k + 1.0 - i) / (k + 1.0))
    d = np.sqrt(x)
    d_ref = theorem_rates(coeffs)
    mismatch = float(np.max(np.abs(d - d_ref) / d_ref))
    if mismatch > 1e-12:
        raise ArithmeticError(
            f"closed-form rate expressions disagree by {mismatch:.3e}"
        )
    return {
        "x": x,
        "d": d,
        "value": psi_eval(coeffs, x),
        "grad_norm": float(np.linalg.norm(psi_grad(coeffs, x))),
        "cross_check_mismatch": mismatch,
    }


def psi_minimize_numeric(
    coeffs: PsiCoefficients,
    x0=None,
    grad_tol: float = 1e-13,
    max_iter: int = 200,
) -> dict:
    """Damped Newton minimization of Psi in log coordinates.

    Working in y = log x keeps iterates positive and makes the functional
    strictly convex near the minimum. Steps are halved (floor 2^-20) until
    the value decreases; convergence is declared when the gradient norm
    falls below grad_tol relative to the current value.
    """
    k = coeffs.k
    if x0 is None:
        y = np.zeros(k)
    else:
        x0 = _check_x(coeffs, x0)
        y = np.log(x0)

    val = psi_eval(coeffs, np.exp(y))
    for it in range(max_iter):
        x = np.exp(y)
        g = psi_grad(coeffs, x)
        gy = x * g
        if np.linalg.norm(gy) <= grad_tol * max(abs(val), 1.0):
            return {"x": x, "value": val, "iterations": it, "converged": True}
        h = psi_hess(coeffs, x)
        hy = (x[:, None] * h * x[None, :]) + np.diag(gy)
        step = None
        ridge = 0.0
        for _ in range(50):
            try:
                step = np.linalg.solve(hy + ridge * np.eye(k), -gy)
                if np.dot(step, gy) < 0.0:
                    break
            except np.linalg.LinAlgError:
                pass
            ridge = max(2.0 * ridge, 1e-8 * np.trace(hy) / k)
        if np.linalg.norm(step) <= 1e-6:
            # inside the quadratic basin the value differences fall below
            # double-precision resolution; the undamped Newton step is a
            # contraction there and the gradient test decides convergence
            y = y + step
            val = psi_eval(coeffs, np.exp(y))
            continue
        t = 1.0
        while t >= 2.0**-20:
            y_new = y + t * step
            val_new = psi_eval(coeffs, np.exp(y_new))
            if val_new < val:
                y, val = y_new, val_new
                break
            t *= 0.5
        else:
            return {"x": np.exp(y), "value": val, "iterations": it, "converged": False}
    return {"x": np.exp(y), "value": val, "iterations": max_iter, "converged": False}


def optimal_rates(k: int, beta: float, outer: float) -> np.ndarray:
    """Optimal rate vector d* for the given tower size and coupling."""
    return minimizer_closed_form(PsiCoefficients.for_problem(k, beta, outer))["d"]


# ----------------------------------------------------------------------
# energy of the pure ansatz
# ----------------------------------------------------------------------

def reduced_energy_eval(
    config: TowerConfig, points_per_decade: int = 64, order: int = 8
) -> float:
    """Energy of the normalized tower ansatz, by closed-form quadrature.

    The functional is sum_i (1/2 |grad W_i|^2 - 1/4 W_i^4) minus beta/2
    times the pairwise squared products, with W_i the sum of the projected
    bubbles of component i. Gradient terms convert to cubic-source weak
    forms, so every integrand is rational and panel quadrature is exact to
    machine precision on the graded mesh.
    """
    deltas = config.deltas()
    mesh = build_mesh(
        config.eps, config.outer, scales=tuple(deltas), points_per_decade=points_per_decade
    )
    bubbles = config.projected_bubbles()
    comps = [config.component_callable(i, bubbles) for i in range(config.m)]

    total = 0.0
    for i in range(config.m):
        idx = config.component_scale_indices(i)
        wi = comps[i]
        for a in idx:
            ua = bubbles[a - 1].bubble
            for b in idx:
                pb = bubbles[b - 1]
                total += 0.5 * integrate_radial(
                    lambda r: ua(r) ** 3 * pb(r), mesh, order
                )
        total -= 0.25 * integrate_radial(lambda r: wi(r) ** 4, mesh, order)
    for i in range(config.m):
        for j in range(i + 1, config.m):
            wi, wj = comps[i], comps[j]
            total -= 0.5 * config.beta * integrate_radial(
                lambda r: wi(r) ** 2 * wj(r) ** 2, mesh, order
            )
    return float(total)


def expansion_check(config: TowerConfig, points_per_decade: int = 64) -> dict:
    """Compare the measured ansatz energy against the rate functional.

    Subtracts the k bubble quarters, rescales by the schedule's eps power
    and log factor, and reports the ratio against Psi at the squared rates.
    """
    uc = UniversalConstants.exact()
    k = config.k
    eps = config.eps
    measured = reduced_energy_eval(config, points_per_decade)
    logterm = math.log(1.0 / eps)
    scale = eps ** (2.0 / (k + 1.0)) * logterm ** ((k - 1.0) / (k + 1.0))
    gap_scaled = (measured - k * uc.bubble_quartic_integral / 4.0) / scale

    coeffs = PsiCoefficients.for_problem(k, config.beta, config.outer)
    x = np.asarray(config.d, dtype=float) ** 2
    psi_val = psi_eval(coeffs, x)
    return {
        "energy": measured,
        "gap_scaled": gap_scaled,
        "psi_at_rates": psi_val,
        "ratio": gap_scaled / psi_val,
        "deviation": abs(gap_scaled / psi_val - 1.0),
        "eps": eps,
    }
