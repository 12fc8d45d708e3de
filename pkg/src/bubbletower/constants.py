"""Universal constants of the critical bubble in dimension four.

All radial integrals over R^4 reduce to one-dimensional integrals against
the weight r^3 times the area of the unit 3-sphere. The constants below are
evaluated two independent ways: in closed form, and by panel quadrature on
a truncated domain with the analytic tails appended. Agreement of the two
routes is part of the acceptance gate, so the quadrature route deliberately
avoids reusing the closed forms for anything except the tail corrections
beyond the truncation radius (where the integrands are plain rationals).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SPHERE3_AREA = 2.0 * math.pi**2  # area of the unit 3-sphere in R^4
ALPHA4 = 2.0 * math.sqrt(2.0)  # bubble amplitude in dimension 4

# truncation window for the quadrature route; tails are appended exactly
_TRUNC_LO = 1e-8
_TRUNC_HI = 1e6


@dataclass(frozen=True)
class UniversalConstants:
    """Dimension-four bubble constants used throughout the lab.

    alpha4: amplitude of the standard bubble delta/(delta^2+|x|^2) profile.
    sphere3_area: |S^3|, the radial-to-R^4 conversion factor.
    green_normalization: 1/(2|S^3|), the Green's function normalization.
    bubble_cubic_integral: integral of the unit bubble cubed over R^4.
    bubble_quartic_integral: integral of the unit bubble to the fourth power.
    hole_energy_constant: the |x|^-2 weighted bubble quartic integral that
        multiplies the (eps/delta)^2 hole correction in the energy.
    pair_interaction_constant: alpha4^4 |S^3|, the leading coefficient of the
        two-scale interaction integral.
    """

    alpha4: float
    sphere3_area: float
    green_normalization: float
    bubble_cubic_integral: float
    bubble_quartic_integral: float
    hole_energy_constant: float
    pair_interaction_constant: float

    @classmethod
    def exact(cls) -> "UniversalConstants":
        pi2 = math.pi**2
        return cls(
            alpha4=ALPHA4,
            sphere3_area=SPHERE3_AREA,
            green_normalization=1.0 / (4.0 * pi2),
            bubble_cubic_integral=8.0 * math.sqrt(2.0) * pi2,
            bubble_quartic_integral=32.0 * pi2 / 3.0,
            hole_energy_constant=32.0 * pi2,
            pair_interaction_constant=128.0 * pi2,
        )

    def identity_residuals(self) -> dict[str, float]:
        """Relative residuals of the two structural identities.

        The cubic integral equals alpha4 / green_normalization, and
        (cubic integral)^2 * green_normalization equals the hole constant.
        """
        a = self.bubble_cubic_integral
        r1 = abs(a - self.alpha4 / self.green_normalization) / a
        r2 = (
            abs(a * a * self.green_normalization - self.hole_energy_constant)
            / self.hole_energy_constant
        )
        return {"cubic_vs_green": r1, "squared_cubic_vs_hole": r2}


def robin_center(radius: float) -> float:
    """Robin function of the ball of given radius, evaluated at the center.

    The regular part of the Green's function on a centered ball is constant
    on the boundary data side, so the value at the center is the Green's
    normalization divided by radius squared.
    """
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    return 1.0 / (4.0 * math.pi**2 * radius**2)


def _log_panels(lo: float, hi: float, panels_per_decade: int = 4, order: int = 12):
    """Gauss-Legendre points/weights on log-spaced panels of [lo, hi]."""
    n_dec = math.log10(hi / lo)
    n_panels = max(1, math.ceil(panels_per_decade * n_dec))
    edges = np.geomspace(lo, hi, n_panels + 1)
    gx, gw = np.polynomial.legendre.leggauss(order)
    a = edges[:-1]
    b = edges[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    r = mid[:, None] + half[:, None] * gx[None, :]
    w = half[:, None] * gw[None, :]
    return r.ravel(), w.ravel()


def compute_constants() -> UniversalConstants:
    """Evaluate the bubble constants by weighted radial quadrature.

    Integrands are the unit-bubble profiles; the domain is truncated to
    [1e-8, 1e6] and the rational tails outside the window are integrated
    in closed form (head terms are quartic/quadratic in the lower cutoff
    and added at leading order, far below double precision here).
    """
    r, w = _log_panels(_TRUNC_LO, _TRUNC_HI)
    one = 1.0 + r * r

    cubic_1d = float(np.dot(w, r**3 / one**3))
    quartic_1d = float(np.dot(w, r**3 / one**4))
    hole_1d = float(np.dot(w, r / one**3))

    m, bigm = _TRUNC_LO, _TRUNC_HI
    t = 1.0 + bigm * bigm
    cubic_1d += m**4 / 4.0 + (0.5 / t - 0.25 / t**2)
    quartic_1d += m**4 / 4.0 + (0.25 / t**2 - 1.0 / (6.0 * t**3))
    hole_1d += m**2 / 2.0 + 0.25 / t**2

    return UniversalConstants(
        alpha4=ALPHA4,
        sphere3_area=SPHERE3_AREA,
        green_normalization=1.0 / (2.0 * SPHERE3_AREA),
        bubble_cubic_integral=SPHERE3_AREA * ALPHA4**3 * cubic_1d,
        bubble_quartic_integral=SPHERE3_AREA * ALPHA4**4 * quartic_1d,
        hole_energy_constant=SPHERE3_AREA * ALPHA4**4 * hole_1d,
        pair_interaction_constant=SPHERE3_AREA * ALPHA4**4,
    )
