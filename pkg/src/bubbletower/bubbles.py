"""Bubbles, their annulus projections, tower partitions, and rate schedules.

The standard bubble in dimension four is alpha4 * delta / (delta^2 + r^2).
Its projection onto zero Dirichlet data on the annulus [inner, outer]
subtracts the radial harmonic function c1 + c2 / r^2 matching the bubble at
both radii; with the exact 2x2 solve the projection, its delta-derivative,
and the expansion residual are all available in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import ALPHA4


class PartitionError(ValueError):
    """Invalid tower partition; carries the violated condition and witness."""

    def __init__(self, condition: int, message: str):
        super().__init__(f"partition condition ({condition}) violated: {message}")
        self.condition = condition


def validate_partition(k: int, groups) -> tuple[frozenset, ...]:
    """Check the five partition conditions in their fixed order.

    groups is a sequence of index collections (1-based scale indices);
    conditions: (1) the first group contains index 1, (2) every group is
    nonempty, (3) groups are pairwise disjoint, (4) the union is 1..k,
    (5) no group contains two consecutive indices. The first violated
    condition is reported.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    gs = [frozenset(int(j) for j in g) for g in groups]
    if not gs:
        raise PartitionError(2, "no groups given")
    if 1 not in gs[0]:
        raise PartitionError(1, f"first group {sorted(gs[0])} does not contain 1")
    for i, g in enumerate(gs):
        if not g:
            raise PartitionError(2, f"group {i + 1} is empty")
    seen: dict[int, int] = {}
    for i, g in enumerate(gs):
        for j in g:
            if j in seen:
                raise PartitionError(
                    3, f"index {j} appears in groups {seen[j] + 1} and {i + 1}"
                )
            seen[j] = i
    universe = set(range(1, k + 1))
    got = set(seen)
    if got != universe:
        missing = sorted(universe - got)
        extra = sorted(got - universe)
        raise PartitionError(4, f"missing {missing}, out of range {extra}")
    for i, g in enumerate(gs):
        for j in sorted(g):
            if j + 1 in g:
                raise PartitionError(
                    5, f"group {i + 1} contains consecutive indices {j}, {j + 1}"
                )
    return tuple(gs)


@dataclass(frozen=True)
class Partition:
    """Partition of scale indices 1..k into component groups."""

    k: int
    groups: tuple[frozenset, ...]

    @classmethod
    def of(cls, k: int, groups) -> "Partition":
        return cls(k=k, groups=validate_partition(k, groups))

    @classmethod
    def alternating(cls, k: int, m: int = 2) -> "Partition":
        """Round-robin assignment 1..k over m components; valid for m >= 2,
        and the k = m = 1 single-scale case."""
        if k == 1 and m == 1:
            return cls.of(1, [[1]])
        gs = [[] for _ in range(m)]
        for j in range(1, k + 1):
            gs[(j - 1) % m].append(j)
        return cls.of(k, gs)

    @property
    def m(self) -> int:
        return len(self.groups)

    def component_of(self, j: int) -> int:
        for i, g in enumerate(self.groups):
            if j in g:
                return i
        raise KeyError(j)

    def as_lists(self) -> list[list[int]]:
        return [sorted(g) for g in self.groups]


def rate_schedule(eps: float, k: int, d) -> np.ndarray:
    """Concentration scales delta_j = d_j eps^(j/(k+1)) log(1/eps)^(1/2-j/(k+1)).

    Logs are natural. Requires 0 < eps < 1 so the log factor is positive.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    d = np.asarray(d, dtype=float)
    if d.shape != (k,) or np.any(d <= 0.0):
        raise ValueError("d must be k positive reals")
    j = np.arange(1, k + 1, dtype=float)
    expo = j / (k + 1.0)
    logterm = math.log(1.0 / eps)
    return d * eps**expo * logterm ** (0.5 - expo)


def schedule_diagnostics(eps: float, deltas: np.ndarray, outer: float) -> dict:
    """Separation ratios that must vanish for the ansatz to make sense."""
    deltas = np.asarray(deltas, dtype=float)
    ratios = deltas[1:] / deltas[:-1] if deltas.size > 1 else np.empty(0)
    return {
        "hole_over_smallest": eps / float(deltas[-1]),
        "largest_over_outer": float(deltas[0]) / outer,
        "successive_ratios": ratios,
    }


@dataclass(frozen=True)
class Bubble:
    """Standard bubble concentrated at scale delta, centered at the origin."""

    delta: float

    def __post_init__(self):
        if self.delta <= 0.0:
            raise ValueError("delta must be positive")

    def __call__(self, r):
        d = self.delta
        return ALPHA4 * d / (d * d + np.square(r))

    def deriv_delta(self, r):
        """Derivative of the bubble with respect to its scale."""
        d = self.delta
        r2 = np.square(r)
        return ALPHA4 * (r2 - d * d) / (d * d + r2) ** 2


def _harmonic_match(inner: float, outer: float, val_in: float, val_out: float):
    """Coefficients of c1 + c2/r^2 matching the given boundary values."""
    denom = inner**-2 - outer**-2
    c2 = (val_in - val_out) / denom
    c1 = val_out - c2 / outer**2
    return c1, c2


@dataclass(frozen=True)
class ProjectedBubble:
    """Bubble minus its radial harmonic correction on the annulus.

    The corrected profile vanishes at both radii and keeps the bubble's
    Laplacian, so it is the zero-Dirichlet projection in closed form.
    """

    delta: float
    inner: float
    outer: float
    c1: float = field(init=False)
    c2: float = field(init=False)

    def __post_init__(self):
        if not 0.0 < self.inner < self.outer:
            raise ValueError("need 0 < inner < outer")
        u = Bubble(self.delta)
        c1, c2 = _harmonic_match(
            self.inner, self.outer, float(u(self.inner)), float(u(self.outer))
        )
        object.__setattr__(self, "c1", c1)
        object.__setattr__(self, "c2", c2)

    @property
    def bubble(self) -> Bubble:
        return Bubble(self.delta)

    def correction(self, r):
        return self.c1 + self.c2 / np.square(r)

    def __call__(self, r):
        return self.bubble(r) - self.correction(r)


@dataclass(frozen=True)
class ProjectedDBubble:
    """Scale-derivative of the projected bubble, again in closed form.

    Differentiating the boundary match in delta shows the harmonic
    correction of the derivative bubble has coefficients dc1, dc2 equal to
    the delta-derivatives of the projection coefficients.
    """

    delta: float
    inner: float
    outer: float
    dc1: float = field(init=False)
    dc2: float = field(init=False)

    def __post_init__(self):
        u = Bubble(self.delta)
        dc1, dc2 = _harmonic_match(
            self.inner,
            self.outer,
            float(u.deriv_delta(self.inner)),
            float(u.deriv_delta(self.outer)),
        )
        object.__setattr__(self, "dc1", dc1)
        object.__setattr__(self, "dc2", dc2)

    def __call__(self, r):
        return Bubble(self.delta).deriv_delta(r) - self.dc1 - self.dc2 / np.square(r)


def project_bubble(delta: float, inner: float, outer: float) -> ProjectedBubble:
    return ProjectedBubble(delta=delta, inner=inner, outer=outer)


def project_dbubble(delta: float, inner: float, outer: float) -> ProjectedDBubble:
    return ProjectedDBubble(delta=delta, inner=inner, outer=outer)


def projection_expansion_error(delta: float, eps: float, outer: float) -> dict:
    """Residual of the two-term projection expansion, on a log grid.

    The expansion approximates the harmonic correction by the constant
    Robin term plus the hole monopole (alpha4/delta) (eps/r)^2. The exact
    residual is the difference of two harmonic profiles, so it is a
    constant plus an r^-2 term; we report its sup over [2 eps, outer], the
    sup weighted by the proved envelope
    delta * (eps^2 (1 + eps delta^-3)/r^2 + delta^2 + (eps/delta)^2),
    and the sup over the far window [sqrt(2 eps outer), outer] where the
    hole term is subdominant.
    """
    pb = ProjectedBubble(delta=delta, inner=eps, outer=outer)
    # cubic integral * delta * robin value reduces to alpha4 * delta / outer^2
    const_term = ALPHA4 * delta / outer**2
    hole_coeff = (ALPHA4 / delta) * eps**2

    r = np.geomspace(2.0 * eps, outer, 4001)
    residual = (const_term - pb.c1) + (hole_coeff - pb.c2) / r**2
    envelope = delta * (
        eps**2 * (1.0 + eps / delta**3) / r**2 + delta**2 + (eps / delta) ** 2
    )
    far_lo = math.sqrt(2.0 * eps * outer)
    far = r >= far_lo
    return {
        "radii": r,
        "residual": residual,
        "max_abs": float(np.max(np.abs(residual))),
        "max_envelope_ratio": float(np.max(np.abs(residual) / envelope)),
        "max_abs_far": float(np.max(np.abs(residual[far]))),
        "far_window": (far_lo, outer),
    }


@dataclass(frozen=True)
class TowerConfig:
    """Geometry, physics, and rate parameters of one tower problem.

    Component i of the ansatz is the sum of projected bubbles at the scales
    whose indices lie in partition group i, scaled by mu_i^(-1/2). Rates d
    live in the compact box [eta, 1/eta].
    """

    outer: float
    eps: float
    partition: Partition
    beta: float
    mu: tuple[float, ...]
    d: tuple[float, ...]
    eta: float = 0.05

    def __post_init__(self):
        if self.outer <= 0.0:
            raise ValueError("outer radius must be positive")
        if not 0.0 < self.eps < self.outer:
            raise ValueError("need 0 < eps < outer")
        if self.eps >= 1.0:
            raise ValueError("eps must be below 1 for the rate schedule")
        if self.beta >= 0.0:
            raise ValueError("coupling beta must be negative (competitive)")
        if len(self.mu) != self.partition.m or any(v <= 0.0 for v in self.mu):
            raise ValueError("mu must be m positive reals")
        if len(self.d) != self.partition.k or any(v <= 0.0 for v in self.d):
            raise ValueError("d must be k positive reals")
        if not 0.0 < self.eta < 1.0:
            raise ValueError("eta must lie in (0, 1)")
        box = (self.eta, 1.0 / self.eta)
        if any(not box[0] <= v <= box[1] for v in self.d):
            raise ValueError(f"rates d must lie in [{box[0]}, {box[1]}]")
        deltas = self.deltas()
        if self.eps / deltas[-1] >= 1.0:
            raise ValueError("hole radius must sit below the smallest scale")
        if deltas[0] >= self.outer:
            raise ValueError("largest scale must sit below the outer radius")

    @property
    def k(self) -> int:
        return self.partition.k

    @property
    def m(self) -> int:
        return self.partition.m

    def deltas(self) -> np.ndarray:
        return rate_schedule(self.eps, self.k, self.d)

    def projected_bubbles(self) -> list[ProjectedBubble]:
        return [
            ProjectedBubble(delta=float(dj), inner=self.eps, outer=self.outer)
            for dj in self.deltas()
        ]

    def component_scale_indices(self, i: int) -> list[int]:
        return sorted(self.partition.groups[i])

    def component_callable(self, i: int, bubbles=None):
        """Closed-form ansatz component i (no mu scaling): sum of its
        projected bubbles."""
        if bubbles is None:
            bubbles = self.projected_bubbles()
        mine = [bubbles[j - 1] for j in self.component_scale_indices(i)]

        def profile(r):
            acc = mine[0](r)
            for pb in mine[1:]:
                acc = acc + pb(r)
            return acc

        return profile
