"""Run configuration: documented schema, TOML ingestion, and round-trip.

Schema (all keys; defaults in parentheses):

    [domain]    R (1.0), eps                  outer radius, hole radius
    [tower]     k (1), m (1), partition       partition as list of lists,
                                              default alternating groups
    [physics]   beta (-1.0), mu ([1.0]*m)
    [rates]     d ("star")                    "star" or list of k positives
    [solver]    tol (1e-10), max_iters (50)
    [quadrature] points_per_decade (64)
    [sweep]     eps_list                      decreasing; replaces domain.eps
    [report]    seed (0), out_dir ("runs")

Either domain.eps or sweep.eps_list must be present (both is fine: solve
uses eps, sweep uses the list). Tolerances are the solver tol plus the
acceptance bands hard-coded in the test suite; they can be overridden per
run on the command line.

tomllib/tomli reads the files; writing uses the small emitter below, which
covers exactly the schema's value types (no external writer dependency).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .bubbles import Partition, TowerConfig
from .solver import enforce_envelope


@dataclass(frozen=True)
class RunConfig:
    outer: float = 1.0
    eps: float | None = None
    k: int = 1
    m: int = 1
    partition: tuple[tuple[int, ...], ...] = ((1,),)
    beta: float = -1.0
    mu: tuple[float, ...] = (1.0,)
    d: str | tuple[float, ...] = "star"
    tol: float = 1e-10
    max_iters: int = 50
    points_per_decade: int = 64
    eps_list: tuple[float, ...] | None = None
    seed: int = 0
    out_dir: str = "runs"

    def __post_init__(self):
        Partition.of(self.k, self.partition)  # raises on invalid grouping
        if self.beta >= 0.0:
            raise ValueError(
                "physics.beta must be negative; cooperative couplings are "
                "outside the supported regime"
            )
        if any(v <= 0.0 for v in self.mu):
            raise ValueError("physics.mu entries must be positive")
        if len(self.mu) != self.m:
            raise ValueError(f"mu must list {self.m} coefficients")
        if self.eps is None and not self.eps_list:
            raise ValueError("config needs domain.eps or sweep.eps_list")
        for e in self.all_eps():
            if not 0.0 < e < self.outer:
                raise ValueError(f"hole radius {e:g} outside (0, R)")
            enforce_envelope(self.k, e, self.points_per_decade)
        if isinstance(self.d, str):
            if self.d != "star":
                raise ValueError("rates.d must be \"star\" or a list of k values")
        elif len(self.d) != self.k:
            raise ValueError(f"rates.d must list {self.k} coefficients")
        if self.eps_list is not None and list(self.eps_list) != sorted(
            self.eps_list, reverse=True
        ):
            raise ValueError("sweep.eps_list must be strictly decreasing")

    def all_eps(self) -> tuple[float, ...]:
        out = []
        if self.eps is not None:
            out.append(self.eps)
        if self.eps_list:
            out.extend(self.eps_list)
        return tuple(out)

    def rate_coefficients(self) -> tuple[float, ...]:
        if isinstance(self.d, str):
            from .reduced import optimal_rates

            return tuple(float(x) for x in optimal_rates(self.k, self.beta, self.outer))
        return tuple(self.d)

    def tower_config(self, eps: float | None = None) -> TowerConfig:
        if eps is None:
            eps = self.eps if self.eps is not None else self.eps_list[0]
        return TowerConfig(
            outer=self.outer,
            eps=float(eps),
            partition=Partition.of(self.k, self.partition),
            beta=self.beta,
            mu=self.mu,
            d=self.rate_coefficients(),
        )


def _default_partition(k: int, m: int) -> tuple[tuple[int, ...], ...]:
    part = Partition.alternating(k, m)
    return tuple(tuple(sorted(g)) for g in part.as_lists())


def parse_config(text: str) -> RunConfig:
    """Build a RunConfig from TOML text, applying schema defaults."""
    raw = tomllib.loads(text)
    known = {"domain", "tower", "physics", "rates", "solver", "quadrature", "sweep", "report"}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown config sections: {sorted(unknown)}")

    domain = raw.get("domain", {})
    tower = raw.get("tower", {})
    physics = raw.get("physics", {})
    rates = raw.get("rates", {})
    solver = raw.get("solver", {})
    quad = raw.get("quadrature", {})
    sweep = raw.get("sweep", {})
    report = raw.get("report", {})

    k = int(tower.get("k", 1))
    m = int(tower.get("m", 1))
    partition = tower.get("partition")
    if partition is None:
        partition = _default_partition(k, m)
    else:
        partition = tuple(tuple(int(i) for i in group) for group in partition)

    mu = physics.get("mu", [1.0] * m)
    d = rates.get("d", "star")
    if not isinstance(d, str):
        d = tuple(float(x) for x in d)

    eps = domain.get("eps")
    eps_list = sweep.get("eps_list")
    return RunConfig(
        outer=float(domain.get("R", 1.0)),
        eps=None if eps is None else float(eps),
        k=k,
        m=m,
        partition=partition,
        beta=float(physics.get("beta", -1.0)),
        mu=tuple(float(x) for x in mu),
        d=d,
        tol=float(solver.get("tol", 1e-10)),
        max_iters=int(solver.get("max_iters", 50)),
        points_per_decade=int(quad.get("points_per_decade", 64)),
        eps_list=None if eps_list is None else tuple(float(x) for x in eps_list),
        seed=int(report.get("seed", 0)),
        out_dir=str(report.get("out_dir", "runs")),
    )


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


# ----------------------------------------------------------------------
# writing
# ----------------------------------------------------------------------

def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError("non-finite float in config")
        text = repr(v)
        # repr of an integral float ("1.0") is already valid TOML; bare
        # exponent forms ("1e-05") are too
        return text
    if isinstance(v, str):
        escaped = v.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__} to TOML")


def dump_config(cfg: RunConfig) -> str:
    """TOML text a later parse_config reproduces field for field."""
    sections: list[tuple[str, list[tuple[str, object]]]] = [
        ("domain", [("R", cfg.outer)] + ([("eps", cfg.eps)] if cfg.eps is not None else [])),
        (
            "tower",
            [
                ("k", cfg.k),
                ("m", cfg.m),
                ("partition", [list(g) for g in cfg.partition]),
            ],
        ),
        ("physics", [("beta", cfg.beta), ("mu", list(cfg.mu))]),
        ("rates", [("d", cfg.d if isinstance(cfg.d, str) else list(cfg.d))]),
        ("solver", [("tol", cfg.tol), ("max_iters", cfg.max_iters)]),
        ("quadrature", [("points_per_decade", cfg.points_per_decade)]),
    ]
    if cfg.eps_list is not None:
        sections.append(("sweep", [("eps_list", list(cfg.eps_list))]))
    sections.append(("report", [("seed", cfg.seed), ("out_dir", cfg.out_dir)]))

    lines = []
    for name, items in sections:
        lines.append(f"[{name}]")
        for key, value in items:
            lines.append(f"{key} = {_toml_value(value)}")
        lines.append("")
    return "\n".join(lines)


def save_config(cfg: RunConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_config(cfg))
