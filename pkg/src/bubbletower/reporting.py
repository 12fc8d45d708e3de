"""Run records, plots, and the consolidated report document.

A RunRecord is one command's full output: config snapshot, tool version,
named results, verdicts, and wall-clock timings. Records serialize to JSON
with sorted keys so identical runs produce identical bytes; timings are
kept in a separate field and excluded from the equality helper, since they
are the one legitimately non-reproducible part.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

import numpy as np  # noqa: E402

from . import __version__

RECORD_SUFFIX = ".record.json"


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__} in a run record")


@dataclass
class RunRecord:
    command: str
    config: dict
    version: str = __version__
    outputs: dict = field(default_factory=dict)
    verdicts: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    def add_verdict(self, criterion: str, passed: bool, detail: str = "") -> None:
        self.verdicts.append(
            {"criterion": criterion, "passed": bool(passed), "detail": detail}
        )

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "config": self.config,
            "version": self.version,
            "outputs": self.outputs,
            "verdicts": self.verdicts,
            "timings": self.timings,
        }
        return json.dumps(payload, sort_keys=True, indent=1, default=_json_default)

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        raw = json.loads(text)
        return cls(
            command=raw["command"],
            config=raw["config"],
            version=raw["version"],
            outputs=raw["outputs"],
            verdicts=raw["verdicts"],
            timings=raw["timings"],
        )

    def save(self, directory, name: str) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"{name}{RECORD_SUFFIX}"
        path.write_text(self.to_json(), encoding="utf-8")
        return path


def load_record(path) -> RunRecord:
    path = Path(path)
    try:
        return RunRecord.from_json(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise RuntimeError(f"cannot load run record {path}: {exc}") from exc


def records_equal_except_timings(a: RunRecord, b: RunRecord) -> bool:
    strip = lambda r: {
        "command": r.command,
        "config": r.config,
        "version": r.version,
        "outputs": r.outputs,
        "verdicts": r.verdicts,
    }
    return json.dumps(strip(a), sort_keys=True, default=_json_default) == json.dumps(
        strip(b), sort_keys=True, default=_json_default
    )


class Stopwatch:
    """Accumulates named wall-clock timings for a record."""

    def __init__(self, record: RunRecord):
        self.record = record

    def measure(self, name: str):
        return _Timing(self.record, name)


class _Timing:
    def __init__(self, record: RunRecord, name: str):
        self.record = record
        self.name = name

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.record.timings[self.name] = time.perf_counter() - self.start
        return False


# ----------------------------------------------------------------------
# plots (standalone SVG)
# ----------------------------------------------------------------------

def plot_loglog_fit(report_dict: dict, path) -> Path:
    """Sweep points with fitted and target slopes on log-log axes."""
    xs = np.asarray(report_dict["xs"], dtype=float)
    ys = np.asarray(report_dict["ys"], dtype=float)
    fig, ax = plt.subplots(figsize=(5.0, 3.8))
    ax.loglog(xs, ys, "o", label="measured")
    fit = report_dict.get("fit")
    if fit:
        x_line = np.geomspace(xs.min(), xs.max(), 64)
        y_fit = fit["amplitude"] * x_line ** fit["exponent"]
        if fit.get("log_coefficient") is not None:
            y_fit = y_fit * np.log(1.0 / x_line) ** fit["log_coefficient"]
        ax.loglog(x_line, y_fit, "-", label=f"fit p={fit['exponent']:.3f}")
        target = report_dict.get("target_exponent")
        if target is not None:
            anchor = ys[-1] / xs[-1] ** target
            ax.loglog(x_line, anchor * x_line**target, "--", label=f"target p={target:g}")
    ax.set_xlabel(report_dict.get("parameter", "x"))
    ax.set_ylabel("measured value")
    ax.set_title(report_dict.get("name", "sweep"))
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path


def plot_profiles(state, path) -> Path:
    """Component profiles against radius on a log axis."""
    fig, ax = plt.subplots(figsize=(5.0, 3.8))
    r = state.mesh.nodes
    for i, u in enumerate(state.u):
        ax.semilogx(r, u.values, label=f"component {i + 1}")
    ax.set_xlabel("r")
    ax.set_ylabel("u(r)")
    ax.set_title(f"profiles at eps={state.config.eps:g}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path


def plot_rate_trajectories(rows: list[dict], d_star, path) -> Path:
    """Fitted rate coefficients along the eps sweep with reference lines."""
    fig, ax = plt.subplots(figsize=(5.0, 3.8))
    eps = [row["eps"] for row in rows]
    k = len(rows[0]["d"]) if rows else 0
    for j in range(k):
        traj = [row["d"][j] for row in rows]
        line, = ax.semilogx(eps, traj, "o-", label=f"d_{j + 1}")
        ax.axhline(d_star[j], color=line.get_color(), linestyle="--", linewidth=0.8)
    ax.invert_xaxis()
    ax.set_xlabel("eps")
    ax.set_ylabel("fitted rate coefficient")
    ax.set_title("rate coefficients vs hole radius")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path


def plot_corrector_decay(rows: list[dict], path) -> Path:
    fig, ax = plt.subplots(figsize=(5.0, 3.8))
    eps = [row["eps"] for row in rows]
    phi = [row["phi"]["total"] for row in rows]
    ax.loglog(eps, phi, "o-")
    ax.set_xlabel("eps")
    ax.set_ylabel("corrector energy norm")
    ax.set_title("ansatz gap vs hole radius")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path


# ----------------------------------------------------------------------
# tabular export and consolidated report
# ----------------------------------------------------------------------

def write_sweep_csv(rows: list[dict], path) -> Path:
    """One row per sweep point: eps, scales, rates, gap, residual, extras."""
    path = Path(path)
    if not rows:
        path.write_text("eps\n", encoding="utf-8")
        return path
    k = len(rows[0]["deltas"])
    header = ["eps"]
    header += [f"delta_{j + 1}" for j in range(k)]
    header += [f"d_{j + 1}" for j in range(k)]
    header += ["phi_h1", "residual", "sigma_min", "energy", "verdicts"]
    lines = [",".join(header)]
    for row in rows:
        cells = [repr(row["eps"])]
        cells += [repr(x) for x in row["deltas"]]
        cells += [repr(x) for x in row["d"]]
        cells.append(repr(row["phi"]["total"]))
        cells.append(repr(row["residual_h1"]))
        cells.append(repr(row.get("sigma_min", "")))
        cells.append(repr(row.get("energy", "")))
        cells.append(str(row.get("verdicts", "")))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def consolidate_report(run_dir) -> str:
    """Summarize every record in a run directory as one markdown document."""
    run_dir = Path(run_dir)
    paths = sorted(run_dir.glob(f"*{RECORD_SUFFIX}"))
    if not paths:
        return "# Run report\n\nno records found in this directory\n"
    records = [(p, load_record(p)) for p in paths]

    lines = ["# Run report", ""]
    versions = sorted({rec.version for _, rec in records})
    if len(versions) > 1:
        lines.append(
            "**warning**: records written by mixed tool versions: "
            + ", ".join(versions)
        )
        lines.append("")

    lines.append("| record | command | verdicts | failed |")
    lines.append("|---|---|---|---|")
    for p, rec in records:
        n = len(rec.verdicts)
        bad = [v["criterion"] for v in rec.verdicts if not v["passed"]]
        lines.append(
            f"| {p.name} | {rec.command} | {n} | {', '.join(bad) if bad else '-'} |"
        )
    lines.append("")

    for p, rec in records:
        lines.append(f"## {p.name}")
        lines.append("")
        if rec.verdicts:
            lines.append("| criterion | result | detail |")
            lines.append("|---|---|---|")
            for v in rec.verdicts:
                status = "pass" if v["passed"] else "FAIL"
                lines.append(f"| {v['criterion']} | {status} | {v['detail']} |")
            lines.append("")
        fits = {
            name: out
            for name, out in rec.outputs.items()
            if isinstance(out, dict) and out.get("fit")
        }
        if fits:
            lines.append("| sweep | fitted exponent | target | tolerance |")
            lines.append("|---|---|---|---|")
            for name, out in fits.items():
                fit = out["fit"]
                tgt = out.get("target_exponent")
                tol = out.get("tolerance")
                lines.append(
                    f"| {name} | {fit['exponent']:.4f} | "
                    f"{tgt if tgt is not None else '-'} | "
                    f"{tol if tol is not None else '-'} |"
                )
            lines.append("")
    return "\n".join(lines) + "\n"


def write_report(run_dir, name: str = "report.md") -> Path:
    run_dir = Path(run_dir)
    text = consolidate_report(run_dir)
    path = run_dir / name
    path.write_text(text, encoding="utf-8")
    return path
