"""Command-line entry points.

Subcommands:
  constants   print the universal constants with a quadrature cross-check
  verify      run one named scaling-law check and record the fitted exponents
  minimize    minimize the reduced rate functional, multi-start, closed-form check
  solve       solve the radial system at one hole radius
  sweep       continuation over a decreasing list of hole radii
  report      consolidate the records in a run directory into report.md
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import (
    single_energy_check,
    sweep_interaction_constant,
    sweep_lq,
    sweep_pair,
    sweep_pq,
    sweep_projection_expansion,
    sweep_projection_l2,
    sweep_remainder,
    sweep_triple,
)
from .config import RunConfig, dump_config, load_config
from .constants import compute_constants, robin_center
from .reduced import (
    PsiCoefficients,
    minimizer_closed_form,
    psi_minimize_numeric,
)
from .reporting import (
    RunRecord,
    Stopwatch,
    plot_corrector_decay,
    plot_loglog_fit,
    plot_profiles,
    plot_rate_trajectories,
    write_report,
    write_sweep_csv,
)
from .solver import (
    ContinuationError,
    NewtonOptions,
    continuation_sweep,
    functional_energy,
)


def _lemma_expansion(args):
    return [sweep_projection_expansion()]


def _lemma_l2error(args):
    return [sweep_projection_l2(points_per_decade=args.ppd)]


def _lemma_lq(args):
    return [sweep_lq(q, points_per_decade=args.ppd) for q in (1.5, 2.0, 3.0, 4.0)]


def _lemma_pq(args):
    return sweep_pq(p=args.p, q=args.q, points_per_decade=args.ppd)


def _lemma_pair(args):
    return [sweep_pair(points_per_decade=args.ppd)]


def _lemma_triple(args):
    return [sweep_triple(points_per_decade=args.ppd)]


def _lemma_single_energy(args):
    return [single_energy_check(points_per_decade=args.ppd)]


def _lemma_interaction_constant(args):
    return [sweep_interaction_constant(points_per_decade=args.ppd)]


def _lemma_remainder(args):
    return [sweep_remainder(points_per_decade=args.ppd)]


LEMMA_REGISTRY = {
    "A1-expansion": _lemma_expansion,
    "A2-l2error": _lemma_l2error,
    "A3-lq": _lemma_lq,
    "A4-pq": _lemma_pq,
    "A5-pair": _lemma_pair,
    "A6-triple": _lemma_triple,
    "single-energy": _lemma_single_energy,
    "interaction-constant": _lemma_interaction_constant,
    "remainder-norm": _lemma_remainder,
}


def bundled_config_path(name: str = "k2-towers") -> Path:
    ref = resources.files("bubbletower").joinpath(f"configs/{name}.toml")
    with resources.as_file(ref) as path:
        return Path(path)


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", type=Path, help="TOML run configuration")
    sp.add_argument("--out", type=Path, help="output directory for records and plots")
    sp.add_argument("--ppd", type=int, help="mesh points per decade")
    sp.add_argument("--tol", type=float, help="solver residual tolerance")
    sp.add_argument("--seed", type=int, help="seed for randomized starts")


def _resolve_config(args, need_eps: bool = True) -> RunConfig:
    if args.config is not None:
        cfg = load_config(args.config)
    else:
        cfg = load_config(bundled_config_path())
        print(f"no --config given, using bundled example ({cfg.k}-scale towers)")
    overrides = {}
    if args.ppd is not None:
        overrides["points_per_decade"] = args.ppd
    if args.tol is not None:
        overrides["tol"] = args.tol
    if args.seed is not None:
        overrides["seed"] = args.seed
    if overrides:
        from dataclasses import replace

        cfg = replace(cfg, **overrides)
    if need_eps and not cfg.all_eps():
        raise ValueError("configuration fixes no hole radius")
    return cfg


def _out_dir(args, cfg: RunConfig | None = None) -> Path:
    if args.out is not None:
        return args.out
    if cfg is not None:
        return Path(cfg.out_dir)
    return Path("runs")


def cmd_constants(args) -> int:
    record = RunRecord(command="constants", config={})
    watch = Stopwatch(record)
    with watch.measure("quadrature"):
        computed = compute_constants()
    exact = type(computed).exact()
    rows = []
    for name in (
        "alpha4",
        "sphere3_area",
        "green_normalization",
        "bubble_cubic_integral",
        "bubble_quartic_integral",
        "hole_energy_constant",
        "pair_interaction_constant",
    ):
        a = getattr(computed, name)
        b = getattr(exact, name)
        rel = abs(a - b) / abs(b)
        rows.append((name, a, b, rel))
        print(f"{name:26s} {a:.15e}  closed form {b:.15e}  rel {rel:.2e}")
    residuals = computed.identity_residuals()
    for name, val in residuals.items():
        print(f"identity {name:17s} residual {val:.2e}")
    print(f"robin_center(R=1) = {robin_center(1.0):.15e}")
    record.outputs = {
        "values": {name: a for name, a, _, _ in rows},
        "closed_forms": {name: b for name, _, b, _ in rows},
        "relative_errors": {name: rel for name, _, _, rel in rows},
        "identity_residuals": residuals,
        "robin_center_unit": robin_center(1.0),
    }
    worst = max(rel for *_, rel in rows)
    record.add_verdict(
        "constants-quadrature", worst <= 1e-8, f"worst relative error {worst:.2e}"
    )
    record.add_verdict(
        "constants-identities",
        max(residuals.values()) <= 1e-10,
        f"worst identity residual {max(residuals.values()):.2e}",
    )
    if args.out is not None:
        path = record.save(args.out, "constants")
        print(f"record written to {path}")
    return 0 if all(v["passed"] for v in record.verdicts) else 1


def cmd_verify(args) -> int:
    runner = LEMMA_REGISTRY.get(args.lemma)
    if runner is None:
        names = ", ".join(sorted(LEMMA_REGISTRY))
        print(f"unknown check '{args.lemma}'; valid names: {names}", file=sys.stderr)
        return 2
    if args.ppd is None:
        args.ppd = 64
    record = RunRecord(
        command=f"verify {args.lemma}",
        config={"lemma": args.lemma, "ppd": args.ppd, "p": args.p, "q": args.q},
    )
    watch = Stopwatch(record)
    try:
        with watch.measure("sweep"):
            reports = runner(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = _out_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    all_ok = True
    for rep in reports:
        record.outputs[rep.name] = rep.to_dict()
        detail = ""
        if rep.fit is not None:
            detail = (
                f"exponent {rep.fit.exponent:.4f}, target {rep.target_exponent:g} "
                f"+- {rep.tolerance:g}"
            )
        record.add_verdict(rep.name, rep.passed, detail)
        all_ok &= rep.passed
        status = "pass" if rep.passed else "FAIL"
        print(f"{rep.name:34s} {status}  {detail}")
        for note in rep.notes:
            print(f"    note: {note}")
        if rep.fit is not None:
            svg = out / f"verify-{args.lemma}-{rep.name}.svg"
            plot_loglog_fit(rep.to_dict(), svg)
    path = record.save(out, f"verify-{args.lemma}")
    print(f"record written to {path}")
    return 0 if all_ok else 1


def cmd_minimize(args) -> int:
    k = args.k
    beta = args.beta
    outer = 1.0
    if args.config is not None:
        cfg = _resolve_config(args, need_eps=False)
        k = cfg.k if args.k is None else args.k
        beta = cfg.beta if args.beta is None else args.beta
        outer = cfg.outer
        seed = cfg.seed
    else:
        seed = args.seed if args.seed is not None else 0
    k = 2 if k is None else k
    beta = -1.0 if beta is None else beta
    if beta >= 0.0:
        print("error: beta must be negative", file=sys.stderr)
        return 2

    coeffs = PsiCoefficients.for_problem(k, beta, outer)
    closed = minimizer_closed_form(coeffs)
    rng = np.random.default_rng(seed)
    starts = max(1, args.starts)
    minima = []
    for _ in range(starts):
        x0 = closed["x"] * np.exp(rng.uniform(-2.0, 2.0, size=k))
        res = psi_minimize_numeric(coeffs, x0=x0)
        minima.append(res)
    best = min(minima, key=lambda r: r["value"])
    spread = max(
        float(np.max(np.abs(r["x"] - best["x"]) / best["x"])) for r in minima
    )
    agree = spread <= 1e-8 and all(r["converged"] for r in minima)
    gap = float(np.max(np.abs(best["x"] - closed["x"]) / closed["x"]))

    print(f"k = {k}, beta = {beta:g}, R = {outer:g}")
    print("closed-form rates d* =", " ".join(f"{v:.12f}" for v in closed["d"]))
    print(f"functional value    = {closed['value']:.12e}")
    print(f"numeric multi-start ({starts} starts): relative spread {spread:.2e}")
    print(f"numeric vs closed form: relative gap {gap:.2e}")

    record = RunRecord(
        command="minimize",
        config={"k": k, "beta": beta, "R": outer, "seed": seed, "starts": starts},
    )
    record.outputs = {
        "closed_form": {
            "x": list(closed["x"]),
            "d": list(closed["d"]),
            "value": closed["value"],
            "grad_norm": closed["grad_norm"],
            "cross_check_mismatch": closed["cross_check_mismatch"],
        },
        "numeric": {
            "x": list(best["x"]),
            "value": best["value"],
            "iterations": best["iterations"],
            "spread": spread,
        },
    }
    record.add_verdict("minimizer-agreement", agree, f"start spread {spread:.2e}")
    record.add_verdict(
        "minimizer-closed-form", gap <= 1e-8, f"numeric vs closed form {gap:.2e}"
    )
    if args.out is not None:
        path = record.save(args.out, f"minimize-k{k}")
        print(f"record written to {path}")
    return 0 if agree and gap <= 1e-8 else 1


def cmd_solve(args) -> int:
    from .solver import extract_rates, corrector_norm, newton_solve

    cfg = _resolve_config(args)
    tower = cfg.tower_config()
    options = NewtonOptions(tol=cfg.tol, max_iters=cfg.max_iters)
    record = RunRecord(command="solve", config=_config_snapshot(cfg))
    watch = Stopwatch(record)
    with watch.measure("newton"):
        state = newton_solve(tower, options, cfg.points_per_decade)
    fit = extract_rates(state)
    phi = corrector_norm(state, fit)
    energy = functional_energy(state)

    print(f"eps = {tower.eps:g}: converged in {state.newton_iters} iterations")
    print(f"relative residual   = {state.residual_h1:.3e}")
    print("fitted scales       =", " ".join(f"{v:.6e}" for v in fit.deltas))
    print("rate coefficients   =", " ".join(f"{v:.6f}" for v in fit.d))
    print(f"corrector norm      = {phi['total']:.6e} ({phi['over_delta1']:.4f} of delta_1)")
    print(f"energy value        = {energy:.9e}")

    record.outputs = {
        "eps": tower.eps,
        "newton_iters": state.newton_iters,
        "residual_h1": state.residual_h1,
        "deltas": list(fit.deltas),
        "d": list(fit.d),
        "rate_fit_residual": fit.residual_rel,
        "phi": phi,
        "energy": energy,
        "min_values": [float(np.min(u.values)) for u in state.u],
    }
    record.add_verdict(
        "solver-converged",
        state.converged and state.residual_h1 <= cfg.tol,
        f"{state.newton_iters} iterations, residual {state.residual_h1:.2e}",
    )
    record.add_verdict(
        "solution-positive",
        all(np.min(u.values[1:-1]) > 0.0 for u in state.u),
        "interior positivity",
    )
    out = _out_dir(args, cfg)
    out.mkdir(parents=True, exist_ok=True)
    plot_profiles(state, out / "solve-profiles.svg")
    path = record.save(out, "solve")
    print(f"record written to {path}")
    return 0 if all(v["passed"] for v in record.verdicts) else 1


def cmd_sweep(args) -> int:
    cfg = _resolve_config(args)
    if not cfg.eps_list:
        print("error: sweep needs sweep.eps_list in the configuration", file=sys.stderr)
        return 2
    tower = cfg.tower_config(cfg.eps_list[0])
    options = NewtonOptions(tol=cfg.tol, max_iters=cfg.max_iters)
    record = RunRecord(command="sweep", config=_config_snapshot(cfg))
    watch = Stopwatch(record)
    try:
        with watch.measure("continuation"):
            rows = continuation_sweep(
                tower,
                cfg.eps_list,
                options,
                cfg.points_per_decade,
                compute_sigma=args.sigma,
            )
    except ContinuationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    from .reduced import optimal_rates

    d_star = [float(v) for v in optimal_rates(cfg.k, cfg.beta, cfg.outer)]
    for row in rows:
        row["energy"] = functional_energy(row["state"])
        print(
            f"eps {row['eps']:.3e}: iters {row['newton_iters']:2d}  "
            f"residual {row['residual_h1']:.2e}  "
            f"d = {' '.join(f'{v:.5f}' for v in row['d'])}  "
            f"phi {row['phi']['total']:.4e}"
        )

    gaps = np.array([[abs(dj - ds) for dj, ds in zip(row["d"], d_star)] for row in rows])
    rates_converge = all(
        all(gaps[i + 1][j] < gaps[i][j] for j in range(len(d_star)))
        for i in range(len(rows) - 1)
    )
    phis = [row["phi"]["total"] for row in rows]
    phi_decays = all(b < a for a, b in zip(phis, phis[1:]))
    record.add_verdict(
        "rates-approach-theorem",
        rates_converge,
        f"|d_j - d_j*| gaps {gaps.tolist()}",
    )
    record.add_verdict(
        "corrector-decay", phi_decays, f"corrector norms {[f'{p:.3e}' for p in phis]}"
    )
    if args.sigma:
        sigs = [row["sigma_min"] for row in rows]
        band = max(sigs) / min(sigs) if min(sigs) > 0 else float("inf")
        record.add_verdict(
            "spectral-gap-stable",
            min(sigs) > 0 and band < 2.0,
            f"projected sigma_min within factor {band:.3f}",
        )

    record.outputs["rows"] = [
        {key: val for key, val in row.items() if key not in ("state", "fit")}
        for row in rows
    ]
    record.outputs["d_star"] = [float(v) for v in d_star]

    out = _out_dir(args, cfg)
    out.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(rows, out / "sweep.csv")
    plot_rate_trajectories(rows, d_star, out / "sweep-rates.svg")
    plot_corrector_decay(rows, out / "sweep-corrector.svg")
    plot_profiles(rows[-1]["state"], out / "sweep-final-profiles.svg")
    path = record.save(out, "sweep")
    print(f"record written to {path}")
    for v in record.verdicts:
        print(f"{v['criterion']:26s} {'pass' if v['passed'] else 'FAIL'}  {v['detail']}")
    return 0 if all(v["passed"] for v in record.verdicts) else 1


def cmd_report(args) -> int:
    run_dir = args.out if args.out is not None else Path(args.run_dir or "runs")
    if not run_dir.exists():
        print(f"error: no such directory {run_dir}", file=sys.stderr)
        return 2
    try:
        path = write_report(run_dir)
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = path.read_text(encoding="utf-8")
    if "no records found" in text:
        print(f"no records found in {run_dir}")
    for line in text.splitlines():
        if "mixed tool versions" in line:
            print(line.replace("**warning**", "warning"), file=sys.stderr)
    print(f"report written to {path}")
    return 0


def _config_snapshot(cfg: RunConfig) -> dict:
    return {"toml": dump_config(cfg)}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bubbletower",
        description="bubble-tower profiles for competitive systems on a pierced ball",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("constants", help="universal constants with quadrature check")
    _add_common(sp)
    sp.set_defaults(func=cmd_constants)

    sp = sub.add_parser("verify", help="run one named scaling-law check")
    sp.add_argument("lemma", help="check name; see registry in the docs")
    sp.add_argument("--p", type=float, default=8.0 / 3.0, help="large mixed power")
    sp.add_argument("--q", type=float, default=4.0 / 3.0, help="small mixed power")
    _add_common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("minimize", help="minimize the reduced rate functional")
    sp.add_argument("--k", type=int, help="tower height (default from config, else 2)")
    sp.add_argument("--beta", type=float, help="coupling coefficient (negative)")
    sp.add_argument("--starts", type=int, default=20, help="random multi-starts")
    _add_common(sp)
    sp.set_defaults(func=cmd_minimize)

    sp = sub.add_parser("solve", help="solve the radial system at one hole radius")
    _add_common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("sweep", help="continuation over decreasing hole radii")
    sp.add_argument("--sigma", action="store_true", help="also track the spectral gap")
    _add_common(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("report", help="consolidate run records into report.md")
    sp.add_argument("run_dir", nargs="?", help="directory holding the records")
    _add_common(sp)
    sp.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
