"""Timing comparison of the jit and numpy kernel paths.

Run from the repository root:

    python benchmarks/bench_kernels.py [--nodes 20000] [--repeats 200]

The active backend follows BUBBLETOWER_NUMBA; the numpy reference path is
always available, so a single run times both and prints the speedup.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from bubbletower import kernels
from bubbletower.quadrature import gauss_rule


def _problem(n_nodes: int, rng: np.random.Generator) -> dict:
    nodes = np.geomspace(1e-6, 1.0, n_nodes)
    gx, gw = gauss_rule(8)
    n_elems = n_nodes - 1
    return {
        "nodes": nodes,
        "gx": gx,
        "gw": gw,
        "deltas": np.geomspace(1e-4, 1e-1, 3),
        "wvals": rng.random((n_elems, gx.size)) + 0.5,
        "gvals": rng.random((n_elems, gx.size)) - 0.5,
        "fvals": rng.random((n_elems, gx.size)),
        "jac": 0.5 * np.diff(nodes),
        "u": rng.random(n_nodes),
        "v": rng.random(n_nodes),
        "out": np.empty(n_nodes),
        "diag": np.empty(n_nodes),
        "off": np.empty(n_elems),
    }


def _calls(p: dict) -> dict:
    return {
        "tower_values": lambda f: f(p["nodes"], p["deltas"], 2.8284271247461903, p["out"]),
        "panel_reduce": lambda f: f(p["fvals"], p["jac"], p["gw"]),
        "mass_tridiag": lambda f: f(p["nodes"], p["wvals"], p["gx"], p["gw"], p["diag"], p["off"]),
        "load_vector": lambda f: f(p["nodes"], p["gvals"], p["gx"], p["gw"], p["out"]),
        "h1_seminorm_pairs": lambda f: f(p["nodes"], p["u"], p["v"]),
    }


def _time(call, fn, repeats: int) -> float:
    call(fn)  # warm (jit compile / cache touch)
    t0 = time.perf_counter()
    for _ in range(repeats):
        call(fn)
    return (time.perf_counter() - t0) / repeats


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=20000)
    ap.add_argument("--repeats", type=int, default=200)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    p = _problem(args.nodes, rng)
    calls = _calls(p)

    print(f"active backend: {kernels.backend()}  ({args.nodes} nodes, {args.repeats} repeats)")
    header = f"{'kernel':20s} {'active [us]':>12s} {'numpy [us]':>12s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for name, call in calls.items():
        t_active = _time(call, kernels.ACTIVE_IMPLS[name], args.repeats)
        t_numpy = _time(call, kernels.NUMPY_IMPLS[name], args.repeats)
        ratio = t_numpy / t_active if t_active > 0 else float("nan")
        print(f"{name:20s} {1e6 * t_active:12.2f} {1e6 * t_numpy:12.2f} {ratio:8.2f}x")


if __name__ == "__main__":
    main()
