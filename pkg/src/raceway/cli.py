"""Command-line interface: simulation, optimization, sweeps and data dumps.

All outputs are plain CSV/JSON files under the output directory (flag
--output-dir or environment variable RACEWAY_OUTPUT_DIR). Exit codes:
0 success, 1 computation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import kernels
from .adjoint import finite_difference_gradient, gradient
from .config import build_config, config_dict, load_config
from .errors import RacewayError
from .hydro import FourierShape, flow_state, min_height_check
from .lagrange import LayerSetup, average_growth, initial_positions, solve_forward
from .optimizer import (
    OptimizeSettings,
    nz_sweep,
    optimize,
    order_sweep,
    random_shape_sampler,
)

__all__ = ["main", "run"]


def _fmt(x) -> str:
    # shortest round-trippable decimal form, locale independent
    return repr(float(x))


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([
                str(v) if isinstance(v, (int, np.integer))
                else _fmt(v) if isinstance(v, (float, np.floating))
                else v
                for v in row
            ])


def _load_coeffs(args, default_order: int) -> np.ndarray:
    if getattr(args, "coeffs_file", None):
        with open(args.coeffs_file, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            return np.array([float(row["a"]) for row in reader])
    if getattr(args, "coeffs", None):
        return np.array([float(v) for v in args.coeffs.split(",")])
    return np.zeros(default_order)


def _write_coeffs(path: Path, a: np.ndarray) -> None:
    _write_csv(path, ["n", "a"], [(n + 1, an) for n, an in enumerate(a)])


def _dump_topography(path: Path, shape, env, n_samples: int) -> None:
    xs = np.linspace(0.0, env.L, n_samples)
    st = flow_state(shape, env, xs)
    _write_csv(path, ["x", "h", "zb", "eta", "u"], zip(xs, st.h, st.zb, st.eta, st.u))


def _out_dir(args) -> Path:
    out = args.output_dir or os.environ.get("RACEWAY_OUTPUT_DIR") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _config(args):
    if args.config:
        return load_config(args.config)
    return build_config()


def _settings(cfg, args) -> OptimizeSettings:
    s = cfg.settings
    return OptimizeSettings(
        tol=s.tol, rho=s.rho, max_iter=s.max_iter, dt=args.dt or s.dt,
        Nz=args.layers or s.Nz, N=s.N if args.order is None else args.order,
        seed=s.seed if args.seed is None else args.seed,
    )


def _cmd_simulate(args) -> int:
    cfg = _config(args)
    s = _settings(cfg, args)
    out = _out_dir(args)
    shape = FourierShape(_load_coeffs(args, s.N))
    setup = LayerSetup(s.Nz)
    z0 = initial_positions(setup, shape, cfg.env)
    traces = solve_forward(shape, cfg.env, cfg.han, z0, s.dt)
    for i, tr in enumerate(traces, start=1):
        _write_csv(out / f"trace_layer_{i:03d}.csv", ["t", "x", "z", "I", "C"],
                   zip(tr.t, tr.x, tr.z, tr.I, tr.C))
    mu = average_growth(traces, cfg.han)
    print(f"simulate: mu_bar={mu:.6e} layers={s.Nz} steps={traces[0].n_steps} T={traces[0].T:.3f}s")
    return 0


def _cmd_optimize(args) -> int:
    cfg = _config(args)
    s = _settings(cfg, args)
    out = _out_dir(args)
    report = optimize(s, cfg.env, cfg.han)
    shape = FourierShape(report.a_star)
    _write_coeffs(out / "a_star.csv", report.a_star)
    _write_csv(out / "mu_history.csv", ["iteration", "mu", "grad_norm"],
               zip(range(len(report.mu_history)), report.mu_history,
                   report.grad_norm_history + [math.nan] * (len(report.mu_history) - len(report.grad_norm_history))))
    _dump_topography(out / "topography.csv", shape, cfg.env, 201)
    payload = {
        "mu": report.mu_history[-1],
        "iterations": report.iterations,
        "termination": report.termination,
        "a_star": [float(v) for v in report.a_star],
        "grad_norm": report.grad_norm_history[-1] if report.grad_norm_history else None,
        "backend": kernels.BACKEND,
        "config": {k: v for k, v in config_dict(cfg).items()},
        "overrides": {"N": s.N, "Nz": s.Nz, "dt": s.dt, "seed": s.seed},
    }
    with open(out / "report.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
    print(f"optimize: mu_bar={report.mu_history[-1]:.6e} iterations={report.iterations} "
          f"termination={report.termination}")
    return 0


def _cmd_nz_sweep(args) -> int:
    cfg = _config(args)
    s = _settings(cfg, args)
    out = _out_dir(args)
    nz_list = [int(v) for v in args.nz_list.split(",")]
    sampler = random_shape_sampler(s.N, cfg.env, s.seed)
    rows = nz_sweep(sampler, cfg.env, cfg.han, nz_list, args.samples, dt=s.dt)
    _write_csv(out / "nz_sweep.csv", ["Nz", "mean_mu"], rows)
    print(f"nz-sweep: {len(rows)} layer counts x {args.samples} shapes -> nz_sweep.csv")
    return 0


def _cmd_order_sweep(args) -> int:
    cfg = _config(args)
    s = _settings(cfg, args)
    out = _out_dir(args)
    orders = [int(v) for v in args.orders.split(",")]
    rows = order_sweep(cfg.env, cfg.han, orders, s)
    _write_csv(out / "order_sweep.csv", ["N", "iterations", "mu", "log10_grad_norm"],
               [(r["N"], r["iterations"], r["mu"],
                 "" if r["log10_grad_norm"] is None else _fmt(r["log10_grad_norm"]))
                for r in rows])
    with open(out / "order_sweep.json", "w", encoding="utf-8") as fh:
        json.dump([{**r, "a_star": [float(v) for v in r["a_star"]]} for r in rows], fh, indent=2)
    for r in rows:
        print(f"order-sweep: N={r['N']} mu_bar={r['mu']:.6e} iterations={r['iterations']} "
              f"termination={r['termination']}")
    return 0


def _cmd_grad_check(args) -> int:
    cfg = _config(args)
    s = _settings(cfg, args)
    out = _out_dir(args)
    shape = FourierShape(_load_coeffs(args, s.N))
    setup = LayerSetup(s.Nz)
    _, report = gradient(shape, cfg.env, cfg.han, setup, s.dt)
    fd = finite_difference_gradient(shape, cfg.env, cfg.han, setup, s.dt, step=args.step)
    rel = np.abs(report.grad - fd) / np.abs(fd)
    print(f"{'n':>3} {'analytic':>15} {'fd':>15} {'rel_error':>12}")
    for n in range(shape.order):
        print(f"{n + 1:>3} {report.grad[n]:>15.6e} {fd[n]:>15.6e} {rel[n]:>12.3e}")
    print(f"grad-check: max relative error {rel.max():.3e}")
    _write_csv(out / "grad_check.csv", ["n", "analytic", "fd", "rel_error"],
               zip(range(1, shape.order + 1), report.grad, fd, rel))
    return 0


def _cmd_dump_topography(args) -> int:
    cfg = _config(args)
    s = _settings(cfg, args)
    out = _out_dir(args)
    shape = FourierShape(_load_coeffs(args, s.N))
    min_h, ok = min_height_check(shape, cfg.env)
    if not ok:
        raise RacewayError(f"shape is not subcritical (min h = {min_h:.4g})")
    _dump_topography(out / "topography.csv", shape, cfg.env, args.samples)
    print(f"dump-topography: {args.samples} samples -> topography.csv")
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="path to a key = value config file")
    p.add_argument("--output-dir", help="directory for emitted files")
    p.add_argument("--order", type=int, default=None, help="Fourier truncation order N")
    p.add_argument("--layers", type=int, default=None, help="number of vertical layers Nz")
    p.add_argument("--dt", type=float, default=None, help="integrator time step (s)")
    p.add_argument("--seed", type=int, default=None, help="seed for random shape generation")


def _add_coeffs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--coeffs", help="comma-separated Fourier coefficients (default: flat)")
    p.add_argument("--coeffs-file", help="a_star.csv-style file with the coefficients")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="raceway",
        description="Simulate and optimize the topography of a microalgal raceway pond.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate layer trajectories and export traces")
    _add_common(p)
    _add_coeffs(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("optimize", help="gradient ascent on the height profile")
    _add_common(p)
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("nz-sweep", help="layer-count convergence study on random shapes")
    _add_common(p)
    p.add_argument("--nz-list", default="1,2,5,10,20,40,80")
    p.add_argument("--samples", type=int, default=20)
    p.set_defaults(func=_cmd_nz_sweep)

    p = sub.add_parser("order-sweep", help="optimize for several truncation orders")
    _add_common(p)
    p.add_argument("--orders", default="0,5,10,15,20")
    p.set_defaults(func=_cmd_order_sweep)

    p = sub.add_parser("grad-check", help="adjoint gradient vs central finite differences")
    _add_common(p)
    _add_coeffs(p)
    p.add_argument("--step", type=float, default=1e-7)
    p.set_defaults(func=_cmd_grad_check)

    p = sub.add_parser("dump-topography", help="sample h, zb, eta, u on a uniform grid")
    _add_common(p)
    _add_coeffs(p)
    p.add_argument("--samples", type=int, default=201)
    p.set_defaults(func=_cmd_dump_topography)

    return parser


def run(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RacewayError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
