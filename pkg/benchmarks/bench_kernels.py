"""Benchmark the compiled integration kernels against the numpy fallback.

Times one full lap (forward Heun sweep) and one backward multiplier sweep
for each backend on identical inputs, and reports the speedup plus the
largest state discrepancy between the two.

Usage: python benchmarks/bench_kernels.py [--layers 40] [--dt 0.1] [--repeat 20]
"""

import argparse
import time

import numpy as np

from raceway import build_config
from raceway.adjoint import integrate_adjoint
from raceway.hydro import FourierShape, bernoulli_constant
from raceway.kernels import _heun_py
from raceway.lagrange import LayerSetup, initial_positions, solve_forward

try:
    from raceway.kernels import _heun
except ImportError:
    _heun = None


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--layers", type=int, default=40)
    parser.add_argument("--dt", type=float, default=0.1)
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()

    cfg = build_config()
    env, han = cfg.env, cfg.han
    shape = FourierShape(np.array([0.1, 0.05, 0.033, 0.025, 0.02]))
    z0 = initial_positions(LayerSetup(args.layers), shape, env)
    fargs = (shape.a, env.a0, env.L, env.Q0, env.g, bernoulli_constant(env),
             env.Is, env.eps, han.kr, han.kd, han.tau, han.sigma,
             np.asarray(z0), args.dt, 20000)

    backends = [("python", _heun_py)]
    if _heun is not None:
        backends.insert(0, ("cython", _heun))
    else:
        print("compiled extension not built; timing the fallback only")

    results = {}
    forward_out = {}
    traces = solve_forward(shape, env, han, z0, args.dt)
    for name, mod in backends:
        forward_out[name] = mod.forward_sweep(*fargs)
        t_fwd = _time(lambda m=mod: m.forward_sweep(*fargs), args.repeat)

        import raceway.kernels as kernels
        saved = kernels.adjoint_sweep
        kernels.adjoint_sweep = mod.adjoint_sweep
        try:
            t_adj = _time(lambda: integrate_adjoint(traces, shape, env, han), args.repeat)
        finally:
            kernels.adjoint_sweep = saved
        results[name] = (t_fwd, t_adj)
        print(f"{name:>7}: forward {t_fwd * 1e3:8.3f} ms   adjoint {t_adj * 1e3:8.3f} ms")

    if len(results) == 2:
        diff = max(np.max(np.abs(a - b))
                   for a, b in zip(forward_out["cython"], forward_out["python"]))
        fc, ac = results["cython"]
        fp, ap = results["python"]
        print(f"speedup: forward {fp / fc:.1f}x, adjoint {ap / ac:.1f}x")
        print(f"max state discrepancy between backends: {diff:.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
