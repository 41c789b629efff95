"""Cross-checks between the compiled kernel backend and the numpy fallback."""

import numpy as np
import pytest

from raceway import FourierShape, kernels
from raceway.adjoint import integrate_adjoint
from raceway.hydro import bernoulli_constant
from raceway.kernels import _heun_py
from raceway.lagrange import LayerSetup, initial_positions, solve_forward

from conftest import random_subcritical_shapes

_heun = pytest.importorskip(
    "raceway.kernels._heun", reason="compiled kernel extension is not built"
)


def _forward_args(shape, env, han, z0, dt):
    return (
        shape.a, env.a0, env.L, env.Q0, env.g, bernoulli_constant(env),
        env.Is, env.eps, han.kr, han.kd, han.tau, han.sigma,
        np.asarray(z0, dtype=float), dt, 5000,
    )


class TestBackendSelection:
    def test_backend_reported(self):
        assert kernels.BACKEND in ("cython", "python")

    def test_module_tags(self):
        assert _heun.BACKEND == "cython"
        assert _heun_py.BACKEND == "python"


class TestForwardEquivalence:
    def test_traces_agree(self, env, han):
        for shape in random_subcritical_shapes(env, 5, 3, seed=17):
            z0 = initial_positions(LayerSetup(8), shape, env)
            args = _forward_args(shape, env, han, z0, 0.1)
            tc = _heun.forward_sweep(*args)
            tp = _heun_py.forward_sweep(*args)
            for c, p in zip(tc, tp):
                assert c.shape == p.shape
                assert np.max(np.abs(c - p)) < 1e-11

    def test_flat_bitwise(self, env, han):
        z0 = initial_positions(LayerSetup(4), FourierShape.flat(0), env)
        args = _forward_args(FourierShape.flat(0), env, han, z0, 0.1)
        tc = _heun.forward_sweep(*args)
        tp = _heun_py.forward_sweep(*args)
        assert np.array_equal(tc[1], tp[1])  # x grid


class TestAdjointEquivalence:
    def test_multipliers_agree(self, env, han, monkeypatch):
        shape = random_subcritical_shapes(env, 5, 1, seed=19)[0]
        z0 = initial_positions(LayerSetup(6), shape, env)
        traces = solve_forward(shape, env, han, z0, 0.1)

        monkeypatch.setattr(kernels, "adjoint_sweep", _heun.adjoint_sweep)
        ac = integrate_adjoint(traces, shape, env, han)
        monkeypatch.setattr(kernels, "adjoint_sweep", _heun_py.adjoint_sweep)
        ap = integrate_adjoint(traces, shape, env, han)

        assert np.max(np.abs(ac.p1 - ap.p1)) < 1e-12
        assert np.max(np.abs(ac.p2 - ap.p2)) < 1e-12
        assert np.max(np.abs(ac.p3 - ap.p3)) < 1e-12
