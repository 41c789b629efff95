import numpy as np
import pytest

from raceway import (
    FourierShape,
    finite_difference_gradient,
    gradient,
    han_rates,
    integrate_adjoint,
)
from raceway.errors import GridMismatch
from raceway.lagrange import LayerSetup, initial_positions, solve_forward

from conftest import random_subcritical_shapes


class TestMultipliers:
    def test_terminal_conditions(self, env, han):
        shape = random_subcritical_shapes(env, 5, 1, seed=23)[0]
        z0 = initial_positions(LayerSetup(4), shape, env)
        traces = solve_forward(shape, env, han, z0, 0.1)
        adj = integrate_adjoint(traces, shape, env, han)
        assert np.all(adj.p1[:, -1] == 0.0)
        assert np.all(adj.p2[:, -1] == 0.0)
        assert adj.p3[-1] == 0.0

    def test_flat_closed_form(self, env, han):
        # flat pond: alpha and the source are constant per layer, so
        # p1_i(t) = (s_i/alpha_i) (exp(alpha_i (t - T)) - 1); all x-derivative
        # forcings vanish, so p3 = 0 (p2 is still driven by the vertical
        # light gradient)
        Nz = 6
        shape = FourierShape.flat(0)
        z0 = initial_positions(LayerSetup(Nz), shape, env)
        traces = solve_forward(shape, env, han, z0, 0.05)
        adj = integrate_adjoint(traces, shape, env, han)
        T = adj.t[-1]
        for i, tr in enumerate(traces):
            r = han_rates(tr.I[0], han)
            s = r.gamma / (Nz * T)
            exact = (s / r.alpha) * (np.exp(r.alpha * (adj.t - T)) - 1.0)
            assert np.max(np.abs(adj.p1[i] - exact)) < 1e-4 * np.max(np.abs(exact))
        assert np.max(np.abs(adj.p3)) == 0.0

    def test_grid_mismatch_rejected(self, env, han):
        shape = FourierShape.flat(0)
        z0 = initial_positions(LayerSetup(2), shape, env)
        traces = solve_forward(shape, env, han, z0, 0.1)
        other = solve_forward(shape, env, han, z0, 0.2)
        with pytest.raises(GridMismatch):
            integrate_adjoint([traces[0], other[1]], shape, env, han)


class TestGradient:
    def test_matches_finite_differences(self, env, han):
        setup = LayerSetup(5)
        for shape in random_subcritical_shapes(env, 5, 3, seed=29, amplitude=0.01):
            _, report = gradient(shape, env, han, setup, 0.1)
            fd = finite_difference_gradient(shape, env, han, setup, 0.1)
            rel = np.abs(report.grad - fd) / np.abs(fd)
            assert np.max(rel) < 1e-3

    def test_flat_regression(self, env, han):
        # frozen central finite differences over full forward solves
        fd_frozen = np.array([
            2.35248271e-06, 1.22167366e-06, 8.20475415e-07,
            6.16974072e-07, 4.94191099e-07,
        ])
        _, report = gradient(FourierShape.flat(5), env, han, LayerSetup(5), 0.1)
        assert np.allclose(report.grad, fd_frozen, rtol=1e-3)
        assert report.norm == pytest.approx(np.linalg.norm(report.grad))

    def test_embedding_invariance(self, env, han):
        # appending zero coefficients must not change the leading gradient
        setup = LayerSetup(6)
        shape5 = random_subcritical_shapes(env, 5, 1, seed=31, amplitude=0.02)[0]
        shape10 = FourierShape(np.concatenate([shape5.a, np.zeros(5)]))
        mu5, r5 = gradient(shape5, env, han, setup, 0.1)
        mu10, r10 = gradient(shape10, env, han, setup, 0.1)
        assert mu5 == mu10
        assert np.max(np.abs(r5.grad - r10.grad[:5])) < 1e-10

    def test_step_refinement_tightens_fd_gap(self, env, han):
        # the adjoint/FD gap is a consistency error and shrinks with dt
        setup = LayerSetup(4)
        shape = random_subcritical_shapes(env, 5, 1, seed=37, amplitude=0.02)[0]

        def gap(dt):
            _, report = gradient(shape, env, han, setup, dt)
            fd = finite_difference_gradient(shape, env, han, setup, dt)
            return np.max(np.abs(report.grad - fd) / np.abs(fd))

        assert gap(0.05) < gap(0.2)
