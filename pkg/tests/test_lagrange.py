import numpy as np
import pytest

from raceway import (
    FourierShape,
    average_growth,
    flow_state,
    growth_rate,
    han_rates,
    integrate_forward,
    solve_forward,
    steady_state_C,
)
from raceway.errors import SubcriticalViolation
from raceway.lagrange import LayerSetup, initial_positions

from conftest import random_subcritical_shapes


def flat_mu_oracle(env, han, Nz):
    """Closed-form layer average for the flat pond: each layer sits at its
    steady state under constant light."""
    sigma = (np.arange(Nz) + 0.5) / Nz
    I = env.Is * np.exp(-env.eps * sigma * env.a0)
    r = han_rates(I, han)
    return float(np.mean(growth_rate(steady_state_C(r), r)))


class TestInitialPositions:
    def test_single_layer_mid_depth(self, env):
        z0 = initial_positions(LayerSetup(1), FourierShape.flat(0), env)
        assert z0 == pytest.approx([-0.2])

    def test_two_layers_quarter_depths(self, env):
        z0 = initial_positions(LayerSetup(2), FourierShape.flat(0), env)
        assert z0 == pytest.approx([-0.1, -0.3])

    def test_forty_layers_interior(self, env):
        z0 = initial_positions(LayerSetup(40), FourierShape.flat(0), env)
        assert z0.size == 40
        assert np.all(z0 > -0.4) and np.all(z0 < 0.0)
        assert np.allclose(np.diff(z0), z0[1] - z0[0])


class TestForwardIntegration:
    def test_flat_trajectory(self, env, han):
        tr = integrate_forward(FourierShape.flat(0), env, han, -0.2, 0.1)
        assert np.allclose(tr.z, -0.2)
        assert tr.T == pytest.approx(100.0, rel=1e-12)
        assert np.allclose(tr.x, 0.1 * tr.t)
        assert tr.x[-1] == env.L

    def test_flat_C_stays_at_equilibrium(self, env, han):
        tr = integrate_forward(FourierShape.flat(0), env, han, -0.13, 0.1)
        assert np.allclose(tr.C, tr.C[0], atol=1e-14)
        css = steady_state_C(han_rates(tr.I[0], han))
        assert tr.C[0] == pytest.approx(css, rel=1e-12)

    def test_travel_time_shape_independent(self, env, han):
        for shape in random_subcritical_shapes(env, 5, 5, seed=4):
            tr = integrate_forward(shape, env, han, -0.2, 0.1)
            assert abs(tr.T - 100.0) / 100.0 < 1e-3

    def test_x_strictly_increasing(self, env, han):
        shape = random_subcritical_shapes(env, 5, 1, seed=6)[0]
        tr = integrate_forward(shape, env, han, -0.1, 0.1)
        assert np.all(np.diff(tr.x) > 0)

    def test_states_stay_in_bounds(self, env, han):
        for shape in random_subcritical_shapes(env, 5, 5, seed=8):
            for tr in solve_forward(shape, env, han, initial_positions(LayerSetup(5), shape, env), 0.1):
                assert np.all((tr.C >= 0) & (tr.C <= 1))
                assert np.all((tr.I > 0) & (tr.I <= env.Is))
                st = flow_state(shape, env, tr.x)
                assert np.all(tr.z >= st.zb - 1e-9) and np.all(tr.z <= st.eta + 1e-9)

    def test_relative_depth_conservation(self, env, han):
        # the continuous flow conserves (eta - z)/h exactly; the Heun error
        # is O(dt^2), measured here at a step small enough to isolate bugs
        shape = random_subcritical_shapes(env, 5, 1, seed=2)[0]
        for tr in solve_forward(shape, env, han, initial_positions(LayerSetup(3), shape, env), 0.0125):
            st = flow_state(shape, env, tr.x)
            rel = (st.eta - tr.z) / st.h
            assert np.max(np.abs(rel - rel[0])) < 1e-6

    def test_supercritical_shape_rejected(self, env, han):
        with pytest.raises(SubcriticalViolation):
            integrate_forward(FourierShape(np.array([-0.38])), env, han, -0.1, 0.1)


class TestAverageGrowth:
    @pytest.mark.parametrize("Nz", [1, 10, 40])
    def test_flat_matches_analytic_oracle(self, env, han, Nz):
        setup = LayerSetup(Nz)
        shape = FourierShape.flat(0)
        traces = solve_forward(shape, env, han, initial_positions(setup, shape, env), 0.1)
        mu = average_growth(traces, han)
        assert mu == pytest.approx(flat_mu_oracle(env, han, Nz), rel=1e-6)

    def test_flat_regression_value(self, env, han):
        setup = LayerSetup(40)
        shape = FourierShape.flat(0)
        traces = solve_forward(shape, env, han, initial_positions(setup, shape, env), 0.1)
        assert average_growth(traces, han) == pytest.approx(1.3529895864e-05, rel=1e-9)

    def test_heun_order(self, env, han, reference_astar):
        setup = LayerSetup(5)

        def mu_at(dt):
            z0 = initial_positions(setup, reference_astar, env)
            return average_growth(solve_forward(reference_astar, env, han, z0, dt), han)

        ref = mu_at(0.1 / 16)
        errs = [abs(mu_at(dt) - ref) for dt in (0.4, 0.2, 0.1)]
        orders = np.log2([errs[0] / errs[1], errs[1] / errs[2]])
        assert np.all(orders >= 1.8)
