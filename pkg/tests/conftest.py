import numpy as np
import pytest

from raceway import EnvironmentConfig, FourierShape, HanParameters, build_config


@pytest.fixture(scope="session")
def env() -> EnvironmentConfig:
    return build_config().env


@pytest.fixture(scope="session")
def han() -> HanParameters:
    return build_config().han


@pytest.fixture(scope="session")
def reference_astar() -> FourierShape:
    # converged five-coefficient optimum reported for the reference setup
    return FourierShape(np.array([0.1043, 0.0503, 0.0333, 0.0250, 0.0201]))


def random_subcritical_shapes(env, N, count, seed, amplitude=None):
    """Rejection-sample subcritical shapes with uniform coefficients."""
    from raceway import min_height_check

    rng = np.random.default_rng(seed)
    bound = env.a0 / (2.0 * N) if amplitude is None else amplitude
    shapes = []
    while len(shapes) < count:
        shape = FourierShape(rng.uniform(-bound, bound, N))
        if min_height_check(shape, env)[1]:
            shapes.append(shape)
    return shapes
