"""Raceway pond growth simulation and adjoint-based topography optimization."""

from .hydro import EnvironmentConfig, FourierShape, critical_height, flow_state, min_height_check
from .photosys import HanParameters, growth_rate, han_rates, steady_state_C
from .lagrange import LayerSetup, LayerTrace, average_growth, integrate_forward, solve_forward
from .adjoint import GradientReport, finite_difference_gradient, gradient, integrate_adjoint
from .optimizer import OptimizeReport, OptimizeSettings, nz_sweep, optimize, order_sweep
from .config import RunConfig, build_config, load_config
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "EnvironmentConfig", "FourierShape", "critical_height", "flow_state", "min_height_check",
    "HanParameters", "growth_rate", "han_rates", "steady_state_C",
    "LayerSetup", "LayerTrace", "average_growth", "integrate_forward", "solve_forward",
    "GradientReport", "finite_difference_gradient", "gradient", "integrate_adjoint",
    "OptimizeReport", "OptimizeSettings", "nz_sweep", "optimize", "order_sweep",
    "RunConfig", "build_config", "load_config",
    "BACKEND", "__version__",
]
