"""Forward solve: Lagrangian layer trajectories and the average growth rate.

Each layer is a fluid parcel advected by (u, w) while its photoinhibition
state C relaxes toward the local light equilibrium. All layers share the
horizontal trajectory x(t), so their traces live on a common time grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import SubcriticalViolation
from .hydro import EnvironmentConfig, FourierShape, bernoulli_constant, flow_state, min_height_check
from .photosys import HanParameters, growth_rate, han_rates

__all__ = [
    "LayerSetup",
    "LayerTrace",
    "initial_positions",
    "integrate_forward",
    "solve_forward",
    "average_growth",
]


def _midcell_depths(Nz: int) -> np.ndarray:
    return (np.arange(Nz) + 0.5) / Nz


@dataclass(frozen=True)
class LayerSetup:
    """Vertical discretization: Nz layers at relative depths (eta - z)/h."""

    Nz: int
    relative_depths: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.Nz < 1:
            raise ValueError("Nz must be at least 1")
        depths = self.relative_depths
        if depths is None:
            depths = _midcell_depths(self.Nz)
        depths = np.asarray(depths, dtype=float)
        if depths.size != self.Nz:
            raise ValueError("relative_depths must have length Nz")
        if not (np.all(np.diff(depths) > 0) and 0 < depths[0] and depths[-1] < 1):
            raise ValueError("relative_depths must be strictly increasing within (0, 1)")
        object.__setattr__(self, "relative_depths", depths)


@dataclass(frozen=True)
class LayerTrace:
    """Time series of one layer over a lap, on the shared Heun grid."""

    dt: float
    t: np.ndarray
    x: np.ndarray
    z: np.ndarray
    I: np.ndarray
    C: np.ndarray

    @property
    def n_steps(self) -> int:
        return self.t.size - 1

    @property
    def T(self) -> float:
        return float(self.t[-1])


def initial_positions(setup: LayerSetup, shape: FourierShape, env: EnvironmentConfig) -> np.ndarray:
    """Starting depths z_i(0) = eta(0) - sigma_i * h(0), mid-cell by default."""
    st = flow_state(shape, env, 0.0)
    return np.asarray(st.eta - setup.relative_depths * st.h, dtype=float)


def _require_subcritical(shape: FourierShape, env: EnvironmentConfig) -> None:
    min_h, ok = min_height_check(shape, env)
    if not ok:
        raise SubcriticalViolation(
            f"min h = {min_h:.4g} does not exceed the critical height; "
            "the shallow-water regime is violated"
        )


def solve_forward(
    shape: FourierShape,
    env: EnvironmentConfig,
    han: HanParameters,
    z0: np.ndarray,
    dt: float,
    max_steps: int | None = None,
) -> list[LayerTrace]:
    """Integrate all layers jointly over one lap; returns one trace per layer.

    The traces are views into shared arrays (common t and x).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    _require_subcritical(shape, env)
    z0 = np.atleast_1d(np.asarray(z0, dtype=float))
    if max_steps is None:
        T_est = env.a0 * env.L / env.Q0
        max_steps = int(math.ceil(4.0 * T_est / dt)) + 16
    t, x, z, C, I = kernels.forward_sweep(
        shape.a, env.a0, env.L, env.Q0, env.g, bernoulli_constant(env),
        env.Is, env.eps, han.kr, han.kd, han.tau, han.sigma,
        z0, dt, max_steps,
    )
    return [
        LayerTrace(dt=dt, t=t, x=x, z=z[i], I=I[i], C=C[i])
        for i in range(z0.size)
    ]


def integrate_forward(
    shape: FourierShape,
    env: EnvironmentConfig,
    han: HanParameters,
    z0: float,
    dt: float,
    max_steps: int | None = None,
) -> LayerTrace:
    """Single-layer forward solve starting at depth z0."""
    return solve_forward(shape, env, han, np.array([z0]), dt, max_steps)[0]


def average_growth(traces: list[LayerTrace], han: HanParameters) -> float:
    """Layer-averaged, time-averaged net specific growth rate over one lap.

    Trapezoid rule in time on each trace grid, then the mean over layers.
    """
    total = 0.0
    for tr in traces:
        if abs(tr.x[-1] - tr.x[0]) == 0 or tr.t.size < 2:
            raise ValueError("trace is empty")
        mu = growth_rate(tr.C, han_rates(tr.I, han))
        total += float(np.trapezoid(mu, tr.t)) / tr.T
    return total / len(traces)
