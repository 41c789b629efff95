"""Backward multiplier solve and gradient assembly for the shape objective.

The multipliers (p1_i, p2_i) are per layer; p3 is shared through the common
horizontal trajectory. Their backward system is integrated by an explicit
backward Heun sweep on the forward grid, and the gradient with respect to
the Fourier coefficients falls out of one trapezoid pass over the traces.
A full central-finite-difference gradient is provided as validation oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import GridMismatch, SubcriticalViolation
from .hydro import EnvironmentConfig, FourierShape, evaluate_height, bernoulli_constant, min_height_check
from .lagrange import LayerSetup, LayerTrace, initial_positions, solve_forward, average_growth
from .photosys import HanParameters, han_rates

__all__ = [
    "AdjointTrace",
    "GradientReport",
    "integrate_adjoint",
    "assemble_gradient",
    "gradient",
    "finite_difference_gradient",
]


@dataclass(frozen=True)
class AdjointTrace:
    """Multipliers on the forward grid, terminal values zero."""

    t: np.ndarray
    p1: np.ndarray  # (Nz, M), multiplier for C per layer
    p2: np.ndarray  # (Nz, M), multiplier for z per layer
    p3: np.ndarray  # (M,), shared multiplier for x


@dataclass(frozen=True)
class GradientReport:
    """Assembled objective gradient, optionally with an FD comparison."""

    grad: np.ndarray
    norm: float
    fd_check: np.ndarray | None = None


def _common_grid(traces: list[LayerTrace]) -> tuple[np.ndarray, np.ndarray]:
    t, x = traces[0].t, traces[0].x
    for tr in traces[1:]:
        if tr.t.shape != t.shape or not np.array_equal(tr.t, t):
            raise GridMismatch("forward traces do not share one time grid")
    return t, x


def _node_fields(traces, shape, env, han):
    """Stack per-layer states and evaluate all node coefficients vectorized."""
    t, x = _common_grid(traces)
    z = np.stack([tr.z for tr in traces])
    C = np.stack([tr.C for tr in traces])
    I = np.stack([tr.I for tr in traces])
    h, h1, h2 = evaluate_height(shape, env, x)
    M0 = bernoulli_constant(env)
    u = env.Q0 / h
    u1 = -env.Q0 * h1 / h ** 2
    u2 = env.Q0 * (2.0 * h1 ** 2 / h ** 3 - h2 / h ** 2)
    return t, x, z, C, I, h, h1, u, u1, u2, M0


def integrate_adjoint(
    traces: list[LayerTrace],
    shape: FourierShape,
    env: EnvironmentConfig,
    han: HanParameters,
) -> AdjointTrace:
    """Backward Heun solve of the multiplier system on the forward grid."""
    t, x, z, C, I, h, h1, u, u1, u2, M0 = _node_fields(traces, shape, env, han)
    Nz = z.shape[0]
    T = t[-1]
    rates = han_rates(I, han)

    s1 = rates.gamma / (Nz * T)
    A = (-rates.dgamma * C + rates.dzeta) / (Nz * T)
    B = -rates.dalpha * C + rates.dbeta
    dzI = env.eps * I
    dxI = (env.eps * u * u1 / env.g) * I  # -eps * eta' * I
    dzw = -u1
    dxw = (M0 / env.g - 3.0 * u ** 2 / (2.0 * env.g) - z) * u2 - (3.0 * u * u1 / env.g) * u1
    dxu = u1

    p1, p2, p3 = kernels.adjoint_sweep(t, rates.alpha, s1, A, B, dzI, dxI, dzw, dxw, dxu)
    return AdjointTrace(t=t, p1=p1, p2=p2, p3=p3)


def assemble_gradient(
    traces: list[LayerTrace],
    adjoints: AdjointTrace,
    shape: FourierShape,
    env: EnvironmentConfig,
    han: HanParameters,
) -> GradientReport:
    """Gradient of the lap-averaged growth rate with respect to the coefficients.

    One trapezoid pass combining forward states, multipliers and the analytic
    shape sensitivities of light, vertical velocity and horizontal velocity.
    """
    t, x, z, C, I, h, h1, u, u1, u2, M0 = _node_fields(traces, shape, env, han)
    if adjoints.t.shape != t.shape or not np.array_equal(adjoints.t, t):
        raise GridMismatch("adjoint grid does not match the forward grid")
    Nz = z.shape[0]
    T = t[-1]
    rates = han_rates(I, han)
    q = (-rates.dgamma * C + rates.dzeta) / (Nz * T) + adjoints.p1 * (
        -rates.dalpha * C + rates.dbeta
    )

    N = shape.order
    kvec = 2.0 * np.pi * np.arange(1, N + 1) / env.L
    s = np.sin(np.multiply.outer(kvec, x))  # (N, M)
    c = np.cos(np.multiply.outer(kvec, x))
    deta = (u ** 2 / (env.g * h)) * s
    dau = -env.Q0 * s / h ** 2
    dau1 = -env.Q0 * (kvec[:, None] * c / h ** 2 - 2.0 * h1 * s / h ** 3)
    coef = M0 / env.g - 3.0 * u ** 2 / (2.0 * env.g) - z  # (Nz, M)
    daI = -env.eps * deta[:, None, :] * I[None, :, :]  # (N, Nz, M)
    daw = (-3.0 * u * dau / env.g * u1)[:, None, :] + coef[None, :, :] * dau1[:, None, :]

    integrand = (q[None, :, :] * daI + adjoints.p2[None, :, :] * daw).sum(axis=1)
    integrand += adjoints.p3 * dau
    grad = np.trapezoid(integrand, t, axis=-1)
    return GradientReport(grad=grad, norm=float(np.linalg.norm(grad)))


def gradient(
    shape: FourierShape,
    env: EnvironmentConfig,
    han: HanParameters,
    setup: LayerSetup,
    dt: float,
) -> tuple[float, GradientReport]:
    """Convenience: forward solve, adjoint solve and gradient in one call.

    Returns (mu_bar, report).
    """
    z0 = initial_positions(setup, shape, env)
    traces = solve_forward(shape, env, han, z0, dt)
    mu = average_growth(traces, han)
    adj = integrate_adjoint(traces, shape, env, han)
    return mu, assemble_gradient(traces, adj, shape, env, han)


def finite_difference_gradient(
    shape: FourierShape,
    env: EnvironmentConfig,
    han: HanParameters,
    setup: LayerSetup,
    dt: float,
    step: float = 1e-7,
) -> np.ndarray:
    """Central-difference gradient over full forward solves (validation oracle)."""
    grad = np.empty(shape.order)
    for n in range(shape.order):
        vals = []
        for sgn in (+1.0, -1.0):
            a = shape.a.copy()
            a[n] += sgn * step
            pert = FourierShape(a)
            _, ok = min_height_check(pert, env)
            if not ok:
                raise SubcriticalViolation(
                    f"perturbing a_{n + 1} by {sgn * step:+.1e} leaves the subcritical region"
                )
            z0 = initial_positions(setup, pert, env)
            vals.append(average_growth(solve_forward(pert, env, han, z0, dt), han))
        grad[n] = (vals[0] - vals[1]) / (2.0 * step)
    return grad
