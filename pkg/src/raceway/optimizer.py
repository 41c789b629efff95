"""Gradient ascent on the Fourier coefficients with a subcritical safeguard,
plus the two study drivers (layer-count convergence sweep, truncation-order
sweep)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .adjoint import gradient
from .errors import InvalidInitialGuess
from .hydro import EnvironmentConfig, FourierShape, min_height_check
from .lagrange import LayerSetup, average_growth, initial_positions, solve_forward
from .photosys import HanParameters

__all__ = [
    "OptimizeSettings",
    "OptimizeReport",
    "optimize",
    "random_shape_sampler",
    "nz_sweep",
    "order_sweep",
]

CONVERGED = "Converged"
SUBCRITICAL_STOP = "SubcriticalStop"
MAX_ITER = "MaxIter"

_MAX_HALVINGS = 60
_RHO_GROWTH = 2.0
_RHO_CAP = 1e13


@dataclass(frozen=True)
class OptimizeSettings:
    """Knobs of the ascent loop and of the underlying discretization."""

    tol: float = 1e-10
    rho: float = 1e3
    max_iter: int = 500
    dt: float = 0.1
    Nz: int = 40
    N: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.tol <= 0 or self.rho <= 0 or self.max_iter < 1:
            raise ValueError("tol and rho must be positive, max_iter >= 1")


@dataclass
class OptimizeReport:
    a_star: np.ndarray
    mu_history: list[float]
    grad_norm_history: list[float]
    step_history: list[float]
    iterations: int
    termination: str


def _objective(a, env, han, setup, dt):
    shape = FourierShape(a)
    z0 = initial_positions(setup, shape, env)
    return average_growth(solve_forward(shape, env, han, z0, dt), han)


def optimize(
    settings: OptimizeSettings,
    env: EnvironmentConfig,
    han: HanParameters,
    initial: np.ndarray | None = None,
) -> OptimizeReport:
    """Fixed-step gradient ascent with backtracking against the height guard.

    Starts from the flat profile unless an initial coefficient vector is
    given. The trial step rho doubles after an accepted full step and halves
    whenever a candidate would leave the subcritical region or decrease the
    objective, so the loop is monotone in the objective.
    """
    a = np.zeros(settings.N) if initial is None else np.asarray(initial, dtype=float).copy()
    if a.size != settings.N:
        raise ValueError("initial guess length does not match settings.N")
    setup = LayerSetup(settings.Nz)
    _, ok = min_height_check(FourierShape(a), env)
    if not ok:
        raise InvalidInitialGuess("starting shape is not subcritical")

    mu_history: list[float] = []
    grad_norm_history: list[float] = []
    step_history: list[float] = []
    termination = MAX_ITER
    rho = settings.rho
    iterations = 0

    if settings.N == 0:
        mu_history.append(_objective(a, env, han, setup, settings.dt))
        return OptimizeReport(a, mu_history, grad_norm_history, step_history, 0, CONVERGED)

    mu, report = gradient(FourierShape(a), env, han, setup, settings.dt)
    for it in range(settings.max_iter):
        mu_history.append(mu)
        grad_norm_history.append(report.norm)
        if report.norm <= settings.tol:
            termination = CONVERGED
            break

        accepted = False
        hit_guard = False
        trial = rho
        for _ in range(_MAX_HALVINGS):
            candidate = a + trial * report.grad
            _, ok = min_height_check(FourierShape(candidate), env)
            if not ok:
                hit_guard = True
                trial *= 0.5
                continue
            mu_new, report_new = gradient(FourierShape(candidate), env, han, setup, settings.dt)
            if mu_new < mu:
                trial *= 0.5
                continue
            accepted = True
            break
        if not accepted:
            termination = SUBCRITICAL_STOP if hit_guard else CONVERGED
            break

        a = candidate
        mu, report = mu_new, report_new
        step_history.append(trial)
        rho = min(trial * _RHO_GROWTH, _RHO_CAP)
        iterations = it + 1
    else:
        mu_history.append(mu)
        grad_norm_history.append(report.norm)

    return OptimizeReport(a, mu_history, grad_norm_history, step_history, iterations, termination)


def random_shape_sampler(N: int, env: EnvironmentConfig, seed: int):
    """Generator of subcritical shapes with coefficients in [-a0/(2N), a0/(2N)].

    Rejection-samples against the minimum-height check; deterministic under
    the seed.
    """
    rng = np.random.default_rng(seed)
    bound = env.a0 / (2.0 * max(N, 1))
    while True:
        shape = FourierShape(rng.uniform(-bound, bound, size=N))
        _, ok = min_height_check(shape, env)
        if ok:
            yield shape


def nz_sweep(
    shape_sampler,
    env: EnvironmentConfig,
    han: HanParameters,
    Nz_list: list[int],
    n_random: int,
    dt: float = 0.1,
) -> list[tuple[int, float]]:
    """Mean objective over the same random shapes, for each layer count."""
    shapes = [next(shape_sampler) for _ in range(n_random)]
    rows = []
    for Nz in Nz_list:
        setup = LayerSetup(Nz)
        total = 0.0
        for shape in shapes:
            z0 = initial_positions(setup, shape, env)
            total += average_growth(solve_forward(shape, env, han, z0, dt), han)
        rows.append((Nz, total / n_random))
    return rows


def order_sweep(
    env: EnvironmentConfig,
    han: HanParameters,
    N_list: list[int],
    settings: OptimizeSettings,
) -> list[dict]:
    """Optimize from flat for each truncation order with shared settings.

    Rows carry (N, iterations, mu, log10 gradient norm or None).
    """
    rows = []
    for N in N_list:
        run = optimize(
            OptimizeSettings(
                tol=settings.tol, rho=settings.rho, max_iter=settings.max_iter,
                dt=settings.dt, Nz=settings.Nz, N=N, seed=settings.seed,
            ),
            env, han,
        )
        norm = run.grad_norm_history[-1] if run.grad_norm_history else None
        rows.append({
            "N": N,
            "iterations": run.iterations,
            "mu": run.mu_history[-1],
            "log10_grad_norm": math.log10(norm) if norm else None,
            "a_star": run.a_star,
            "termination": run.termination,
        })
    return rows
