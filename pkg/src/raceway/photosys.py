"""Photosystem kinetics and underwater light.

The three-state photosystem model (open/closed/inhibited) reduces to a single
ODE for the inhibited fraction C, dC/dt = -alpha(I) C + beta(I), with the net
specific growth rate mu = -gamma(I) C + zeta(I). The I-derivatives of the
rate functions are needed by the adjoint solver and are validated against
finite differences in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AboveSurface, NegativeLight, ValidationError
from .hydro import EnvironmentConfig

__all__ = [
    "HanParameters",
    "HanRates",
    "han_rates",
    "growth_rate",
    "steady_state_C",
    "light_field",
]


@dataclass(frozen=True)
class HanParameters:
    """Photosystem and growth constants.

    kr : repair rate (1/s)
    kd : damage rate (-)
    tau : turnover time (s)
    sigma : specific photon absorption (m^2/umol)
    k : energy-to-growth factor (-)
    R : respiration rate (1/s)
    """

    kr: float = 6.8e-3
    kd: float = 2.99e-4
    tau: float = 0.25
    sigma: float = 0.047
    k: float = 8.7e-6
    R: float = 1.389e-7

    def __post_init__(self):
        for name in ("kr", "kd", "tau", "sigma", "k", "R"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")


@dataclass(frozen=True)
class HanRates:
    """Rate functions of the light intensity I, with their I-derivatives."""

    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    zeta: np.ndarray
    dalpha: np.ndarray
    dbeta: np.ndarray
    dgamma: np.ndarray
    dzeta: np.ndarray


def han_rates(I, p: HanParameters) -> HanRates:
    """Evaluate alpha, beta, gamma, zeta and their I-derivatives at I.

    Accepts scalars or arrays. Raises NegativeLight for I < 0.
    """
    I = np.asarray(I, dtype=float)
    if np.any(I < 0):
        raise NegativeLight("photon flux density must be non-negative")
    sI = p.sigma * I
    denom = p.tau * sI + 1.0
    alpha = p.kd * p.tau * sI ** 2 / denom + p.kr
    beta = alpha - p.kr
    gamma = p.k * sI / denom
    zeta = gamma - p.R
    dalpha = p.kd * p.tau * p.sigma ** 2 * I * (p.tau * sI + 2.0) / denom ** 2
    dgamma = p.k * p.sigma / denom ** 2
    return HanRates(
        alpha=alpha, beta=beta, gamma=gamma, zeta=zeta,
        dalpha=dalpha, dbeta=dalpha, dgamma=dgamma, dzeta=dgamma,
    )


def growth_rate(C, rates: HanRates):
    """Net specific growth rate mu = -gamma * C + zeta."""
    return -rates.gamma * np.asarray(C, dtype=float) + rates.zeta


def steady_state_C(rates: HanRates):
    """Equilibrium inhibited fraction beta/alpha; always in [0, 1)."""
    return rates.beta / rates.alpha


def light_field(env: EnvironmentConfig, eta, eta_x, deta_da, z):
    """Beer-Lambert light at depth and its x-, z- and shape-derivatives.

    Parameters are the free surface eta(x), its slope, the vector of surface
    sensitivities d eta/d a_n at the same x, and the vertical position z.
    Returns (I, dI/dx, dI/dz, dI/da). Raises AboveSurface for z > eta,
    which signals a trajectory that left the water.
    """
    eta = np.asarray(eta, dtype=float)
    z = np.asarray(z, dtype=float)
    if np.any(z > eta + 1e-12):
        raise AboveSurface(f"z exceeds the free surface by {np.max(z - eta):.3g}")
    I = env.Is * np.exp(-env.eps * (eta - z))
    dI_dz = env.eps * I
    dI_dx = -env.eps * np.asarray(eta_x, dtype=float) * I
    dI_da = -env.eps * np.asarray(deta_da, dtype=float) * I
    return I, dI_dx, dI_dz, dI_da
