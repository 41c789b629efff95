"""Closed-form steady shallow-water state for a Fourier-parameterized height profile.

The water height h(x) is the primal unknown; velocity, topography and free
surface all follow from mass conservation (h*u = Q0) and the Bernoulli
invariant. Everything here is analytic, including all derivatives needed by
the adjoint solver. Finite differences appear only in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonPositiveHeight, ValidationError

__all__ = [
    "EnvironmentConfig",
    "FourierShape",
    "FlowState",
    "evaluate_height",
    "critical_height",
    "min_height_check",
    "bernoulli_constant",
    "flow_state",
    "vertical_velocity",
    "shape_sensitivities",
]

DEFAULT_BOTTOM_LIGHT_FRACTION = 0.1


@dataclass(frozen=True)
class EnvironmentConfig:
    """Flow and light constants of the raceway.

    Attributes
    ----------
    Q0 : discharge per unit width (m^2/s)
    a0 : mean water height (m); also fixes the pond volume a0*L
    L : raceway length (m)
    g : gravity (m/s^2)
    zb0 : topography elevation at x = 0 (m)
    Is : photon flux density at the free surface (umol m^-2 s^-1)
    eps : light extinction coefficient (1/m)
    """

    Q0: float = 0.04
    a0: float = 0.4
    L: float = 10.0
    g: float = 9.81
    zb0: float = -0.4
    Is: float = 2050.0
    eps: float = field(default=math.log(10.0) / 0.4)

    def __post_init__(self):
        for name in ("Q0", "a0", "L", "g", "Is", "eps"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")
        if self.a0 <= critical_height(self):
            raise ValidationError(
                f"a0={self.a0} must exceed the critical height "
                f"{critical_height(self):.4g} (flat flow would be supercritical)"
            )

    @classmethod
    def with_bottom_fraction(cls, bottom_light_fraction=DEFAULT_BOTTOM_LIGHT_FRACTION, **kw):
        """Build a config with eps from the bottom-light rule Ib = f * Is."""
        if not 0 < bottom_light_fraction < 1:
            raise ValidationError("bottom_light_fraction must lie in (0, 1)")
        a0 = kw.get("a0", cls.a0)
        eps = math.log(1.0 / bottom_light_fraction) / a0
        return cls(eps=eps, **kw)


@dataclass(frozen=True)
class FourierShape:
    """Truncated sine series for the water height: h(x) = a0 + sum a_n sin(2 n pi x / L).

    The sine basis has zero mean, so the pond volume a0*L is independent of
    the coefficients.
    """

    a: np.ndarray

    def __post_init__(self):
        arr = np.atleast_1d(np.asarray(self.a, dtype=float))
        object.__setattr__(self, "a", arr)

    @property
    def order(self) -> int:
        return self.a.size

    @classmethod
    def flat(cls, order: int = 0) -> "FourierShape":
        return cls(np.zeros(order))

    def padded(self, order: int) -> "FourierShape":
        """Embed into a higher truncation order by appending zeros."""
        if order < self.order:
            raise ValueError("cannot truncate below the current order")
        return FourierShape(np.concatenate([self.a, np.zeros(order - self.order)]))


@dataclass(frozen=True)
class FlowState:
    """Flow quantities (and x-derivatives) at one or more positions."""

    h: np.ndarray
    h1: np.ndarray
    h2: np.ndarray
    u: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    zb: np.ndarray
    eta: np.ndarray
    eta1: np.ndarray
    M0: float


def evaluate_height(shape: FourierShape, env: EnvironmentConfig, x):
    """Evaluate h, h', h'' of the Fourier series at x (scalar or array)."""
    x = np.asarray(x, dtype=float)
    n = np.arange(1, shape.order + 1)
    k = 2.0 * np.pi * n / env.L
    phase = np.multiply.outer(x, k)
    s, c = np.sin(phase), np.cos(phase)
    h = env.a0 + s @ shape.a
    h1 = c @ (k * shape.a)
    h2 = -(s @ (k * k * shape.a))
    return h, h1, h2


def critical_height(env: EnvironmentConfig) -> float:
    """Height at which the Froude number reaches one: h_c = (Q0^2/g)^(1/3)."""
    return (env.Q0 ** 2 / env.g) ** (1.0 / 3.0)


def sample_grid_size(shape: FourierShape) -> int:
    """Period-resolving uniform grid size for extremum bounding."""
    return 10 * max(shape.order, 1) + 1


def min_height_check(shape: FourierShape, env: EnvironmentConfig, n_samples: int | None = None):
    """Minimum of h over a uniform grid and whether the flow stays subcritical.

    h is a band-limited trigonometric polynomial, so a fine uniform grid
    bounds the true minimum tightly. Returns (min_h, subcritical).
    """
    if n_samples is None:
        n_samples = sample_grid_size(shape)
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    xs = np.linspace(0.0, env.L, n_samples)
    h, _, _ = evaluate_height(shape, env, xs)
    min_h = float(h.min())
    return min_h, min_h > critical_height(env)


def bernoulli_constant(env: EnvironmentConfig) -> float:
    """Bernoulli invariant M0 evaluated at x = 0, where h(0) = a0."""
    h0 = env.a0
    return env.Q0 ** 2 / (2.0 * h0 ** 2) + env.g * (h0 + env.zb0)


def flow_state(shape: FourierShape, env: EnvironmentConfig, x) -> FlowState:
    """Full flow state at x (scalar or array): velocity, topography, surface.

    Raises NonPositiveHeight if the profile dips to h <= 0 at any requested x.
    """
    h, h1, h2 = evaluate_height(shape, env, x)
    if np.any(h <= 0):
        raise NonPositiveHeight(f"h(x) <= 0 encountered (min {np.min(h):.4g})")
    M0 = bernoulli_constant(env)
    u = env.Q0 / h
    u1 = -env.Q0 * h1 / h ** 2
    u2 = env.Q0 * (2.0 * h1 ** 2 / h ** 3 - h2 / h ** 2)
    zb = M0 / env.g - env.Q0 ** 2 / (2.0 * env.g * h ** 2) - h
    eta = h + zb
    eta1 = -u * u1 / env.g
    return FlowState(h=h, h1=h1, h2=h2, u=u, u1=u1, u2=u2, zb=zb, eta=eta, eta1=eta1, M0=M0)


def vertical_velocity(shape: FourierShape, env: EnvironmentConfig, x, z):
    """Vertical velocity w(x, z) and its x- and z-derivatives.

    w is linear in z, vanishes at the bottom (non-penetration) and satisfies
    u' + dw/dz = 0 exactly (incompressibility).
    """
    st = flow_state(shape, env, x)
    z = np.asarray(z, dtype=float)
    coef = st.M0 / env.g - 3.0 * st.u ** 2 / (2.0 * env.g) - z
    w = coef * st.u1
    dw_dz = -st.u1
    dw_dx = coef * st.u2 - (3.0 * st.u * st.u1 / env.g) * st.u1
    return w, dw_dx, dw_dz


def shape_sensitivities(shape: FourierShape, env: EnvironmentConfig, x, z, n: int):
    """Derivatives of (h, u, u', eta, w) at fixed (x, z) with respect to a_n.

    n is the 1-based coefficient index. All expressions are exact chain-rule
    derivatives through h and h'.
    """
    if not 1 <= n <= shape.order:
        raise IndexError(f"coefficient index {n} outside 1..{shape.order}")
    st = flow_state(shape, env, x)
    z = np.asarray(z, dtype=float)
    k = 2.0 * np.pi * n / env.L
    x = np.asarray(x, dtype=float)
    s = np.sin(k * x)
    c = np.cos(k * x)
    dh = s
    du = -env.Q0 * s / st.h ** 2
    du1 = -env.Q0 * (k * c / st.h ** 2 - 2.0 * st.h1 * s / st.h ** 3)
    deta = st.u ** 2 * s / (env.g * st.h)
    coef = st.M0 / env.g - 3.0 * st.u ** 2 / (2.0 * env.g) - z
    dw = (-3.0 * st.u * du / env.g) * st.u1 + coef * du1
    return dh, du, du1, deta, dw
