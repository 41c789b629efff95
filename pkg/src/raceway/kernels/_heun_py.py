"""Pure-numpy reference implementation of the hot integration kernels.

Same contracts as the compiled module `_heun`; selected at import time when
the extension is unavailable or RACEWAY_PURE_PYTHON=1 is set. Layers share
the horizontal trajectory x(t), so each time step does scalar work for x and
vectorized work of size Nz for (z, C).
"""

from __future__ import annotations

import numpy as np

from ..errors import NonPositiveHeight, NonProgress, StepBlowup

BACKEND = "python"

# slack tolerances shared with the compiled kernel
_Z_SLACK = 1e-6
_C_SLACK = 1e-12


def _height(a, a0, kvec, x):
    ph = kvec * x
    return a0 + np.sin(ph) @ a, np.cos(ph) @ (kvec * a)


def forward_sweep(a, a0, L, Q0, g, M0, Is, eps, kr, kd, tau, sigma, z0, dt, max_steps):
    """Heun integration of (x, z_i, C_i) from x=0 until x reaches L exactly.

    Returns (t, x, z, C, I) with t, x of length M and z, C, I of shape
    (Nz, M). C starts at its steady state for the initial light of each
    layer; the last step is time-rescaled to land on x = L.
    """
    a = np.asarray(a, dtype=float)
    z = np.asarray(z0, dtype=float).copy()
    kvec = 2.0 * np.pi * np.arange(1, a.size + 1) / L

    def stage(x, z, C):
        h, h1 = _height(a, a0, kvec, x)
        if h <= 0:
            raise NonPositiveHeight(f"h(x={x:.4g}) <= 0 during integration")
        u = Q0 / h
        if u <= 0:
            raise NonProgress("horizontal velocity is not positive")
        u1 = -Q0 * h1 / h ** 2
        eta = M0 / g - u * u / (2.0 * g)
        w = (M0 / g - 3.0 * u * u / (2.0 * g) - z) * u1
        I = Is * np.exp(-eps * (eta - z))
        sI = sigma * I
        denom = tau * sI + 1.0
        alpha = kd * tau * sI ** 2 / denom + kr
        beta = alpha - kr
        Cdot = -alpha * C + beta
        return h, u, u1, eta, w, I, alpha, beta, Cdot

    # steady-state C at the initial light of each layer
    h0, _ = _height(a, a0, kvec, 0.0)
    eta0 = M0 / g - (Q0 / h0) ** 2 / (2.0 * g)
    I0 = Is * np.exp(-eps * (eta0 - z))
    sI = sigma * I0
    alpha0 = kd * tau * sI ** 2 / (tau * sI + 1.0) + kr
    C = (alpha0 - kr) / alpha0

    x = 0.0
    t = 0.0
    ts, xs = [0.0], [0.0]
    zs, Cs, Is_ = [z.copy()], [C.copy()], [I0.copy()]
    done = False

    for _ in range(max_steps):
        h_n, u_n, u1_n, eta_n, w_n, I_n, _, _, Cd_n = stage(x, z, C)
        zb_n = eta_n - h_n
        if np.any(z < zb_n - _Z_SLACK) or np.any(z > eta_n + _Z_SLACK):
            raise StepBlowup(f"trajectory left the water column near x={x:.4g}")
        dts = dt
        for _attempt in range(8):
            xp = x + dts * u_n
            zp = z + dts * w_n
            Cp = C + dts * Cd_n
            _, u_p, _, _, w_p, _, _, _, Cd_p = stage(xp, zp, Cp)
            xn = x + 0.5 * dts * (u_n + u_p)
            if not done and xn < L - 1e-13:
                break
            # rescale the final step until the Heun update lands on x = L
            done = True
            if abs(xn - L) <= 1e-13 * L:
                break
            dts *= (L - x) / (xn - x)
        if done:
            xn = L
        zn = z + 0.5 * dts * (w_n + w_p)
        Cn = C + 0.5 * dts * (Cd_n + Cd_p)
        if np.any(Cn < -_C_SLACK) or np.any(Cn > 1.0 + _C_SLACK):
            raise StepBlowup("photoinhibition state left [0, 1]; reduce the time step")
        np.clip(Cn, 0.0, 1.0, out=Cn)
        x, z, C, t = xn, zn, Cn, t + dts
        h_e, _ = _height(a, a0, kvec, x)
        eta_e = M0 / g - (Q0 / h_e) ** 2 / (2.0 * g)
        ts.append(t)
        xs.append(x)
        zs.append(z.copy())
        Cs.append(C.copy())
        Is_.append(Is * np.exp(-eps * (eta_e - z)))
        if done:
            break
    else:
        raise NonProgress("lap did not complete within max_steps")

    return (
        np.array(ts),
        np.array(xs),
        np.array(zs).T.copy(),
        np.array(Cs).T.copy(),
        np.array(Is_).T.copy(),
    )


def adjoint_sweep(t, alpha, s1, A, B, dzI, dxI, dzw, dxw, dxu):
    """Backward Heun sweep of the multiplier system on the forward grid.

    All coefficient arrays are precomputed at the grid nodes: alpha, s1, A,
    B, dzI, dxI, dxw have shape (Nz, M); dzw, dxu have shape (M,). Returns
    (p1, p2, p3) with terminal values zero.
    """
    t = np.asarray(t, dtype=float)
    Nz, M = alpha.shape
    p1 = np.zeros((Nz, M))
    p2 = np.zeros((Nz, M))
    p3 = np.zeros(M)

    def rates(m, q1, q2, q3):
        f1 = s1[:, m] + alpha[:, m] * q1
        qq = A[:, m] + B[:, m] * q1
        f2 = -qq * dzI[:, m] - q2 * dzw[m]
        f3 = -np.sum(qq * dxI[:, m] + q2 * dxw[:, m]) - q3 * dxu[m]
        return f1, f2, f3

    for m in range(M - 2, -1, -1):
        dtk = t[m + 1] - t[m]
        f1, f2, f3 = rates(m + 1, p1[:, m + 1], p2[:, m + 1], p3[m + 1])
        q1 = p1[:, m + 1] - dtk * f1
        q2 = p2[:, m + 1] - dtk * f2
        q3 = p3[m + 1] - dtk * f3
        g1, g2, g3 = rates(m, q1, q2, q3)
        p1[:, m] = p1[:, m + 1] - 0.5 * dtk * (f1 + g1)
        p2[:, m] = p2[:, m + 1] - 0.5 * dtk * (f2 + g2)
        p3[m] = p3[m + 1] - 0.5 * dtk * (f3 + g3)

    return p1, p2, p3
