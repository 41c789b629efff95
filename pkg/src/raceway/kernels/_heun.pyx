# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled integration kernels: forward Heun lap and backward adjoint sweep.

Contracts match `_heun_py`; that module is the reference implementation and
the two are cross-checked in the test suite.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sin, cos, exp, M_PI

from ..errors import NonPositiveHeight, NonProgress, StepBlowup

cnp.import_array()

BACKEND = "cython"

cdef double Z_SLACK = 1e-6
cdef double C_SLACK = 1e-12


cdef inline void _height(double[::1] a, double a0, double twopi_L, double x,
                         double* h, double* h1) noexcept nogil:
    cdef Py_ssize_t n
    cdef double hh = a0, hh1 = 0.0, kn, ph
    for n in range(a.shape[0]):
        kn = twopi_L * (n + 1)
        ph = kn * x
        hh += a[n] * sin(ph)
        hh1 += a[n] * kn * cos(ph)
    h[0] = hh
    h1[0] = hh1


def forward_sweep(object a_in, double a0, double L, double Q0, double g,
                  double M0, double Is, double eps, double kr, double kd,
                  double tau, double sigma, object z0_in, double dt,
                  int max_steps):
    """Heun integration of (x, z_i, C_i) from x=0 until x reaches L exactly."""
    cdef double[::1] a = np.ascontiguousarray(a_in, dtype=np.float64)
    cdef cnp.ndarray z0_arr = np.ascontiguousarray(z0_in, dtype=np.float64)
    cdef double[::1] z0 = z0_arr
    cdef Py_ssize_t Nz = z0.shape[0]
    cdef double twopi_L = 2.0 * M_PI / L

    t_out = np.empty(max_steps + 1)
    x_out = np.empty(max_steps + 1)
    z_out = np.empty((Nz, max_steps + 1))
    C_out = np.empty((Nz, max_steps + 1))
    I_out = np.empty((Nz, max_steps + 1))
    cdef double[::1] tv = t_out
    cdef double[::1] xv = x_out
    cdef double[:, ::1] zv = z_out
    cdef double[:, ::1] Cv = C_out
    cdef double[:, ::1] Iv = I_out

    work = np.empty((8, Nz))
    cdef double[:, ::1] wk = work
    cdef double[::1] z = wk[0], C = wk[1], w_n = wk[2], Cd_n = wk[3]
    cdef double[::1] zp = wk[4], Cp = wk[5], w_p = wk[6], Cd_p = wk[7]

    cdef double h, h1, u, u1, eta, zb, I, sI, denom, alpha
    cdef double h_p, h1_p, u_p, u1_p, eta_p
    cdef double x = 0.0, t = 0.0, dts, xp, xn, zi, Ci
    cdef Py_ssize_t i, m, step, attempt
    cdef bint done = False, blowup = False, nonpos = False

    # node 0: steady-state C at the initial light per layer
    _height(a, a0, twopi_L, 0.0, &h, &h1)
    if h <= 0:
        raise NonPositiveHeight("h(0) <= 0")
    u = Q0 / h
    eta = M0 / g - u * u / (2.0 * g)
    for i in range(Nz):
        z[i] = z0[i]
        I = Is * exp(-eps * (eta - z[i]))
        sI = sigma * I
        alpha = kd * tau * sI * sI / (tau * sI + 1.0) + kr
        C[i] = (alpha - kr) / alpha
        zv[i, 0] = z[i]
        Cv[i, 0] = C[i]
        Iv[i, 0] = I
    tv[0] = 0.0
    xv[0] = 0.0

    m = 0
    for step in range(max_steps):
        # stage 1 at the current node
        _height(a, a0, twopi_L, x, &h, &h1)
        if h <= 0:
            raise NonPositiveHeight(f"h(x={x:.4g}) <= 0 during integration")
        u = Q0 / h
        if u <= 0:
            raise NonProgress("horizontal velocity is not positive")
        u1 = -Q0 * h1 / (h * h)
        eta = M0 / g - u * u / (2.0 * g)
        zb = eta - h
        for i in range(Nz):
            zi = z[i]
            if zi < zb - Z_SLACK or zi > eta + Z_SLACK:
                raise StepBlowup(f"trajectory left the water column near x={x:.4g}")
            w_n[i] = (M0 / g - 3.0 * u * u / (2.0 * g) - zi) * u1
            I = Is * exp(-eps * (eta - zi))
            sI = sigma * I
            denom = tau * sI + 1.0
            alpha = kd * tau * sI * sI / denom + kr
            Cd_n[i] = -alpha * C[i] + (alpha - kr)

        dts = dt
        for attempt in range(8):
            xp = x + dts * u
            _height(a, a0, twopi_L, xp, &h_p, &h1_p)
            if h_p <= 0:
                raise NonPositiveHeight(f"h(x={xp:.4g}) <= 0 during integration")
            u_p = Q0 / h_p
            if u_p <= 0:
                raise NonProgress("horizontal velocity is not positive")
            u1_p = -Q0 * h1_p / (h_p * h_p)
            eta_p = M0 / g - u_p * u_p / (2.0 * g)
            for i in range(Nz):
                zp[i] = z[i] + dts * w_n[i]
                Cp[i] = C[i] + dts * Cd_n[i]
                w_p[i] = (M0 / g - 3.0 * u_p * u_p / (2.0 * g) - zp[i]) * u1_p
                I = Is * exp(-eps * (eta_p - zp[i]))
                sI = sigma * I
                denom = tau * sI + 1.0
                alpha = kd * tau * sI * sI / denom + kr
                Cd_p[i] = -alpha * Cp[i] + (alpha - kr)
            xn = x + 0.5 * dts * (u + u_p)
            if not done and xn < L - 1e-13:
                break
            # rescale the final step until the Heun update lands on x = L
            done = True
            if xn - L <= 1e-13 * L and L - xn <= 1e-13 * L:
                break
            dts = dts * (L - x) / (xn - x)
        if done:
            xn = L

        for i in range(Nz):
            z[i] = z[i] + 0.5 * dts * (w_n[i] + w_p[i])
            Ci = C[i] + 0.5 * dts * (Cd_n[i] + Cd_p[i])
            if Ci < -C_SLACK or Ci > 1.0 + C_SLACK:
                raise StepBlowup("photoinhibition state left [0, 1]; reduce the time step")
            if Ci < 0.0:
                Ci = 0.0
            elif Ci > 1.0:
                Ci = 1.0
            C[i] = Ci
        x = xn
        t = t + dts

        m += 1
        _height(a, a0, twopi_L, x, &h, &h1)
        u = Q0 / h
        eta = M0 / g - u * u / (2.0 * g)
        tv[m] = t
        xv[m] = x
        for i in range(Nz):
            zv[i, m] = z[i]
            Cv[i, m] = C[i]
            Iv[i, m] = Is * exp(-eps * (eta - z[i]))
        if done:
            break
    else:
        raise NonProgress("lap did not complete within max_steps")

    return (
        t_out[: m + 1].copy(),
        x_out[: m + 1].copy(),
        z_out[:, : m + 1].copy(),
        C_out[:, : m + 1].copy(),
        I_out[:, : m + 1].copy(),
    )


def adjoint_sweep(object t_in, object alpha_in, object s1_in, object A_in,
                  object B_in, object dzI_in, object dxI_in, object dzw_in,
                  object dxw_in, object dxu_in):
    """Backward Heun sweep of the multiplier system on the forward grid."""
    cdef double[::1] t = np.ascontiguousarray(t_in, dtype=np.float64)
    cdef double[:, ::1] alpha = np.ascontiguousarray(alpha_in, dtype=np.float64)
    cdef double[:, ::1] s1 = np.ascontiguousarray(s1_in, dtype=np.float64)
    cdef double[:, ::1] A = np.ascontiguousarray(A_in, dtype=np.float64)
    cdef double[:, ::1] B = np.ascontiguousarray(B_in, dtype=np.float64)
    cdef double[:, ::1] dzI = np.ascontiguousarray(dzI_in, dtype=np.float64)
    cdef double[:, ::1] dxI = np.ascontiguousarray(dxI_in, dtype=np.float64)
    cdef double[::1] dzw = np.ascontiguousarray(dzw_in, dtype=np.float64)
    cdef double[:, ::1] dxw = np.ascontiguousarray(dxw_in, dtype=np.float64)
    cdef double[::1] dxu = np.ascontiguousarray(dxu_in, dtype=np.float64)

    cdef Py_ssize_t Nz = alpha.shape[0], M = alpha.shape[1]
    p1_out = np.zeros((Nz, M))
    p2_out = np.zeros((Nz, M))
    p3_out = np.zeros(M)
    cdef double[:, ::1] p1 = p1_out
    cdef double[:, ::1] p2 = p2_out
    cdef double[::1] p3 = p3_out

    work = np.empty((6, Nz))
    cdef double[:, ::1] wk = work
    cdef double[::1] f1 = wk[0], f2 = wk[1], q1 = wk[2], q2 = wk[3]
    cdef double[::1] g1 = wk[4], g2 = wk[5]

    cdef double dtk, f3, g3, q3, qq
    cdef Py_ssize_t m, i

    for m in range(M - 2, -1, -1):
        dtk = t[m + 1] - t[m]
        f3 = -p3[m + 1] * dxu[m + 1]
        for i in range(Nz):
            f1[i] = s1[i, m + 1] + alpha[i, m + 1] * p1[i, m + 1]
            qq = A[i, m + 1] + B[i, m + 1] * p1[i, m + 1]
            f2[i] = -qq * dzI[i, m + 1] - p2[i, m + 1] * dzw[m + 1]
            f3 -= qq * dxI[i, m + 1] + p2[i, m + 1] * dxw[i, m + 1]
        q3 = p3[m + 1] - dtk * f3
        g3 = -q3 * dxu[m]
        for i in range(Nz):
            q1[i] = p1[i, m + 1] - dtk * f1[i]
            q2[i] = p2[i, m + 1] - dtk * f2[i]
            g1[i] = s1[i, m] + alpha[i, m] * q1[i]
            qq = A[i, m] + B[i, m] * q1[i]
            g2[i] = -qq * dzI[i, m] - q2[i] * dzw[m]
            g3 -= qq * dxI[i, m] + q2[i] * dxw[i, m]
        for i in range(Nz):
            p1[i, m] = p1[i, m + 1] - 0.5 * dtk * (f1[i] + g1[i])
            p2[i, m] = p2[i, m + 1] - 0.5 * dtk * (f2[i] + g2[i])
        p3[m] = p3[m + 1] - 0.5 * dtk * (f3 + g3)

    return p1_out, p2_out, p3_out
