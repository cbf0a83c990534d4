"""Hot numerical kernels.

Everything here operates on plain arrays so it can be compiled by numba; see
:mod:`nlcavity._accel` for the fallback switch. Rates and times arrive
already rescaled to dimensionless units by the caller.
"""

import numpy as np

from ._accel import jit

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_MAX_STEPS = 2

# Dormand-Prince 5(4) tableau
C2, C3, C4, C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
B1, B3, B4, B5, B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
E1, E3, E4, E5, E6, E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)


@jit
def pchip_eval(t, x, c):
    """Evaluate a piecewise cubic in local power form (scipy ``PPoly`` layout).

    Zero outside ``[x[0], x[-1]]``: drives have finite support.
    """
    n = x.shape[0]
    if n < 2 or t < x[0] or t > x[n - 1]:
        return 0.0
    i = np.searchsorted(x, t, side="right") - 1
    if i > n - 2:
        i = n - 2
    dt = t - x[i]
    return ((c[0, i] * dt + c[1, i]) * dt + c[2, i]) * dt + c[3, i]


@jit
def rhs_cavity(t, y, p, w, dx, dc, out):
    # p = [g1, g2, gamma, kappa_a, kappa_c_in, kappa_c_ex]
    om = pchip_eval(t, dx, dc)
    g1 = p[0]
    g2 = p[1]
    gam = p[2]
    ka = p[3]
    kcin = p[4]
    kcex = p[5]
    cs = y[0]
    ce = y[1]
    ca = y[2]
    cc = y[3]
    out[0] = -1j * om * ce
    out[1] = -1j * om * cs - 1j * g1 * ca - 0.5 * gam * ce
    out[2] = -1j * g1 * ce - 1j * g2 * cc - 0.5 * ka * ca
    out[3] = -1j * g2 * ca - 0.5 * (kcin + kcex) * cc
    out[4] = gam * (ce.real * ce.real + ce.imag * ce.imag)
    out[5] = ka * (ca.real * ca.real + ca.imag * ca.imag)
    out[6] = kcin * (cc.real * cc.real + cc.imag * cc.imag)
    out[7] = kcex * (cc.real * cc.real + cc.imag * cc.imag)


@jit
def rhs_bath(t, y, p, w, dx, dc, out):
    # p = [g1, g2, gamma, kappa_a, kappa_c_in, G]; w = bath detunings
    om = pchip_eval(t, dx, dc)
    g1 = p[0]
    g2 = p[1]
    gam = p[2]
    ka = p[3]
    kcin = p[4]
    G = p[5]
    cs = y[0]
    ce = y[1]
    ca = y[2]
    cc = y[3]
    nb = w.shape[0]
    s = 0.0 + 0.0j
    for j in range(nb):
        s += y[7 + j]
    out[0] = -1j * om * ce
    out[1] = -1j * om * cs - 1j * g1 * ca - 0.5 * gam * ce
    out[2] = -1j * g1 * ce - 1j * g2 * cc - 0.5 * ka * ca
    out[3] = -1j * g2 * ca - 0.5 * kcin * cc + 1j * G * s
    out[4] = gam * (ce.real * ce.real + ce.imag * ce.imag)
    out[5] = ka * (ca.real * ca.real + ca.imag * ca.imag)
    out[6] = kcin * (cc.real * cc.real + cc.imag * cc.imag)
    gcc = 1j * G * cc
    for j in range(nb):
        out[7 + j] = -1j * w[j] * y[7 + j] + gcc


@jit
def _err_norm(err, y, ynew, rtol, atol):
    acc = 0.0
    n = y.shape[0]
    for i in range(n):
        sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
        r = abs(err[i]) / sc
        acc += r * r
    return np.sqrt(acc / n)


RHS_CAVITY = 0
RHS_BATH = 1


@jit
def _rhs(kind, t, y, p, w, dx, dc, out):
    # dispatch on an integer rather than passing the function itself, which
    # would defeat numba's on-disk cache
    if kind == RHS_CAVITY:
        rhs_cavity(t, y, p, w, dx, dc, out)
    else:
        rhs_bath(t, y, p, w, dx, dc, out)


@jit
def dopri5(kind, t0, t1, y0, p, w, dx, dc, rtol, atol, h0, h_min, max_steps, t_eval, n_norm):
    """Adaptive Dormand-Prince 5(4) integration of a complex system.

    Output at ``t_eval`` (sorted, inside ``[t0, t1]``) uses cubic Hermite
    dense output built from the FSAL derivatives of each accepted step.

    ``kind`` selects the right-hand side (RHS_CAVITY or RHS_BATH).
    Returns ``(Y, y_final, status, n_accepted, n_rejected, h_smallest,
    max_norm_rise)`` where ``max_norm_rise`` is the largest increase of
    ``sum(|y[:n_norm]|**2)`` over any accepted step.
    """
    n = y0.shape[0]
    ne = t_eval.shape[0]
    Y = np.zeros((ne, n), dtype=np.complex128)
    y = y0.copy()
    k1 = np.empty(n, dtype=np.complex128)
    k2 = np.empty(n, dtype=np.complex128)
    k3 = np.empty(n, dtype=np.complex128)
    k4 = np.empty(n, dtype=np.complex128)
    k5 = np.empty(n, dtype=np.complex128)
    k6 = np.empty(n, dtype=np.complex128)
    k7 = np.empty(n, dtype=np.complex128)
    tmp = np.empty(n, dtype=np.complex128)
    ynew = np.empty(n, dtype=np.complex128)
    err = np.empty(n, dtype=np.complex128)

    ie = 0
    while ie < ne and t_eval[ie] <= t0:
        Y[ie, :] = y
        ie += 1

    t = t0
    h = min(h0, t1 - t0)
    _rhs(kind, t, y, p, w, dx, dc, k1)
    n_acc = 0
    n_rej = 0
    h_small = h
    status = STATUS_OK
    max_rise = 0.0
    norm_old = 0.0
    for i in range(n_norm):
        norm_old += y[i].real * y[i].real + y[i].imag * y[i].imag

    while t < t1:
        if n_acc + n_rej >= max_steps:
            status = STATUS_MAX_STEPS
            break
        if h < h_min:
            status = STATUS_STEP_UNDERFLOW
            break
        last = False
        if t + h >= t1:
            h = t1 - t
            last = True

        for i in range(n):
            tmp[i] = y[i] + h * A21 * k1[i]
        _rhs(kind, t + C2 * h, tmp, p, w, dx, dc, k2)
        for i in range(n):
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i])
        _rhs(kind, t + C3 * h, tmp, p, w, dx, dc, k3)
        for i in range(n):
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
        _rhs(kind, t + C4 * h, tmp, p, w, dx, dc, k4)
        for i in range(n):
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
        _rhs(kind, t + C5 * h, tmp, p, w, dx, dc, k5)
        for i in range(n):
            tmp[i] = y[i] + h * (
                A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]
            )
        _rhs(kind, t + h, tmp, p, w, dx, dc, k6)
        for i in range(n):
            ynew[i] = y[i] + h * (
                B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]
            )
        _rhs(kind, t + h, ynew, p, w, dx, dc, k7)
        for i in range(n):
            err[i] = h * (
                E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]
            )
        en = _err_norm(err, y, ynew, rtol, atol)

        if en <= 1.0:
            tn = t1 if last else t + h
            while ie < ne and t_eval[ie] <= tn:
                s = (t_eval[ie] - t) / h
                h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s)
                h10 = s * (1.0 - s) * (1.0 - s)
                h01 = s * s * (3.0 - 2.0 * s)
                h11 = s * s * (s - 1.0)
                for i in range(n):
                    Y[ie, i] = h00 * y[i] + h10 * h * k1[i] + h01 * ynew[i] + h11 * h * k7[i]
                ie += 1
            norm_new = 0.0
            for i in range(n_norm):
                norm_new += ynew[i].real * ynew[i].real + ynew[i].imag * ynew[i].imag
            if norm_new - norm_old > max_rise:
                max_rise = norm_new - norm_old
            norm_old = norm_new
            for i in range(n):
                y[i] = ynew[i]
                k1[i] = k7[i]
            if h < h_small:
                h_small = h
            t = tn
            n_acc += 1
            if en == 0.0:
                fac = 5.0
            else:
                fac = min(5.0, max(0.2, 0.9 * en ** -0.2))
            h = h * fac
        else:
            n_rej += 1
            fac = max(0.2, 0.9 * en ** -0.2)
            h = h * fac

    while ie < ne:
        Y[ie, :] = y
        ie += 1
    return Y, y, status, n_acc, n_rej, h_small, max_rise


@jit
def slab_sum(f, dv):
    """Midpoint-rule volume sum, reduced per x-slab then in fixed slab order."""
    nx = f.shape[0]
    slabs = np.zeros(nx, dtype=np.complex128)
    for i in range(nx):
        acc = 0.0 + 0.0j
        for j in range(f.shape[1]):
            for k in range(f.shape[2]):
                acc += f[i, j, k]
        slabs[i] = acc
    total = 0.0 + 0.0j
    for i in range(nx):
        total += slabs[i]
    return total * dv
