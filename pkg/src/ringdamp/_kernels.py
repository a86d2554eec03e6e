"""Compiled inner loops for trajectory integration.

The right-hand side reduces to a handful of precomputed scalars plus one 3x3
matrix, so the hot loops are written against that flattened form and jitted
with numba.  Falls back to pure-Python execution (slow but correct) when
numba is unavailable.

Coefficient vector layout (see integrators._rhs_coefficients):
    c[0] = ring axial moment of inertia
    c[1] = 0 for the dissipationless (frozen slug-rate) system, else 1
    c[2] = 0 for the diagonal slug-acceleration closure, 1 for the coupled one
    c[3] = friction rate constant        (diagonal closure)
    c[4] = y-coupling divisor            (diagonal closure)
    c[5] = x-coupling divisor            (diagonal closure)
    c[6] = friction torque factor        (coupled closure)
    c[7] = slug product of inertia       (coupled closure)
    c[8] = slug-acceleration coefficient (coupled closure)
"""

import math

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

# Status codes returned by the kernels.
OK = 0
NON_FINITE = 1
STEP_UNDERFLOW = 2


@njit(cache=True)
def _rhs(h0, h1, h2, bd, m, c):
    x0 = h0
    x1 = h1
    x2 = h2 + bd * c[0]
    v0 = m[0, 0] * x0 + m[0, 1] * x1 + m[0, 2] * x2
    v1 = m[1, 0] * x0 + m[1, 1] * x1 + m[1, 2] * x2
    v2 = m[2, 0] * x0 + m[2, 1] * x1 + m[2, 2] * x2
    dh0 = h1 * v2 - h2 * v1
    dh1 = h2 * v0 - h0 * v2
    dh2 = h0 * v1 - h1 * v0
    if c[1] == 0.0:
        dbd = 0.0
    elif c[2] == 0.0:
        dbd = -bd * c[3] + h0 * h1 / c[4] - h0 * h1 / c[5]
    else:
        mdh0 = m[0, 0] * dh0 + m[0, 1] * dh1 + m[0, 2] * dh2
        dbd = (dh2 - c[6] * bd - c[7] * mdh0) / c[8]
    return dh0, dh1, dh2, dbd


@njit(cache=True)
def _rk4_step(h0, h1, h2, bd, dt, m, c):
    a0, a1, a2, a3 = _rhs(h0, h1, h2, bd, m, c)
    half = 0.5 * dt
    b0, b1, b2, b3 = _rhs(h0 + half * a0, h1 + half * a1, h2 + half * a2,
                          bd + half * a3, m, c)
    g0, g1, g2, g3 = _rhs(h0 + half * b0, h1 + half * b1, h2 + half * b2,
                          bd + half * b3, m, c)
    e0, e1, e2, e3 = _rhs(h0 + dt * g0, h1 + dt * g1, h2 + dt * g2,
                          bd + dt * g3, m, c)
    sixth = dt / 6.0
    return (h0 + sixth * (a0 + 2.0 * (b0 + g0) + e0),
            h1 + sixth * (a1 + 2.0 * (b1 + g1) + e1),
            h2 + sixth * (a2 + 2.0 * (b2 + g2) + e2),
            bd + sixth * (a3 + 2.0 * (b3 + g3) + e3))


@njit(cache=True)
def rk4_collect(y0, dt, n_steps, sample_every, m, c, renorm, h_ref):
    """Fixed-step RK4, recording every ``sample_every``-th step.

    Returns (samples, step_index, max_renorm, status, bad_step) where
    samples[k] = (h0, h1, h2, bd) at step_index[k] steps from the start.
    """
    n_rec = n_steps // sample_every
    if n_steps % sample_every:
        n_rec += 1
    out = np.empty((n_rec + 1, 4))
    idx = np.empty(n_rec + 1, np.int64)
    h0, h1, h2, bd = y0[0], y0[1], y0[2], y0[3]
    out[0, 0], out[0, 1], out[0, 2], out[0, 3] = h0, h1, h2, bd
    idx[0] = 0
    k = 1
    max_renorm = 0.0
    status = OK
    bad_step = -1
    for i in range(n_steps):
        h0, h1, h2, bd = _rk4_step(h0, h1, h2, bd, dt, m, c)
        if renorm:
            mag = math.sqrt(h0 * h0 + h1 * h1 + h2 * h2)
            if mag > 0.0:
                s = h_ref / mag
                h0 *= s
                h1 *= s
                h2 *= s
                if abs(s - 1.0) > max_renorm:
                    max_renorm = abs(s - 1.0)
        if (i + 1) % sample_every == 0 or i + 1 == n_steps:
            if not (math.isfinite(h0) and math.isfinite(h1)
                    and math.isfinite(h2) and math.isfinite(bd)):
                status = NON_FINITE
                bad_step = i + 1
                break
            out[k, 0], out[k, 1], out[k, 2], out[k, 3] = h0, h1, h2, bd
            idx[k] = i + 1
            k += 1
    return out[:k], idx[:k], max_renorm, status, bad_step


@njit(cache=True)
def _rk45_stages(h0, h1, h2, bd, dt, m, c):
    """One Dormand-Prince 5(4) step: returns the 5th-order update and the
    embedded error components."""
    k10, k11, k12, k13 = _rhs(h0, h1, h2, bd, m, c)

    y0 = h0 + dt * (0.2 * k10)
    y1 = h1 + dt * (0.2 * k11)
    y2 = h2 + dt * (0.2 * k12)
    y3 = bd + dt * (0.2 * k13)
    k20, k21, k22, k23 = _rhs(y0, y1, y2, y3, m, c)

    y0 = h0 + dt * (3.0 / 40.0 * k10 + 9.0 / 40.0 * k20)
    y1 = h1 + dt * (3.0 / 40.0 * k11 + 9.0 / 40.0 * k21)
    y2 = h2 + dt * (3.0 / 40.0 * k12 + 9.0 / 40.0 * k22)
    y3 = bd + dt * (3.0 / 40.0 * k13 + 9.0 / 40.0 * k23)
    k30, k31, k32, k33 = _rhs(y0, y1, y2, y3, m, c)

    y0 = h0 + dt * (44.0 / 45.0 * k10 - 56.0 / 15.0 * k20 + 32.0 / 9.0 * k30)
    y1 = h1 + dt * (44.0 / 45.0 * k11 - 56.0 / 15.0 * k21 + 32.0 / 9.0 * k31)
    y2 = h2 + dt * (44.0 / 45.0 * k12 - 56.0 / 15.0 * k22 + 32.0 / 9.0 * k32)
    y3 = bd + dt * (44.0 / 45.0 * k13 - 56.0 / 15.0 * k23 + 32.0 / 9.0 * k33)
    k40, k41, k42, k43 = _rhs(y0, y1, y2, y3, m, c)

    y0 = h0 + dt * (19372.0 / 6561.0 * k10 - 25360.0 / 2187.0 * k20
                    + 64448.0 / 6561.0 * k30 - 212.0 / 729.0 * k40)
    y1 = h1 + dt * (19372.0 / 6561.0 * k11 - 25360.0 / 2187.0 * k21
                    + 64448.0 / 6561.0 * k31 - 212.0 / 729.0 * k41)
    y2 = h2 + dt * (19372.0 / 6561.0 * k12 - 25360.0 / 2187.0 * k22
                    + 64448.0 / 6561.0 * k32 - 212.0 / 729.0 * k42)
    y3 = bd + dt * (19372.0 / 6561.0 * k13 - 25360.0 / 2187.0 * k23
                    + 64448.0 / 6561.0 * k33 - 212.0 / 729.0 * k43)
    k50, k51, k52, k53 = _rhs(y0, y1, y2, y3, m, c)

    y0 = h0 + dt * (9017.0 / 3168.0 * k10 - 355.0 / 33.0 * k20
                    + 46732.0 / 5247.0 * k30 + 49.0 / 176.0 * k40
                    - 5103.0 / 18656.0 * k50)
    y1 = h1 + dt * (9017.0 / 3168.0 * k11 - 355.0 / 33.0 * k21
                    + 46732.0 / 5247.0 * k31 + 49.0 / 176.0 * k41
                    - 5103.0 / 18656.0 * k51)
    y2 = h2 + dt * (9017.0 / 3168.0 * k12 - 355.0 / 33.0 * k22
                    + 46732.0 / 5247.0 * k32 + 49.0 / 176.0 * k42
                    - 5103.0 / 18656.0 * k52)
    y3 = bd + dt * (9017.0 / 3168.0 * k13 - 355.0 / 33.0 * k23
                    + 46732.0 / 5247.0 * k33 + 49.0 / 176.0 * k43
                    - 5103.0 / 18656.0 * k53)
    k60, k61, k62, k63 = _rhs(y0, y1, y2, y3, m, c)

    n0 = h0 + dt * (35.0 / 384.0 * k10 + 500.0 / 1113.0 * k30
                    + 125.0 / 192.0 * k40 - 2187.0 / 6784.0 * k50
                    + 11.0 / 84.0 * k60)
    n1 = h1 + dt * (35.0 / 384.0 * k11 + 500.0 / 1113.0 * k31
                    + 125.0 / 192.0 * k41 - 2187.0 / 6784.0 * k51
                    + 11.0 / 84.0 * k61)
    n2 = h2 + dt * (35.0 / 384.0 * k12 + 500.0 / 1113.0 * k32
                    + 125.0 / 192.0 * k42 - 2187.0 / 6784.0 * k52
                    + 11.0 / 84.0 * k62)
    n3 = bd + dt * (35.0 / 384.0 * k13 + 500.0 / 1113.0 * k33
                    + 125.0 / 192.0 * k43 - 2187.0 / 6784.0 * k53
                    + 11.0 / 84.0 * k63)
    k70, k71, k72, k73 = _rhs(n0, n1, n2, n3, m, c)

    # Embedded error: (5th order) - (4th order) combination of the stages.
    e0 = dt * (71.0 / 57600.0 * k10 - 71.0 / 16695.0 * k30 + 71.0 / 1920.0 * k40
               - 17253.0 / 339200.0 * k50 + 22.0 / 525.0 * k60 - 1.0 / 40.0 * k70)
    e1 = dt * (71.0 / 57600.0 * k11 - 71.0 / 16695.0 * k31 + 71.0 / 1920.0 * k41
               - 17253.0 / 339200.0 * k51 + 22.0 / 525.0 * k61 - 1.0 / 40.0 * k71)
    e2 = dt * (71.0 / 57600.0 * k12 - 71.0 / 16695.0 * k32 + 71.0 / 1920.0 * k42
               - 17253.0 / 339200.0 * k52 + 22.0 / 525.0 * k62 - 1.0 / 40.0 * k72)
    e3 = dt * (71.0 / 57600.0 * k13 - 71.0 / 16695.0 * k33 + 71.0 / 1920.0 * k43
               - 17253.0 / 339200.0 * k53 + 22.0 / 525.0 * k63 - 1.0 / 40.0 * k73)
    return n0, n1, n2, n3, e0, e1, e2, e3


@njit(cache=True)
def rk45_collect(y0, sample_times, rtol, atol, dt0, dt_min, dt_max,
                 m, c, renorm, h_ref):
    """Adaptive Dormand-Prince 5(4), landing exactly on each sample time.

    Returns (samples, max_renorm, status, n_steps, t_fail, filled) where
    samples[k] corresponds to sample_times[k-1] for k >= 1 (samples[0] is
    the initial state).
    """
    n_out = sample_times.shape[0] + 1
    out = np.empty((n_out, 4))
    h0, h1, h2, bd = y0[0], y0[1], y0[2], y0[3]
    out[0, 0], out[0, 1], out[0, 2], out[0, 3] = h0, h1, h2, bd
    filled = 1
    t = 0.0
    dt = min(dt0, dt_max)
    max_renorm = 0.0
    status = OK
    n_steps = 0
    t_fail = -1.0
    for ti in range(sample_times.shape[0]):
        target = sample_times[ti]
        while t < target:
            step_dt = dt
            hit = False
            if t + step_dt >= target:
                step_dt = target - t
                hit = True
            n0, n1, n2, n3, e0, e1, e2, e3 = _rk45_stages(h0, h1, h2, bd,
                                                          step_dt, m, c)
            s0 = atol + rtol * max(abs(h0), abs(n0))
            s1 = atol + rtol * max(abs(h1), abs(n1))
            s2 = atol + rtol * max(abs(h2), abs(n2))
            s3 = atol + rtol * max(abs(bd), abs(n3))
            err = math.sqrt(((e0 / s0) ** 2 + (e1 / s1) ** 2
                             + (e2 / s2) ** 2 + (e3 / s3) ** 2) / 4.0)
            if not math.isfinite(err):
                status = NON_FINITE
                t_fail = t
                return out[:filled], max_renorm, status, n_steps, t_fail, filled
            if err <= 1.0:
                n_steps += 1
                if hit:
                    t = target
                else:
                    t += step_dt
                h0, h1, h2, bd = n0, n1, n2, n3
                if renorm:
                    mag = math.sqrt(h0 * h0 + h1 * h1 + h2 * h2)
                    if mag > 0.0:
                        s = h_ref / mag
                        h0 *= s
                        h1 *= s
                        h2 *= s
                        if abs(s - 1.0) > max_renorm:
                            max_renorm = abs(s - 1.0)
            # Step-size controller (order-5 update with safety factor).
            if err == 0.0:
                fac = 5.0
            else:
                fac = 0.9 * err ** -0.2
                if fac > 5.0:
                    fac = 5.0
                elif fac < 0.2:
                    fac = 0.2
            dt = step_dt * fac
            if dt > dt_max:
                dt = dt_max
            if dt < dt_min:
                if err > 1.0:
                    status = STEP_UNDERFLOW
                    t_fail = t
                    return out[:filled], max_renorm, status, n_steps, t_fail, filled
                dt = dt_min
        if not (math.isfinite(h0) and math.isfinite(h1)
                and math.isfinite(h2) and math.isfinite(bd)):
            status = NON_FINITE
            t_fail = t
            return out[:filled], max_renorm, status, n_steps, t_fail, filled
        out[filled, 0], out[filled, 1], out[filled, 2], out[filled, 3] = h0, h1, h2, bd
        filled += 1
    return out[:filled], max_renorm, status, n_steps, t_fail, filled
