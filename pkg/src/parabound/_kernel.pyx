# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled stepping kernels.

Operation-for-operation mirror of parabound._kernel_py; see that module
for the algorithm notes. Kept in lockstep so both backends take identical
step sequences.
"""

from libc.math cimport cos, cosh, exp, fabs, sin, sinh, sqrt

import numpy as _np

from .errors import StepLimitExceeded

cdef double _SAFETY = 0.9
cdef double _SHRINK_MIN = 0.2
cdef double _GROW_MAX = 5.0
# the step-doubling difference cannot be resolved below this multiple of
# machine epsilon times the matrix norm; treat such steps as converged
cdef double _NOISE_FLOOR = 16.0 * 2.220446049250313e-16


cdef inline void _step(double g11, double g12, double g21, double dt,
                       double* out) noexcept:
    cdef double x = g11 * dt
    cdef double y = g12 * dt
    cdef double z = g21 * dt
    cdef double s = x * x + y * z
    cdef double mu, nu, ch, f
    if s > 1e-12:
        mu = sqrt(s)
        ch = cosh(mu)
        f = sinh(mu) / mu
    elif s < -1e-12:
        nu = sqrt(-s)
        ch = cos(nu)
        f = sin(nu) / nu
    else:
        ch = 1.0 + s * (0.5 + s / 24.0)
        f = 1.0 + s * (1.0 / 6.0 + s / 120.0)
    out[0] = ch + f * x
    out[1] = f * y
    out[2] = f * z
    out[3] = ch - f * x


def step_matrix(double g11, double g12, double g21, double dt):
    cdef double out[4]
    _step(g11, g12, g21, dt, out)
    return (out[0], out[1], out[2], out[3])


# --- omega^2 evaluators -------------------------------------------------

cdef class OmegaSq:
    cdef double omega_sq(self, double t) except? -1.7976931348623157e308:
        return 0.0


cdef class _OmegaConst(OmegaSq):
    cdef double w

    def __init__(self, double w0sq):
        self.w = w0sq

    cdef double omega_sq(self, double t) except? -1.7976931348623157e308:
        return self.w


cdef class _OmegaPiecewise(OmegaSq):
    cdef double win, lo, hi, wout

    def __init__(self, double win, double lo, double hi, double wout):
        self.win = win
        self.lo = lo
        self.hi = hi
        self.wout = wout

    cdef double omega_sq(self, double t) except? -1.7976931348623157e308:
        if self.lo <= t <= self.hi:
            return self.win
        return self.wout


cdef class _OmegaGauss(OmegaSq):
    cdef double w0sq, amp, inv_s2

    def __init__(self, double w0sq, double amp, double sigma):
        self.w0sq = w0sq
        self.amp = amp
        self.inv_s2 = 1.0 / (sigma * sigma)

    cdef double omega_sq(self, double t) except? -1.7976931348623157e308:
        return self.w0sq + self.amp * exp(-t * t * self.inv_s2)


cdef class _OmegaSech2(OmegaSq):
    cdef double w0sq, amp, inv_w

    def __init__(self, double w0sq, double amp, double width):
        self.w0sq = w0sq
        self.amp = amp
        self.inv_w = 1.0 / width

    cdef double omega_sq(self, double t) except? -1.7976931348623157e308:
        cdef double c = cosh(t * self.inv_w)
        return self.w0sq + self.amp / (c * c)


cdef inline Py_ssize_t _interval(double[::1] xs, Py_ssize_t m, double t) noexcept:
    # rightmost i with xs[i] <= t, clamped to [0, m-1]
    cdef Py_ssize_t lo = 0
    cdef Py_ssize_t hi = m + 1  # len(xs) == m + 1
    cdef Py_ssize_t mid
    while lo < hi:
        mid = (lo + hi) // 2
        if xs[mid] <= t:
            lo = mid + 1
        else:
            hi = mid
    lo -= 1
    if lo < 0:
        lo = 0
    elif lo >= m:
        lo = m - 1
    return lo


cdef class _OmegaPPoly(OmegaSq):
    cdef double[::1] xs
    cdef double[:, ::1] cs
    cdef double w0sq, lo, hi
    cdef Py_ssize_t m

    def __init__(self, xs, cs, double w0sq, double lo, double hi):
        self.xs = xs
        self.cs = cs
        self.w0sq = w0sq
        self.lo = lo
        self.hi = hi
        self.m = self.cs.shape[1]

    cdef double omega_sq(self, double t) except? -1.7976931348623157e308:
        if t < self.lo or t > self.hi:
            return self.w0sq
        cdef Py_ssize_t i = _interval(self.xs, self.m, t)
        cdef double s = t - self.xs[i]
        return ((self.cs[0, i] * s + self.cs[1, i]) * s + self.cs[2, i]) * s + self.cs[3, i]


cdef class _OmegaCallback(OmegaSq):
    cdef object fn

    def __init__(self, fn):
        self.fn = fn

    cdef double omega_sq(self, double t) except? -1.7976931348623157e308:
        return float(self.fn(t))


def make_omega_const(w0sq):
    return _OmegaConst(w0sq)


def make_omega_piecewise(win, lo, hi, wout):
    return _OmegaPiecewise(win, lo, hi, wout)


def make_omega_gauss(w0sq, amp, sigma):
    return _OmegaGauss(w0sq, amp, sigma)


def make_omega_sech2(w0sq, amp, width):
    return _OmegaSech2(w0sq, amp, width)


def make_omega_ppoly(xs, cs, w0sq, lo, hi):
    return _OmegaPPoly(_np.ascontiguousarray(xs, dtype=_np.float64),
                       _np.ascontiguousarray(cs, dtype=_np.float64),
                       w0sq, lo, hi)


def make_omega_callback(fn):
    return _OmegaCallback(fn)


# --- generators ---------------------------------------------------------

cdef class Generator:
    cdef int eval(self, double t, double* g) except -1:
        g[0] = 0.0
        g[1] = 0.0
        g[2] = 0.0
        return 0


cdef class _PlainGenerator(Generator):
    cdef OmegaSq om
    cdef double omega0, inv_omega0

    def __init__(self, OmegaSq om, double omega0):
        self.om = om
        self.omega0 = omega0
        self.inv_omega0 = 1.0 / omega0

    cdef int eval(self, double t, double* g) except -1:
        g[0] = 0.0
        g[1] = self.omega0
        g[2] = -self.om.omega_sq(t) * self.inv_omega0
        return 0


cdef class _ProbeGenerator(Generator):
    cdef OmegaSq om
    cdef double omega0
    cdef double[::1] xs
    cdef double[:, ::1] cs
    cdef Py_ssize_t m

    def __init__(self, OmegaSq om, double omega0, xs, cs):
        self.om = om
        self.omega0 = omega0
        self.xs = _np.ascontiguousarray(xs, dtype=_np.float64)
        self.cs = _np.ascontiguousarray(cs, dtype=_np.float64)
        self.m = self.cs.shape[1]

    cdef int eval(self, double t, double* g) except -1:
        cdef Py_ssize_t i = _interval(self.xs, self.m, t)
        cdef double s = t - self.xs[i]
        cdef double c0 = self.cs[0, i]
        cdef double c1 = self.cs[1, i]
        cdef double th = ((c0 * s + c1) * s + self.cs[2, i]) * s + self.cs[3, i]
        cdef double dth = (3.0 * c0 * s + 2.0 * c1) * s + self.cs[2, i]
        cdef double big_omega = self.omega0 * exp(th)
        g[0] = 0.5 * dth
        g[1] = big_omega
        g[2] = -self.om.omega_sq(t) / big_omega
        return 0


cdef class _CallbackGenerator(Generator):
    cdef object fn

    def __init__(self, fn):
        self.fn = fn

    cdef int eval(self, double t, double* g) except -1:
        trip = self.fn(t)
        g[0] = float(trip[0])
        g[1] = float(trip[1])
        g[2] = float(trip[2])
        return 0


def make_plain_generator(om, omega0):
    return _PlainGenerator(om, omega0)


def make_probe_generator(om, omega0, theta_xs, theta_cs):
    return _ProbeGenerator(om, omega0, theta_xs, theta_cs)


def make_callback_generator(fn):
    return _CallbackGenerator(fn)


# --- evolution loops ----------------------------------------------------

def evolve_adaptive(Generator gen, double t0, double t1, double rel_tol,
                    double abs_tol, double h0, long max_steps, breaks,
                    bint record):
    cdef double span = t1 - t0
    cdef double ta = 1.0, tb = 0.0, tc = 0.0, td = 1.0
    cdef double t = t0

    traj = [(t0, 1.0, 0.0, 0.0, 1.0)] if record else None

    stops_list = [float(b) for b in breaks if t0 < b < t1]
    stops_list.sort()
    stops_list.append(t1)
    cdef Py_ssize_t n_stops = len(stops_list)
    cdef Py_ssize_t si = 0
    cdef double[::1] stops = _np.asarray(stops_list, dtype=_np.float64)

    cdef double h = h0
    cdef long attempts = 0
    cdef long accepted = 0
    cdef double h_floor = 1e-14 * span

    cdef double stop, dist, h_eff, half
    cdef bint clipped
    cdef double g[3]
    cdef double F[4]
    cdef double P[4]
    cdef double Q[4]
    cdef double sa, sb, sc, sd
    cdef double na, nb, nc, nd
    cdef double da, db, dc, dd
    cdef double e1, e2, e3, e4
    cdef double err, nrm, tol, factor
    cdef bint at_noise

    while t < t1:
        stop = stops[si]
        dist = stop - t
        if dist <= 0.0:
            si += 1
            continue
        clipped = h >= dist
        h_eff = dist if clipped else h

        attempts += 1
        if attempts > max_steps:
            raise StepLimitExceeded(
                f"no convergence after {max_steps} step attempts at t = {t}")

        half = 0.5 * h_eff
        gen.eval(t + half, g)
        _step(g[0], g[1], g[2], h_eff, F)
        gen.eval(t + 0.25 * h_eff, g)
        _step(g[0], g[1], g[2], half, P)
        gen.eval(t + 0.75 * h_eff, g)
        _step(g[0], g[1], g[2], half, Q)
        sa = Q[0] * P[0] + Q[1] * P[2]
        sb = Q[0] * P[1] + Q[1] * P[3]
        sc = Q[2] * P[0] + Q[3] * P[2]
        sd = Q[2] * P[1] + Q[3] * P[3]

        na = sa * ta + sb * tc
        nb = sa * tb + sb * td
        nc = sc * ta + sd * tc
        nd = sc * tb + sd * td

        da = sa - F[0]
        db = sb - F[1]
        dc = sc - F[2]
        dd = sd - F[3]
        e1 = da * ta + db * tc
        e2 = da * tb + db * td
        e3 = dc * ta + dd * tc
        e4 = dc * tb + dd * td
        err = fabs(e1)
        if fabs(e2) > err:
            err = fabs(e2)
        if fabs(e3) > err:
            err = fabs(e3)
        if fabs(e4) > err:
            err = fabs(e4)

        nrm = fabs(na)
        if fabs(nb) > nrm:
            nrm = fabs(nb)
        if fabs(nc) > nrm:
            nrm = fabs(nc)
        if fabs(nd) > nrm:
            nrm = fabs(nd)
        tol = (abs_tol + rel_tol * nrm) * (h_eff / span)
        at_noise = err <= _NOISE_FLOOR * nrm

        if err <= tol or at_noise:
            accepted += 1
            ta = na
            tb = nb
            tc = nc
            td = nd
            if clipped:
                t = stop
                si += 1
            else:
                t = t + h_eff
            if record:
                traj.append((t, ta, tb, tc, td))

        if err == 0.0:
            factor = _GROW_MAX
        else:
            factor = _SAFETY * sqrt(tol / err)
            if factor < _SHRINK_MIN:
                factor = _SHRINK_MIN
            elif factor > _GROW_MAX:
                factor = _GROW_MAX
            if at_noise and factor < 1.0:
                # accepted at the rounding floor: never shrink on noise
                factor = 1.0
        h = h_eff * factor
        if h < h_floor:
            raise StepLimitExceeded(
                f"step size collapsed below {h_floor:g} at t = {t}")

    return ta, tb, tc, td, accepted, attempts, traj


def evolve_fixed(Generator gen, double t0, double t1, long n_steps, bint record):
    cdef double h = (t1 - t0) / n_steps
    cdef double ta = 1.0, tb = 0.0, tc = 0.0, td = 1.0
    cdef double na, nb, nc, nd, tm
    cdef double g[3]
    cdef double S[4]
    cdef long k
    traj = [(t0, 1.0, 0.0, 0.0, 1.0)] if record else None
    for k in range(n_steps):
        tm = t0 + (k + 0.5) * h
        gen.eval(tm, g)
        _step(g[0], g[1], g[2], h, S)
        na = S[0] * ta + S[1] * tc
        nb = S[0] * tb + S[1] * td
        nc = S[2] * ta + S[3] * tc
        nd = S[2] * tb + S[3] * td
        ta = na
        tb = nb
        tc = nc
        td = nd
        if record:
            traj.append((t0 + (k + 1) * h, ta, tb, tc, td))
    return ta, tb, tc, td, n_steps, n_steps, traj
