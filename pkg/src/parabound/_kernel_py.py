"""Pure-Python stepping kernels.

Fallback implementation used when the compiled extension is unavailable
(or forced via PARABOUND_PURE_PYTHON=1). The compiled module
parabound._kernel_c mirrors this file operation for operation so both
backends take identical step sequences.

Every step is the exact exponential of a traceless 2x2 generator frozen at
the step midpoint, so each factor has unit determinant by construction and
the product-limit structure of the solution is preserved exactly; accuracy
is controlled separately by step doubling. Error control is per unit time:
a step of size h must contribute at most tol * h / span so the accumulated
error at t_f tracks the requested tolerance.
"""
from __future__ import annotations

import math
from bisect import bisect_right

from .errors import StepLimitExceeded

# controller constants: safety factor and step-change clamps
_SAFETY = 0.9
_SHRINK_MIN = 0.2
_GROW_MAX = 5.0
# the step-doubling difference cannot be resolved below this multiple of
# machine epsilon times the matrix norm; treat such steps as converged
_NOISE_FLOOR = 16.0 * 2.220446049250313e-16


def step_matrix(g11: float, g12: float, g21: float, dt: float):
    """exp(G*dt) for traceless G = [[g11, g12], [g21, -g11]], closed form.

    With s = (g11*dt)^2 + (g12*dt)(g21*dt): hyperbolic for s > 0,
    trigonometric for s < 0, and a series for |s| ~ 0. The determinant of
    the result is 1 up to rounding in all three branches.
    """
    x = g11 * dt
    y = g12 * dt
    z = g21 * dt
    s = x * x + y * z
    if s > 1e-12:
        mu = math.sqrt(s)
        ch = math.cosh(mu)
        f = math.sinh(mu) / mu
    elif s < -1e-12:
        nu = math.sqrt(-s)
        ch = math.cos(nu)
        f = math.sin(nu) / nu
    else:
        ch = 1.0 + s * (0.5 + s / 24.0)
        f = 1.0 + s * (1.0 / 6.0 + s / 120.0)
    return (ch + f * x, f * y, f * z, ch - f * x)


# --- omega^2 evaluators -------------------------------------------------

class _OmegaConst:
    __slots__ = ("w",)

    def __init__(self, w0sq):
        self.w = float(w0sq)

    def omega_sq(self, t):
        return self.w


class _OmegaPiecewise:
    __slots__ = ("win", "lo", "hi", "wout")

    def __init__(self, win, lo, hi, wout):
        self.win = float(win)
        self.lo = float(lo)
        self.hi = float(hi)
        self.wout = float(wout)

    def omega_sq(self, t):
        return self.win if self.lo <= t <= self.hi else self.wout


class _OmegaGauss:
    __slots__ = ("w0sq", "amp", "inv_s2")

    def __init__(self, w0sq, amp, sigma):
        self.w0sq = float(w0sq)
        self.amp = float(amp)
        self.inv_s2 = 1.0 / (float(sigma) * float(sigma))

    def omega_sq(self, t):
        return self.w0sq + self.amp * math.exp(-t * t * self.inv_s2)


class _OmegaSech2:
    __slots__ = ("w0sq", "amp", "inv_w")

    def __init__(self, w0sq, amp, width):
        self.w0sq = float(w0sq)
        self.amp = float(amp)
        self.inv_w = 1.0 / float(width)

    def omega_sq(self, t):
        c = math.cosh(t * self.inv_w)
        return self.w0sq + self.amp / (c * c)


class _OmegaPPoly:
    """Piecewise cubic in scipy PPoly layout; w0sq outside [lo, hi]."""

    __slots__ = ("xs", "c0", "c1", "c2", "c3", "w0sq", "lo", "hi", "m")

    def __init__(self, xs, cs, w0sq, lo, hi):
        self.xs = [float(v) for v in xs]
        self.c0 = [float(v) for v in cs[0]]
        self.c1 = [float(v) for v in cs[1]]
        self.c2 = [float(v) for v in cs[2]]
        self.c3 = [float(v) for v in cs[3]]
        self.w0sq = float(w0sq)
        self.lo = float(lo)
        self.hi = float(hi)
        self.m = len(self.c0)

    def omega_sq(self, t):
        if t < self.lo or t > self.hi:
            return self.w0sq
        i = bisect_right(self.xs, t) - 1
        if i < 0:
            i = 0
        elif i >= self.m:
            i = self.m - 1
        s = t - self.xs[i]
        return ((self.c0[i] * s + self.c1[i]) * s + self.c2[i]) * s + self.c3[i]


class _OmegaCallback:
    __slots__ = ("fn",)

    def __init__(self, fn):
        self.fn = fn

    def omega_sq(self, t):
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
    return _OmegaPPoly(xs, cs, w0sq, lo, hi)


def make_omega_callback(fn):
    return _OmegaCallback(fn)


# --- generators ---------------------------------------------------------

class _PlainGenerator:
    """G(t) = [[0, omega0], [-omega^2(t)/omega0, 0]]."""

    __slots__ = ("om", "omega0", "inv_omega0")

    def __init__(self, om, omega0):
        self.om = om
        self.omega0 = float(omega0)
        self.inv_omega0 = 1.0 / float(omega0)

    def eval(self, t):
        return (0.0, self.omega0, -self.om.omega_sq(t) * self.inv_omega0)


class _ThetaPPoly:
    """Cubic theta(t) in PPoly layout (value and derivative)."""

    __slots__ = ("xs", "c0", "c1", "c2", "c3", "m")

    def __init__(self, xs, cs):
        self.xs = [float(v) for v in xs]
        self.c0 = [float(v) for v in cs[0]]
        self.c1 = [float(v) for v in cs[1]]
        self.c2 = [float(v) for v in cs[2]]
        self.c3 = [float(v) for v in cs[3]]
        self.m = len(self.c0)

    def eval(self, t):
        i = bisect_right(self.xs, t) - 1
        if i < 0:
            i = 0
        elif i >= self.m:
            i = self.m - 1
        s = t - self.xs[i]
        c0 = self.c0[i]
        c1 = self.c1[i]
        val = ((c0 * s + c1) * s + self.c2[i]) * s + self.c3[i]
        der = (3.0 * c0 * s + 2.0 * c1) * s + self.c2[i]
        return val, der


class _ProbeGenerator:
    """Probe-frame generator [[th'/2, Omega], [-omega^2/Omega, -th'/2]]."""

    __slots__ = ("om", "omega0", "theta")

    def __init__(self, om, omega0, theta_xs, theta_cs):
        self.om = om
        self.omega0 = float(omega0)
        self.theta = _ThetaPPoly(theta_xs, theta_cs)

    def eval(self, t):
        th, dth = self.theta.eval(t)
        big_omega = self.omega0 * math.exp(th)
        return (0.5 * dth, big_omega, -self.om.omega_sq(t) / big_omega)


class _CallbackGenerator:
    __slots__ = ("fn",)

    def __init__(self, fn):
        self.fn = fn

    def eval(self, t):
        g11, g12, g21 = self.fn(t)
        return (float(g11), float(g12), float(g21))


def make_plain_generator(om, omega0):
    return _PlainGenerator(om, omega0)


def make_probe_generator(om, omega0, theta_xs, theta_cs):
    return _ProbeGenerator(om, omega0, theta_xs, theta_cs)


def make_callback_generator(fn):
    return _CallbackGenerator(fn)


# --- evolution loops ----------------------------------------------------

def evolve_adaptive(gen, t0, t1, rel_tol, abs_tol, h0, max_steps, breaks, record):
    """Left-ordered product of midpoint-exponential steps over [t0, t1].

    Per-step error is estimated by comparing one full step against two half
    steps (applied to the accumulated matrix, in max norm) and accepted
    against (abs_tol + rel_tol*||T||) * h/span; the two-half-step result is
    kept, so the scheme stays second order. Step boundaries are snapped to
    the supplied break locations.

    Returns (a, b, c, d, accepted, attempts, trajectory or None).
    """
    span = t1 - t0
    ta = 1.0
    tb = 0.0
    tc = 0.0
    td = 1.0
    t = t0
    traj = [(t0, 1.0, 0.0, 0.0, 1.0)] if record else None

    stops = [b for b in breaks if t0 < b < t1]
    stops.sort()
    stops.append(t1)
    si = 0

    h = h0
    attempts = 0
    accepted = 0
    h_floor = 1e-14 * span

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
        g11, g12, g21 = gen.eval(t + half)
        f_a, f_b, f_c, f_d = step_matrix(g11, g12, g21, h_eff)
        g11, g12, g21 = gen.eval(t + 0.25 * h_eff)
        pa, pb, pc, pd = step_matrix(g11, g12, g21, half)
        g11, g12, g21 = gen.eval(t + 0.75 * h_eff)
        qa, qb, qc, qd = step_matrix(g11, g12, g21, half)
        # two half steps, late factor on the left
        sa = qa * pa + qb * pc
        sb = qa * pb + qb * pd
        sc = qc * pa + qd * pc
        sd = qc * pb + qd * pd

        # candidate accumulated matrix
        na = sa * ta + sb * tc
        nb = sa * tb + sb * td
        nc = sc * ta + sd * tc
        nd = sc * tb + sd * td

        # difference of the two step estimates, propagated through T
        da = sa - f_a
        db = sb - f_b
        dc = sc - f_c
        dd = sd - f_d
        e1 = da * ta + db * tc
        e2 = da * tb + db * td
        e3 = dc * ta + dd * tc
        e4 = dc * tb + dd * td
        err = max(abs(e1), abs(e2), abs(e3), abs(e4))

        nrm = max(abs(na), abs(nb), abs(nc), abs(nd))
        tol = (abs_tol + rel_tol * nrm) * (h_eff / span)
        at_noise = err <= _NOISE_FLOOR * nrm

        if err <= tol or at_noise:
            accepted += 1
            ta, tb, tc, td = na, nb, nc, nd
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
            factor = _SAFETY * math.sqrt(tol / err)
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


def evolve_fixed(gen, t0, t1, n_steps, record):
    """n_steps uniform midpoint-exponential steps (order study / oracles)."""
    h = (t1 - t0) / n_steps
    ta = 1.0
    tb = 0.0
    tc = 0.0
    td = 1.0
    traj = [(t0, 1.0, 0.0, 0.0, 1.0)] if record else None
    for k in range(n_steps):
        tm = t0 + (k + 0.5) * h
        g11, g12, g21 = gen.eval(tm)
        sa, sb, sc, sd = step_matrix(g11, g12, g21, h)
        na = sa * ta + sb * tc
        nb = sa * tb + sb * td
        nc = sc * ta + sd * tc
        nd = sc * tb + sd * td
        ta, tb, tc, td = na, nb, nc, nd
        if record:
            traj.append((t0 + (k + 1) * h, ta, tb, tc, td))
    return ta, tb, tc, td, n_steps, n_steps, traj
