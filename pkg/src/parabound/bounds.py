"""Rigorous upper and lower bounds on the Bogoliubov coefficients.

Every upper bound has the shape |beta|^2 <= sinh^2(I/2) for a bound
integral I that depends on the chosen probe:

  elementary          I = int |omega0 - omega^2/omega0| dt        (Omega = omega0)
  probe(Omega)        I = int (1/Omega) sqrt(Omega'^2 + (Omega^2 - omega^2)^2) dt
  interpolating(eps)  Omega = omega^eps omega0^(1-eps), needs omega^2 > 0
  triangle            I = int |Omega'/Omega| + int |Omega - omega^2/Omega|

and implies |alpha|^2 <= cosh^2(I/2), transmission >= sech^2(I/2),
reflection <= tanh^2(I/2). The lower bound comes from the trace of T^2:
|beta|^2 >= (|tr T^2| - 2)/4, informative only when |tr T| > 2 (real
eigenvalues).

Integrands contain absolute values, so each quadrature pre-splits its
interval at the scanned roots of the relevant expressions; reports carry
the quadrature error estimate plus the profile's truncation budget.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NegativeOmegaSquared, NotUnimodular, InadmissibleProbe
from .profiles import FrequencyProfile
from .probes import ProbeFunction
from .propagator import TransferMatrix
from .quadrature import QuadConfig, adaptive_quadrature, sign_change_roots

_DET_TOL = 1e-6


@dataclass(frozen=True)
class BoundReport:
    """One evaluated bound; fields not meaningful for the kind are None."""

    kind: str
    epsilon: Optional[float]
    integral: Optional[float]
    beta_sq_bound: Optional[float]
    alpha_sq_bound: Optional[float]
    transmission_lower: Optional[float]
    reflection_upper: Optional[float]
    lower_beta_sq: Optional[float]
    applicable: bool
    quad_error: float

    def as_dict(self) -> dict:
        """Fixed key order used by the CLI serializers."""
        return {
            "kind": self.kind,
            "epsilon": self.epsilon,
            "integral": self.integral,
            "beta_sq_bound": self.beta_sq_bound,
            "alpha_sq_bound": self.alpha_sq_bound,
            "transmission_lower": self.transmission_lower,
            "reflection_upper": self.reflection_upper,
            "lower_beta_sq": self.lower_beta_sq,
            "applicable": self.applicable,
            "quad_error": self.quad_error,
        }


def _upper_report(kind: str, integral: float, quad_error: float,
                  epsilon: Optional[float] = None) -> BoundReport:
    s = math.sinh(0.5 * integral)
    beta_sq = s * s
    alpha_sq = 1.0 + beta_sq  # hyperbolic identity, exact by construction
    transmission = 1.0 / alpha_sq
    return BoundReport(
        kind=kind, epsilon=epsilon, integral=integral,
        beta_sq_bound=beta_sq, alpha_sq_bound=alpha_sq,
        transmission_lower=transmission, reflection_upper=1.0 - transmission,
        lower_beta_sq=None, applicable=True, quad_error=quad_error,
    )


def _omega_match_roots(profile: FrequencyProfile) -> list[float]:
    """Roots of omega0^2 - omega^2(t): the elementary integrand's kinks."""
    w0sq = profile.omega0 * profile.omega0
    omega_sq = profile.omega_sq

    def g(t):
        return w0sq - np.asarray(omega_sq(t), dtype=float)

    return sign_change_roots(g, profile.t_i, profile.t_f)


def _derivative_roots(profile: FrequencyProfile) -> list[float]:
    d = profile.omega_sq_derivative
    if d is None:
        return []
    return sign_change_roots(lambda t: np.asarray(d(t), dtype=float),
                             profile.t_i, profile.t_f)


def _probe_roots(profile: FrequencyProfile, probe: ProbeFunction) -> list[float]:
    """Kink candidates: zeros of theta' and of Omega^2 - omega^2."""
    roots = sign_change_roots(
        lambda t: np.asarray(probe.theta_dot(t), dtype=float),
        profile.t_i, profile.t_f)
    omega_sq = profile.omega_sq

    def mism(t):
        om = np.asarray(probe.omega(t), dtype=float)
        return om * om - np.asarray(omega_sq(t), dtype=float)

    roots += sign_change_roots(mism, profile.t_i, profile.t_f)
    return roots


def _check_probe(profile: FrequencyProfile, probe: ProbeFunction) -> None:
    if not probe.matches(profile):
        raise InadmissibleProbe(
            "probe support/omega0 does not match the profile "
            f"(probe [{probe.t_i}, {probe.t_f}] @ {probe.omega0}, "
            f"profile [{profile.t_i}, {profile.t_f}] @ {profile.omega0})")


def elementary_bound(profile: FrequencyProfile,
                     quad: QuadConfig | None = None) -> BoundReport:
    """The Omega = omega0 bound: I = int |omega0 - omega^2/omega0| dt."""
    omega0 = profile.omega0
    omega_sq = profile.omega_sq

    def integrand(t):
        return np.abs(omega0 - np.asarray(omega_sq(t), dtype=float) / omega0)

    breaks = _omega_match_roots(profile) + list(profile.interior_discontinuities())
    integral, err = adaptive_quadrature(integrand, profile.t_i, profile.t_f,
                                        quad, breaks)
    return _upper_report("elementary", integral, err + profile.truncation_tol)


def probe_bound(profile: FrequencyProfile, probe: ProbeFunction,
                quad: QuadConfig | None = None) -> BoundReport:
    """General probe bound; valid for any sign of omega^2."""
    _check_probe(profile, probe)
    omega_sq = profile.omega_sq

    def integrand(t):
        om = np.asarray(probe.omega(t), dtype=float)
        dom = np.asarray(probe.omega_dot(t), dtype=float)
        mism = om * om - np.asarray(omega_sq(t), dtype=float)
        return np.sqrt(dom * dom + mism * mism) / np.abs(om)

    breaks = _probe_roots(profile, probe) + list(profile.interior_discontinuities())
    integral, err = adaptive_quadrature(integrand, profile.t_i, profile.t_f,
                                        quad, breaks)
    return _upper_report("probe", integral, err + profile.truncation_tol)


def interpolating_bound(profile: FrequencyProfile, epsilon: float,
                        quad: QuadConfig | None = None) -> BoundReport:
    """Omega = omega^eps omega0^(1-eps); interpolates elementary <-> adiabatic.

    Raises NegativeOmegaSquared unless omega^2 > 0 everywhere on the
    support (otherwise the probe itself turns imaginary).
    """
    if not (0.0 <= epsilon <= 1.0):
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    if not profile.everywhere_positive:
        raise NegativeOmegaSquared(
            "interpolating bound needs omega^2 > 0 on the whole support")
    if epsilon > 0.0 and profile.endpoint_mismatch() > 1e-6:
        # a probe proportional to omega^eps fails Omega(t_i) = omega0 when
        # omega^2 jumps at the support edges; the bound is invalid there
        raise InadmissibleProbe(
            "interpolating bound with epsilon > 0 requires omega -> omega0 "
            f"at the support edges; relative gap is {profile.endpoint_mismatch():.3e}")
    if profile.omega_sq_derivative is None:
        raise ValueError("interpolating bound needs omega_sq_derivative")
    omega0 = profile.omega0
    omega_sq = profile.omega_sq
    domega_sq = profile.omega_sq_derivative
    w0_pow = omega0 ** (2.0 - 2.0 * epsilon)

    def integrand(t):
        w = np.asarray(omega_sq(t), dtype=float)
        dw = np.asarray(domega_sq(t), dtype=float)
        track = epsilon * epsilon * dw * dw / (4.0 * w * w)
        mism = w0_pow - w ** (1.0 - epsilon)
        return np.sqrt(track + (w ** epsilon) * mism * mism / w0_pow)

    breaks = (_omega_match_roots(profile) + _derivative_roots(profile)
              + list(profile.interior_discontinuities()))
    integral, err = adaptive_quadrature(integrand, profile.t_i, profile.t_f,
                                        quad, breaks)
    return _upper_report("interpolating", integral, err + profile.truncation_tol,
                         epsilon=epsilon)


def triangle_bound(profile: FrequencyProfile, probe: ProbeFunction,
                   quad: QuadConfig | None = None) -> BoundReport:
    """sqrt(x^2+y^2) <= |x|+|y| applied to the probe integrand.

    Always at least as large as probe_bound for the same probe, but each
    piece is often available in closed form.
    """
    _check_probe(profile, probe)
    omega_sq = profile.omega_sq

    def track(t):
        return np.abs(np.asarray(probe.theta_dot(t), dtype=float))

    def mismatch(t):
        om = np.asarray(probe.omega(t), dtype=float)
        return np.abs(om - np.asarray(omega_sq(t), dtype=float) / om)

    t_roots = sign_change_roots(
        lambda t: np.asarray(probe.theta_dot(t), dtype=float),
        profile.t_i, profile.t_f)
    m_roots = sign_change_roots(
        lambda t: (np.asarray(probe.omega(t), dtype=float) ** 2
                   - np.asarray(omega_sq(t), dtype=float)),
        profile.t_i, profile.t_f)
    disc = list(profile.interior_discontinuities())
    i1, e1 = adaptive_quadrature(track, profile.t_i, profile.t_f, quad,
                                 t_roots + disc)
    i2, e2 = adaptive_quadrature(mismatch, profile.t_i, profile.t_f, quad,
                                 m_roots + disc)
    return _upper_report("triangle", i1 + i2, e1 + e2 + profile.truncation_tol)


def lower_bound_beta(T: TransferMatrix) -> tuple[float, bool]:
    """(lower bound on |beta|^2, applicability flag).

    Uses tr(T^2) = (a+d)^2 - 2; the bound (|tr T^2| - 2)/4 is clamped at 0
    and flagged applicable only when |a+d| > 2 (real eigenvalues).
    """
    drift = T.det_drift()
    if drift > _DET_TOL:
        raise NotUnimodular(f"|det T - 1| = {drift:.3e} exceeds {_DET_TOL}")
    tr = T.a + T.d
    tr_sq = tr * tr - 2.0
    lower = max(0.0, 0.25 * (abs(tr_sq) - 2.0))
    return lower, abs(tr) > 2.0


def lower_bound_report(T: TransferMatrix) -> BoundReport:
    lower, applicable = lower_bound_beta(T)
    return BoundReport(
        kind="lower", epsilon=None, integral=None,
        beta_sq_bound=None, alpha_sq_bound=None,
        transmission_lower=None, reflection_upper=None,
        lower_beta_sq=lower, applicable=applicable, quad_error=0.0,
    )
