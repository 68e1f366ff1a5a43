"""Probe functions Omega(t) used to reframe the evolution and tighten bounds.

A probe is stored as theta(t) = ln(Omega/omega0) on N+1 uniform nodes with
a shape-preserving cubic (pchip) interpolant; the exponential representation
makes Omega = omega0 * e^theta positive by construction, and the endpoint
conditions Omega(t_i) = omega0 = Omega(t_f) become theta = 0 at both ends.

Probes built from an analytic frequency track (Omega = omega) additionally
carry exact theta evaluators so bound integrals are not limited by node
interpolation; the node values remain the canonical representation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import InadmissibleProbe
from .profiles import FrequencyProfile

_THETA_CAP = 50.0  # overflow guard: Omega/omega0 within e^(+-50)


@dataclass(frozen=True, eq=False)
class ProbeFunction:
    """Admissible probe: real, positive, endpoint-matched to omega0."""

    omega0: float
    t_i: float
    t_f: float
    theta_nodes: np.ndarray
    # optional exact evaluators overriding the interpolant
    theta_fn: Optional[Callable] = field(default=None, repr=False)
    theta_dot_fn: Optional[Callable] = field(default=None, repr=False)
    _pp: PchipInterpolator = field(init=False, repr=False)
    _dpp: object = field(init=False, repr=False)

    def __post_init__(self):
        nodes = np.asarray(self.theta_nodes, dtype=float)
        object.__setattr__(self, "theta_nodes", nodes)
        if self.omega0 <= 0.0 or not math.isfinite(self.omega0):
            raise InadmissibleProbe(f"omega0 must be > 0, got {self.omega0}")
        if not self.t_i < self.t_f:
            raise InadmissibleProbe(f"empty probe domain [{self.t_i}, {self.t_f}]")
        if nodes.ndim != 1 or len(nodes) < 2:
            raise InadmissibleProbe("need at least 2 theta nodes")
        if not np.all(np.isfinite(nodes)):
            raise InadmissibleProbe("theta nodes must be finite")
        if np.max(np.abs(nodes)) > _THETA_CAP:
            raise InadmissibleProbe(f"|theta| exceeds overflow guard {_THETA_CAP}")
        if nodes[0] != 0.0 or nodes[-1] != 0.0:
            raise InadmissibleProbe("theta must vanish at both endpoints")
        ts = np.linspace(self.t_i, self.t_f, len(nodes))
        pp = PchipInterpolator(ts, nodes)
        object.__setattr__(self, "_pp", pp)
        object.__setattr__(self, "_dpp", pp.derivative())

    # --- evaluators (vectorized, scalars fine) ---

    def theta(self, t):
        if self.theta_fn is not None:
            return self.theta_fn(t)
        return self._pp(t)

    def theta_dot(self, t):
        if self.theta_dot_fn is not None:
            return self.theta_dot_fn(t)
        return self._dpp(t)

    def omega(self, t):
        return self.omega0 * np.exp(self.theta(t))

    def omega_dot(self, t):
        return self.omega(t) * self.theta_dot(t)

    @property
    def node_times(self) -> np.ndarray:
        return np.linspace(self.t_i, self.t_f, len(self.theta_nodes))

    def ppoly_arrays(self):
        """(breakpoints, coefficients) for the compiled kernel, or (None, None)
        when an analytic theta overrides the interpolant."""
        if self.theta_fn is not None:
            return None, None
        return (np.ascontiguousarray(self._pp.x),
                np.ascontiguousarray(self._pp.c))

    # --- constructors ---

    @classmethod
    def constant(cls, omega0: float, t_i: float, t_f: float,
                 n_nodes: int = 17) -> "ProbeFunction":
        """The trivial probe Omega = omega0 (theta identically zero)."""
        return cls(omega0, t_i, t_f, np.zeros(n_nodes))

    @classmethod
    def from_theta_samples(cls, omega0: float, t_i: float, t_f: float,
                           theta_values, snap_endpoints: bool = True) -> "ProbeFunction":
        """Probe from theta values on a uniform grid.

        With snap_endpoints the first/last values are forced to exactly 0,
        absorbing truncation-level residues from sampled frequency tracks.
        """
        nodes = np.array(theta_values, dtype=float)
        if snap_endpoints and len(nodes) >= 2:
            nodes[0] = 0.0
            nodes[-1] = 0.0
        return cls(omega0, t_i, t_f, nodes)

    @classmethod
    def from_theta_function(cls, omega0: float, t_i: float, t_f: float,
                            fn: Callable, n_nodes: int = 129) -> "ProbeFunction":
        """Sample theta(t) on n_nodes uniform nodes (endpoints snapped)."""
        ts = np.linspace(t_i, t_f, n_nodes)
        return cls.from_theta_samples(omega0, t_i, t_f, fn(ts))

    @classmethod
    def from_profile_omega(cls, profile: FrequencyProfile,
                           n_nodes: int = 257) -> "ProbeFunction":
        """The adiabatic track Omega(t) = omega(t); needs omega^2 > 0.

        Node endpoints are snapped to 0; for truncated profiles the exact
        evaluators deviate there by at most truncation_tol/2.
        """
        if not profile.everywhere_positive:
            raise InadmissibleProbe(
                "Omega = omega requires omega^2 > 0 on the whole support")
        if profile.endpoint_mismatch() > 1e-6:
            raise InadmissibleProbe(
                "Omega = omega requires omega -> omega0 at the support edges; "
                f"relative endpoint gap is {profile.endpoint_mismatch():.3e}")
        w0sq = profile.omega0 * profile.omega0
        omega_sq = profile.omega_sq
        domega_sq = profile.omega_sq_derivative

        def theta_fn(t):
            return 0.5 * np.log(np.asarray(omega_sq(t), dtype=float) / w0sq)

        theta_dot_fn = None
        if domega_sq is not None:
            def theta_dot_fn(t):
                return 0.5 * np.asarray(domega_sq(t), dtype=float) / np.asarray(
                    omega_sq(t), dtype=float)

        ts = np.linspace(profile.t_i, profile.t_f, n_nodes)
        nodes = np.asarray(theta_fn(ts), dtype=float).copy()
        nodes[0] = 0.0
        nodes[-1] = 0.0
        return cls(profile.omega0, profile.t_i, profile.t_f, nodes,
                   theta_fn=theta_fn, theta_dot_fn=theta_dot_fn)

    def matches(self, profile: FrequencyProfile) -> bool:
        span = profile.span
        return (abs(self.t_i - profile.t_i) <= 1e-9 * span
                and abs(self.t_f - profile.t_f) <= 1e-9 * span
                and abs(self.omega0 - profile.omega0) <= 1e-12 * profile.omega0)

    def write_csv(self, path) -> None:
        """Dump nodes as CSV: t,theta,omega."""
        import csv

        ts = self.node_times
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "theta", "omega"])
            for t, th in zip(ts, self.theta_nodes):
                writer.writerow([
                    format(t, ".17g"), format(th, ".17g"),
                    format(self.omega0 * math.exp(th), ".17g"),
                ])
