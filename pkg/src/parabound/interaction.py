"""Interaction-picture split of the evolution: T = T_e * T_delta.

Splitting omega^2 = omega_e^2 + omega_delta^2 into an exactly solvable part
and a remainder turns the full transfer matrix into the product of the
exact part's matrix and the ordered exponential of the conjugated generator

    G_delta(t) = T_e(t)^{-1} Q_delta(t) T_e(t),
    Q_delta(t) = [[0, 0], [-omega_delta^2(t)/omega0, 0]],

which is traceless (similarity preserves the trace), so the same
unit-determinant stepping applies. Exact parts are restricted to the
piecewise-constant families (constant, rectangular, hyperbolic_pulse),
whose T_e(t) is available in closed form at any interior time.

Phase-stripped coefficient pairs compose under the matrix product as

    alpha = alpha_e alpha_d + conj(beta_e) beta_d
    beta  = beta_e  alpha_d + conj(alpha_e) beta_d

which sandwiches |beta| between
|sqrt(1+|b_e|^2) |b_d| -+ |b_e| sqrt(1+|b_d|^2)|.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import (
    MismatchedOmega0,
    MismatchedSupport,
    NegativeMagnitude,
    NotUnimodular,
    SingularExactPart,
    UnsupportedExactPart,
)
from .profiles import FrequencyProfile, ProfileSpec, make_profile
from .propagator import SolverConfig, TransferMatrix, evolve, _kernel

_DET_TOL = 1e-6
_PIECEWISE_KINDS = {"constant", "rectangular", "hyperbolic_pulse"}


@dataclass(frozen=True, eq=False)
class ProfileSplit:
    """Full profile, its exactly solvable part, and the pointwise remainder."""

    full: FrequencyProfile
    exact_part: FrequencyProfile
    delta_omega_sq: Callable

    @property
    def omega0(self) -> float:
        return self.full.omega0


@dataclass(frozen=True)
class PhaseStrippedPair:
    """Bogoliubov pair with endpoint phases removed; |a|^2 - |b|^2 = 1."""

    alpha_tilde: complex
    beta_tilde: complex

    def __post_init__(self):
        residual = abs(self.alpha_tilde) ** 2 - abs(self.beta_tilde) ** 2 - 1.0
        if abs(residual) > 1e-8:
            raise ValueError(f"pair not normalized: residual {residual:.3e}")

    @property
    def beta_mag(self) -> float:
        return abs(self.beta_tilde)


def phase_stripped(T: TransferMatrix) -> PhaseStrippedPair:
    """Tilde pair straight from the matrix entries (no endpoint phases)."""
    drift = T.det_drift()
    if drift > _DET_TOL:
        raise NotUnimodular(f"|det T - 1| = {drift:.3e} exceeds {_DET_TOL}")
    return PhaseStrippedPair(
        0.5 * complex(T.a + T.d, T.b - T.c),
        0.5 * complex(T.a - T.d, T.b + T.c),
    )


def split(profile: FrequencyProfile, exact_spec: ProfileSpec) -> ProfileSplit:
    """Split the profile against an exactly solvable part.

    The exact part must be piecewise constant, share the support and the
    reference frequency; the remainder is evaluated pointwise by
    subtraction.
    """
    if exact_spec.kind not in _PIECEWISE_KINDS:
        raise UnsupportedExactPart(
            f"exact part must be one of {sorted(_PIECEWISE_KINDS)}, "
            f"got {exact_spec.kind!r}")
    exact = make_profile(exact_spec)
    span = profile.span
    if (abs(exact.t_i - profile.t_i) > 1e-12 * span
            or abs(exact.t_f - profile.t_f) > 1e-12 * span):
        raise MismatchedSupport(
            f"exact part support [{exact.t_i}, {exact.t_f}] vs "
            f"profile [{profile.t_i}, {profile.t_f}]")
    if abs(exact.omega0 - profile.omega0) > 1e-12 * profile.omega0:
        raise MismatchedOmega0(
            f"exact part omega0 {exact.omega0} vs profile {profile.omega0}")

    full_omega_sq = profile.omega_sq
    exact_omega_sq = exact.omega_sq

    def delta_omega_sq(t):
        return np.asarray(full_omega_sq(t), dtype=float) - np.asarray(
            exact_omega_sq(t), dtype=float)

    return ProfileSplit(full=profile, exact_part=exact, delta_omega_sq=delta_omega_sq)


def _piecewise_segments(exact: FrequencyProfile) -> list[tuple[float, float, float]]:
    """(start, end, omega_sq) segments of a piecewise-constant exact part."""
    edges = [exact.t_i, *exact.interior_discontinuities(), exact.t_f]
    segments = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        segments.append((lo, hi, float(exact.omega_sq(mid))))
    return segments


class _ExactEvolution:
    """Closed-form T_e(t) for a piecewise-constant exact part, any t in support."""

    def __init__(self, exact: FrequencyProfile):
        if exact.kind_tag not in _PIECEWISE_KINDS:
            raise UnsupportedExactPart(
                f"closed-form exact evolution needs a piecewise-constant part, "
                f"got {exact.kind_tag!r}")
        self.omega0 = exact.omega0
        self.segments = _piecewise_segments(exact)
        from . import _kernel_py
        self._step = _kernel_py.step_matrix
        # accumulated matrices at segment starts
        acc = (1.0, 0.0, 0.0, 1.0)
        self._acc = [acc]
        for lo, hi, wsq in self.segments:
            s = self._step(0.0, self.omega0, -wsq / self.omega0, hi - lo)
            acc = (s[0] * acc[0] + s[1] * acc[2], s[0] * acc[1] + s[1] * acc[3],
                   s[2] * acc[0] + s[3] * acc[2], s[2] * acc[1] + s[3] * acc[3])
            self._acc.append(acc)

    def at(self, t: float) -> tuple[float, float, float, float]:
        segs = self.segments
        i = 0
        for i in range(len(segs)):
            if t <= segs[i][1] or i == len(segs) - 1:
                break
        lo, _hi, wsq = segs[i]
        base = self._acc[i]
        s = self._step(0.0, self.omega0, -wsq / self.omega0, t - lo)
        return (s[0] * base[0] + s[1] * base[2], s[0] * base[1] + s[1] * base[3],
                s[2] * base[0] + s[3] * base[2], s[2] * base[1] + s[3] * base[3])

    def final(self) -> TransferMatrix:
        return TransferMatrix(*self._acc[-1])


def exact_transfer(exact: FrequencyProfile) -> TransferMatrix:
    """Closed-form transfer matrix of a piecewise-constant profile."""
    return _ExactEvolution(exact).final()


def evolve_delta(split_: ProfileSplit, config: Optional[SolverConfig] = None,
                 *, backend: Optional[str] = None) -> TransferMatrix:
    """T_delta: ordered exponential of the conjugated remainder generator."""
    cfg = config or SolverConfig()
    exact = _ExactEvolution(split_.exact_part)
    T_end = exact.final()
    if T_end.det_drift() > _DET_TOL:
        raise SingularExactPart(
            f"exact part determinant drifted by {T_end.det_drift():.3e}")

    omega0 = split_.omega0
    delta = split_.delta_omega_sq

    def triple(t):
        a, b, _c, _d = exact.at(t)
        q = -float(delta(t)) / omega0
        # T_e^{-1} Q_delta T_e = [[-abq, -b^2 q], [a^2 q, abq]]: traceless
        return (-a * b * q, -b * b * q, a * a * q)

    kern = _kernel(backend)
    gen = kern.make_callback_generator(triple)
    profile = split_.full
    h0 = cfg.initial_step if cfg.initial_step is not None else profile.span / 256.0
    raw = kern.evolve_adaptive(
        gen, profile.t_i, profile.t_f, cfg.rel_tol, cfg.abs_tol, h0,
        cfg.max_steps, profile.interior_discontinuities(), False,
    )
    return TransferMatrix(raw[0], raw[1], raw[2], raw[3])


def compose(T_e: TransferMatrix, T_delta: TransferMatrix) -> TransferMatrix:
    """T = T_e * T_delta (exact part applied last, i.e. on the left)."""
    for name, T in (("T_e", T_e), ("T_delta", T_delta)):
        drift = T.det_drift()
        if drift > _DET_TOL:
            raise NotUnimodular(f"{name}: |det - 1| = {drift:.3e} exceeds {_DET_TOL}")
    return T_e @ T_delta


def compose_coefficients(e: PhaseStrippedPair, delta: PhaseStrippedPair) -> PhaseStrippedPair:
    """Tilde pair of the product T_e * T_delta from the parts' pairs."""
    alpha = e.alpha_tilde * delta.alpha_tilde + e.beta_tilde.conjugate() * delta.beta_tilde
    beta = e.beta_tilde * delta.alpha_tilde + e.alpha_tilde.conjugate() * delta.beta_tilde
    return PhaseStrippedPair(alpha, beta)


def composition_bounds(beta_e_mag: float, beta_delta_mag: float) -> tuple[float, float]:
    """(lower, upper) for |beta| of the composite given the parts' |beta|."""
    if beta_e_mag < 0.0 or beta_delta_mag < 0.0:
        raise NegativeMagnitude(
            f"magnitudes must be >= 0, got ({beta_e_mag}, {beta_delta_mag})")
    alpha_e = math.sqrt(1.0 + beta_e_mag * beta_e_mag)
    alpha_d = math.sqrt(1.0 + beta_delta_mag * beta_delta_mag)
    upper = alpha_e * beta_delta_mag + beta_e_mag * alpha_d
    lower = abs(alpha_e * beta_delta_mag - beta_e_mag * alpha_d)
    return lower, upper


def split_transfer(split_: ProfileSplit, config: Optional[SolverConfig] = None,
                   *, backend: Optional[str] = None) -> tuple[TransferMatrix, TransferMatrix]:
    """(T_e, T_delta) for a split, both unit determinant."""
    T_e = exact_transfer(split_.exact_part)
    T_d = evolve_delta(split_, config, backend=backend)
    return T_e, T_d
