"""Frequency profiles omega^2(t) for the parametric oscillator problem.

A profile bundles the evaluator omega^2(t), the reference frequency omega0
it relaxes to outside the support [t_i, t_f], and the metadata downstream
solvers and bound evaluators need. Space-domain scattering problems use the
same object under the x <-> t relabeling: omega^2 plays the role of k^2(x).

Analytic families with genuinely compact support (constant, rectangular,
hyperbolic_pulse, tabulated) are exact; asymptotically constant families
(gaussian_bump, sech2) are truncated at a relative tolerance that is
recorded on the profile so bound reports can carry it as an error budget.
Non-compact profiles must approach omega0^2 fast enough that
|omega0 - omega^2/omega0| is integrable on the real line; both built-in
families decay exponentially, which is far more than enough.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import (
    EmptySupport,
    NegativeAsymptoticK,
    NonPositiveOmega0,
    TabulatedTooSparse,
)

_POSITIVITY_SAMPLES = 10_000

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ProfileSpec:
    """Family tag plus per-family parameters; validated by make_profile.

    Only the fields relevant to `kind` are set; the helpers below build
    specs without exposing the unused slots.
    """

    kind: str
    omega0: float = 1.0
    # rectangular
    omega1: Optional[float] = None
    # hyperbolic_pulse: the (typically negative) omega^2 value inside
    omega_sq_inside: Optional[float] = None
    # piecewise families
    start: Optional[float] = None
    duration: Optional[float] = None
    # gaussian_bump / sech2
    amplitude: Optional[float] = None
    sigma: Optional[float] = None
    width: Optional[float] = None
    # tabulated: ((t, omega_sq), ...)
    samples: Optional[tuple[tuple[float, float], ...]] = None
    # from_potential
    energy: Optional[float] = None
    mass: Optional[float] = None
    hbar: Optional[float] = None


def constant(omega0: float = 1.0, start: float = 0.0, duration: float = 1.0) -> ProfileSpec:
    return ProfileSpec(kind="constant", omega0=omega0, start=start, duration=duration)


def rectangular(omega0: float, omega1: float, start: float, duration: float) -> ProfileSpec:
    return ProfileSpec(kind="rectangular", omega0=omega0, omega1=omega1,
                       start=start, duration=duration)


def hyperbolic_pulse(omega0: float, omega_sq_inside: float, start: float,
                     duration: float) -> ProfileSpec:
    return ProfileSpec(kind="hyperbolic_pulse", omega0=omega0,
                       omega_sq_inside=omega_sq_inside, start=start, duration=duration)


def gaussian_bump(omega0: float, amplitude: float, sigma: float) -> ProfileSpec:
    return ProfileSpec(kind="gaussian_bump", omega0=omega0, amplitude=amplitude, sigma=sigma)


def sech2(omega0: float, amplitude: float, width: float) -> ProfileSpec:
    return ProfileSpec(kind="sech2", omega0=omega0, amplitude=amplitude, width=width)


def tabulated(omega0: float, samples) -> ProfileSpec:
    return ProfileSpec(kind="tabulated", omega0=omega0,
                       samples=tuple((float(t), float(w)) for t, w in samples))


@dataclass(frozen=True, eq=False)
class FrequencyProfile:
    """omega^2(t) with compact or truncated support and its metadata.

    Immutable after construction; safe to share across threads. The
    evaluators are numpy-vectorized and also accept scalars.
    """

    omega0: float
    t_i: float
    t_f: float
    omega_sq: Evaluator
    omega_sq_derivative: Optional[Evaluator]
    everywhere_positive: bool
    kind_tag: str
    truncation_tol: float = 0.0
    discontinuities: tuple[float, ...] = ()
    # low-level family payload consumed by the stepping kernels; profiles
    # built by hand fall back to the callback path
    kernel_payload: Optional[tuple] = field(default=None, repr=False)

    def __post_init__(self):
        if self.omega0 <= 0.0 or not math.isfinite(self.omega0):
            raise NonPositiveOmega0(f"omega0 must be > 0, got {self.omega0}")
        if not (self.t_i < self.t_f):
            raise EmptySupport(f"support [{self.t_i}, {self.t_f}] is degenerate")

    @property
    def support(self) -> tuple[float, float]:
        return (self.t_i, self.t_f)

    @property
    def span(self) -> float:
        return self.t_f - self.t_i

    def interior_discontinuities(self) -> tuple[float, ...]:
        return tuple(d for d in self.discontinuities if self.t_i < d < self.t_f)

    def endpoint_mismatch(self) -> float:
        """max relative gap between omega^2 at the support edges and omega0^2.

        Zero (up to truncation) for families that reach omega0 continuously;
        order 1 for profiles that jump at the edges (rectangular). Probes
        tied to the frequency track are only admissible when this is small.
        """
        w0sq = self.omega0 * self.omega0
        gap_i = abs(float(self.omega_sq(self.t_i)) - w0sq)
        gap_f = abs(float(self.omega_sq(self.t_f)) - w0sq)
        return max(gap_i, gap_f) / w0sq


def _positivity(omega_sq: Evaluator, t_i: float, t_f: float,
                analytic_min: Optional[float]) -> bool:
    ts = np.linspace(t_i, t_f, _POSITIVITY_SAMPLES)
    sampled_min = float(np.min(omega_sq(ts)))
    lo = sampled_min if analytic_min is None else min(sampled_min, analytic_min)
    return lo > 0.0


def _check_truncation_tol(truncation_tol: float) -> None:
    if not (0.0 < truncation_tol <= 1e-3):
        raise ValueError(f"truncation_tol must lie in (0, 1e-3], got {truncation_tol}")


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValueError(message)


def _piecewise_profile(kind: str, omega0: float, w_inside: float, start: float,
                       duration: float) -> FrequencyProfile:
    if omega0 <= 0.0:
        raise NonPositiveOmega0(f"omega0 must be > 0, got {omega0}")
    if not duration > 0.0:
        raise EmptySupport(f"duration must be > 0, got {duration}")
    w0sq = omega0 * omega0
    lo, hi = start, start + duration

    def omega_sq(t):
        t = np.asarray(t, dtype=float)
        return np.where((t >= lo) & (t <= hi), w_inside, w0sq)

    def omega_sq_derivative(t):
        t = np.asarray(t, dtype=float)
        return np.zeros_like(t)

    return FrequencyProfile(
        omega0=omega0, t_i=lo, t_f=hi,
        omega_sq=omega_sq, omega_sq_derivative=omega_sq_derivative,
        everywhere_positive=_positivity(omega_sq, lo, hi, min(w_inside, w0sq)),
        kind_tag=kind, truncation_tol=0.0,
        discontinuities=() if w_inside == w0sq else (lo, hi),
        kernel_payload=("piecewise", (w_inside, lo, hi, w0sq)),
    )


def _gaussian_profile(spec: ProfileSpec, truncation_tol: float) -> FrequencyProfile:
    omega0, amp, sig = spec.omega0, spec.amplitude, spec.sigma
    _require(amp is not None and sig is not None, "gaussian_bump needs amplitude and sigma")
    _require(sig > 0.0, f"sigma must be > 0, got {sig}")
    if omega0 <= 0.0:
        raise NonPositiveOmega0(f"omega0 must be > 0, got {omega0}")
    w0sq = omega0 * omega0
    cut = truncation_tol * w0sq
    if abs(amp) <= cut:
        raise EmptySupport(
            f"|amplitude| = {abs(amp)} never exceeds truncation cut {cut}")
    # smallest T with |amp| * exp(-(T/sig)^2) = cut
    t_star = sig * math.sqrt(math.log(abs(amp) / cut))

    def omega_sq(t):
        t = np.asarray(t, dtype=float)
        return w0sq + amp * np.exp(-((t / sig) ** 2))

    def omega_sq_derivative(t):
        t = np.asarray(t, dtype=float)
        return amp * np.exp(-((t / sig) ** 2)) * (-2.0 * t / (sig * sig))

    return FrequencyProfile(
        omega0=omega0, t_i=-t_star, t_f=t_star,
        omega_sq=omega_sq, omega_sq_derivative=omega_sq_derivative,
        everywhere_positive=_positivity(omega_sq, -t_star, t_star, min(w0sq, w0sq + amp)),
        kind_tag="gaussian_bump", truncation_tol=truncation_tol,
        kernel_payload=("gauss", (w0sq, amp, sig)),
    )


def _sech2_profile(spec: ProfileSpec, truncation_tol: float) -> FrequencyProfile:
    omega0, amp, width = spec.omega0, spec.amplitude, spec.width
    _require(amp is not None and width is not None, "sech2 needs amplitude and width")
    _require(width > 0.0, f"width must be > 0, got {width}")
    if omega0 <= 0.0:
        raise NonPositiveOmega0(f"omega0 must be > 0, got {omega0}")
    w0sq = omega0 * omega0
    cut = truncation_tol * w0sq
    if abs(amp) <= cut:
        raise EmptySupport(
            f"|amplitude| = {abs(amp)} never exceeds truncation cut {cut}")
    # |amp| * sech^2(T/width) = cut  =>  cosh(T/width) = sqrt(|amp|/cut)
    t_star = width * math.acosh(math.sqrt(abs(amp) / cut))

    def omega_sq(t):
        t = np.asarray(t, dtype=float)
        return w0sq + amp / np.cosh(t / width) ** 2

    def omega_sq_derivative(t):
        t = np.asarray(t, dtype=float)
        u = t / width
        return -2.0 * amp * np.tanh(u) / (np.cosh(u) ** 2 * width)

    return FrequencyProfile(
        omega0=omega0, t_i=-t_star, t_f=t_star,
        omega_sq=omega_sq, omega_sq_derivative=omega_sq_derivative,
        everywhere_positive=_positivity(omega_sq, -t_star, t_star, min(w0sq, w0sq + amp)),
        kind_tag="sech2", truncation_tol=truncation_tol,
        kernel_payload=("sech2", (w0sq, amp, width)),
    )


def _interpolated_profile(kind: str, omega0: float, xs: np.ndarray, ws: np.ndarray,
                          analytic_min: Optional[float]) -> FrequencyProfile:
    if omega0 <= 0.0:
        raise NonPositiveOmega0(f"omega0 must be > 0, got {omega0}")
    if len(xs) < 4:
        raise TabulatedTooSparse(f"need at least 4 samples, got {len(xs)}")
    _require(bool(np.all(np.diff(xs) > 0.0)), "sample abscissae must be strictly increasing")
    w0sq = omega0 * omega0
    pch = PchipInterpolator(xs, ws)
    dpch = pch.derivative()
    lo, hi = float(xs[0]), float(xs[-1])

    def omega_sq(t):
        t = np.asarray(t, dtype=float)
        inside = (t >= lo) & (t <= hi)
        return np.where(inside, pch(np.clip(t, lo, hi)), w0sq)

    def omega_sq_derivative(t):
        t = np.asarray(t, dtype=float)
        inside = (t >= lo) & (t <= hi)
        return np.where(inside, dpch(np.clip(t, lo, hi)), 0.0)

    return FrequencyProfile(
        omega0=omega0, t_i=lo, t_f=hi,
        omega_sq=omega_sq, omega_sq_derivative=omega_sq_derivative,
        everywhere_positive=_positivity(omega_sq, lo, hi, analytic_min),
        kind_tag=kind, truncation_tol=0.0,
        kernel_payload=("ppoly", (np.ascontiguousarray(pch.x),
                                  np.ascontiguousarray(pch.c), w0sq, lo, hi)),
    )


def make_profile(spec: ProfileSpec, truncation_tol: float = 1e-8) -> FrequencyProfile:
    """Build a FrequencyProfile from a validated spec.

    For asymptotically constant families the support is the smallest
    symmetric interval outside which |omega^2 - omega0^2| < truncation_tol
    * omega0^2; compact families keep their exact support.
    """
    _check_truncation_tol(truncation_tol)
    kind = spec.kind
    if kind == "constant":
        return _piecewise_profile("constant", spec.omega0, spec.omega0 ** 2,
                                  spec.start or 0.0,
                                  spec.duration if spec.duration is not None else 1.0)
    if kind == "rectangular":
        _require(spec.omega1 is not None, "rectangular needs omega1")
        _require(spec.start is not None and spec.duration is not None,
                 "rectangular needs start and duration")
        return _piecewise_profile("rectangular", spec.omega0, spec.omega1 ** 2,
                                  spec.start, spec.duration)
    if kind == "hyperbolic_pulse":
        _require(spec.omega_sq_inside is not None, "hyperbolic_pulse needs omega_sq_inside")
        _require(spec.omega_sq_inside <= 0.0,
                 "hyperbolic_pulse expects omega_sq_inside <= 0 (else use rectangular)")
        _require(spec.start is not None and spec.duration is not None,
                 "hyperbolic_pulse needs start and duration")
        return _piecewise_profile("hyperbolic_pulse", spec.omega0, spec.omega_sq_inside,
                                  spec.start, spec.duration)
    if kind == "gaussian_bump":
        return _gaussian_profile(spec, truncation_tol)
    if kind == "sech2":
        return _sech2_profile(spec, truncation_tol)
    if kind == "tabulated":
        _require(spec.samples is not None, "tabulated needs samples")
        if len(spec.samples) < 4:
            raise TabulatedTooSparse(f"need at least 4 samples, got {len(spec.samples)}")
        xs = np.array([s[0] for s in spec.samples], dtype=float)
        ws = np.array([s[1] for s in spec.samples], dtype=float)
        return _interpolated_profile("tabulated", spec.omega0, xs, ws, None)
    if kind == "from_potential":
        _require(spec.samples is not None, "from_potential needs potential samples")
        return from_potential(spec.samples, spec.energy, spec.mass or 1.0,
                              spec.hbar or 1.0, truncation_tol)
    raise ValueError(f"unknown profile kind {kind!r}")


def from_potential(V_samples, E: float, m: float = 1.0, hbar: float = 1.0,
                   truncation_tol: float = 1e-8) -> FrequencyProfile:
    """Scattering profile k^2(x) = 2m(E - V(x))/hbar^2 from a tabulated potential.

    V is assumed to vanish outside the sampled window, so the asymptotic
    wavenumber is k0 = sqrt(2mE)/hbar. Raises NegativeAsymptoticK when
    E <= 0 (no propagating asymptotic states).
    """
    _check_truncation_tol(truncation_tol)
    if E is None or E <= 0.0:
        raise NegativeAsymptoticK(f"energy must be > 0, got {E}")
    _require(m > 0.0 and hbar > 0.0, "mass and hbar must be > 0")
    pairs = [(float(x), float(v)) for x, v in V_samples]
    if len(pairs) < 4:
        raise TabulatedTooSparse(f"need at least 4 samples, got {len(pairs)}")
    xs = np.array([p[0] for p in pairs])
    vs = np.array([p[1] for p in pairs])
    scale = 2.0 * m / (hbar * hbar)
    k0 = math.sqrt(2.0 * m * E) / hbar
    # pchip commutes with affine maps of the data, so interpolating the
    # transformed samples equals transforming the interpolated potential
    ks = scale * (E - vs)
    prof = _interpolated_profile("from_potential", k0, xs, ks, None)
    if E < float(np.max(vs)):
        # classically forbidden region is certain, whatever interpolation does
        object.__setattr__(prof, "everywhere_positive", False)
    return prof


def load_tabulated_file(path) -> tuple[tuple[float, float], ...]:
    """Parse a two-column whitespace-separated text file.

    Lines starting with '#' (and anything after an inline '#') are
    comments; blank lines are skipped. Units are the caller's concern.
    """
    rows: list[tuple[float, float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two columns, got {len(parts)}")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return tuple(rows)
