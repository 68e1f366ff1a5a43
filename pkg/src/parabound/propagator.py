"""Transfer-matrix propagation by adaptive time-ordered exponentiation.

The solution of phi'' + omega^2(t) phi = 0 is carried by a real 2x2
unit-determinant matrix T acting on the scaled state (phi, pi/omega0).
T is built as a left-ordered product of exact exponentials of the
generator frozen at step midpoints; late times always multiply from the
left. Evolution can run in the plain frame or in the frame of a probe
function Omega(t), which reuses the same stepping machinery with the
generator [[th'/2, Omega], [-omega^2/Omega, -th'/2]], th = ln(Omega/omega0).

The hot stepping loop lives in a compiled extension when available
(parabound._kernel_c); a pure-Python twin is selected at import otherwise
or when PARABOUND_PURE_PYTHON=1 is set.
"""
from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass
from typing import Optional, TYPE_CHECKING

import numpy as np

from . import _kernel_py
from .errors import (
    DeterminantDriftWarning,
    InadmissibleProbe,
    NonFiniteGenerator,
)
from .profiles import FrequencyProfile

if TYPE_CHECKING:
    from .probes import ProbeFunction

try:
    from . import _kernel_c
except ImportError:  # pragma: no cover - build without the extension
    _kernel_c = None

_FORCE_PURE = os.environ.get("PARABOUND_PURE_PYTHON", "").lower() in {"1", "true", "yes"}
_DEFAULT_KERNEL = _kernel_py if (_kernel_c is None or _FORCE_PURE) else _kernel_c

_BACKENDS = {"python": _kernel_py}
if _kernel_c is not None:
    _BACKENDS["compiled"] = _kernel_c


def kernel_backend() -> str:
    """Name of the stepping backend selected at import."""
    return "compiled" if _DEFAULT_KERNEL is _kernel_c else "python"


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def _kernel(backend: Optional[str]):
    if backend is None:
        return _DEFAULT_KERNEL
    try:
        return _BACKENDS[backend]
    except KeyError:
        raise ValueError(
            f"unknown backend {backend!r}; available: {available_backends()}"
        ) from None


@dataclass(frozen=True)
class TransferMatrix:
    """Real 2x2 matrix with unit determinant carrying the exact solution."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"non-finite transfer-matrix entry {name}")

    @classmethod
    def identity(cls) -> "TransferMatrix":
        return cls(1.0, 0.0, 0.0, 1.0)

    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def det_drift(self) -> float:
        return abs(self.det() - 1.0)

    def trace(self) -> float:
        return self.a + self.d

    def max_norm(self) -> float:
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))

    def transpose(self) -> "TransferMatrix":
        return TransferMatrix(self.a, self.c, self.b, self.d)

    def inverse_unimodular(self) -> "TransferMatrix":
        """Adjugate inverse, exact up to rounding for det = 1."""
        return TransferMatrix(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def apply(self, state: "StateVector") -> "StateVector":
        return StateVector(
            self.a * state.phi + self.b * state.pi_scaled,
            self.c * state.phi + self.d * state.pi_scaled,
        )

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])


@dataclass(frozen=True)
class StateVector:
    """Scaled state (phi, pi/omega0); both components share one dimension."""

    phi: float
    pi_scaled: float

    def __post_init__(self):
        if not (math.isfinite(self.phi) and math.isfinite(self.pi_scaled)):
            raise ValueError("non-finite state component")


@dataclass(frozen=True)
class SolverConfig:
    """Adaptive-integrator settings.

    rel_tol/abs_tol control the error accumulated per unit time, so the
    final matrix tracks roughly rel_tol in a relative sense. initial_step
    of None picks span/256.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    initial_step: Optional[float] = None
    max_steps: int = 10_000_000
    record_trajectory: bool = False

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol"):
            v = getattr(self, name)
            if not (0.0 < v <= 1e-2):
                raise ValueError(f"{name} must lie in (0, 1e-2], got {v}")
        if self.max_steps < 16:
            raise ValueError(f"max_steps must be >= 16, got {self.max_steps}")
        if self.initial_step is not None and not self.initial_step > 0.0:
            raise ValueError("initial_step must be positive when given")


def step_exponential(g11: float, g12: float, g21: float, dt: float) -> TransferMatrix:
    """Closed-form exp(G*dt) for the traceless generator [[g11,g12],[g21,-g11]]."""
    for v in (g11, g12, g21, dt):
        if not math.isfinite(v):
            raise NonFiniteGenerator(f"non-finite generator input {v!r}")
    return TransferMatrix(*_DEFAULT_KERNEL.step_matrix(g11, g12, g21, dt))


def _omega_object(kern, profile: FrequencyProfile):
    payload = profile.kernel_payload
    if payload is None:
        fn = profile.omega_sq
        return kern.make_omega_callback(lambda t: float(fn(t)))
    tag, args = payload
    if tag == "const":
        return kern.make_omega_const(*args)
    if tag == "piecewise":
        return kern.make_omega_piecewise(*args)
    if tag == "gauss":
        return kern.make_omega_gauss(*args)
    if tag == "sech2":
        return kern.make_omega_sech2(*args)
    if tag == "ppoly":
        return kern.make_omega_ppoly(*args)
    raise ValueError(f"unknown kernel payload {tag!r}")


def _check_frame(profile: FrequencyProfile, frame: "ProbeFunction") -> None:
    span = profile.span
    if (abs(frame.t_i - profile.t_i) > 1e-9 * span
            or abs(frame.t_f - profile.t_f) > 1e-9 * span):
        raise InadmissibleProbe(
            f"probe support [{frame.t_i}, {frame.t_f}] does not match "
            f"profile support [{profile.t_i}, {profile.t_f}]")
    if abs(frame.omega0 - profile.omega0) > 1e-12 * profile.omega0:
        raise InadmissibleProbe(
            f"probe omega0 {frame.omega0} does not match profile omega0 {profile.omega0}")


def _generator(kern, profile: FrequencyProfile, frame: Optional["ProbeFunction"]):
    om = _omega_object(kern, profile)
    if frame is None:
        return kern.make_plain_generator(om, profile.omega0)
    _check_frame(profile, frame)
    xs, cs = frame.ppoly_arrays()
    if xs is not None:
        return kern.make_probe_generator(om, profile.omega0, xs, cs)
    # analytic theta: generic triple callback
    omega0 = profile.omega0
    omega_sq = profile.omega_sq

    def triple(t):
        th = float(frame.theta(t))
        dth = float(frame.theta_dot(t))
        big = omega0 * math.exp(th)
        return (0.5 * dth, big, -float(omega_sq(t)) / big)

    return kern.make_callback_generator(triple)


def _raw_to_matrix(raw) -> tuple[TransferMatrix, list]:
    a, b, c, d, _accepted, _attempts, traj = raw
    return TransferMatrix(a, b, c, d), traj


def _finalize(T: TransferMatrix, traj, rel_tol: float, record: bool):
    drift = T.det_drift()
    if drift > 100.0 * rel_tol:
        warnings.warn(
            f"determinant drift {drift:.3e} exceeds 100*rel_tol = {100 * rel_tol:.3e}",
            DeterminantDriftWarning,
            stacklevel=3,
        )
    if record:
        trajectory = [(t, TransferMatrix(a, b, c, d)) for t, a, b, c, d in traj]
        return T, trajectory
    return T


def evolve(
    profile: FrequencyProfile,
    config: Optional[SolverConfig] = None,
    frame: Optional["ProbeFunction"] = None,
    *,
    backend: Optional[str] = None,
):
    """Transfer matrix over the profile support [t_i, t_f].

    Returns the TransferMatrix, or (TransferMatrix, [(t, TransferMatrix)])
    when config.record_trajectory is set. A determinant drift beyond
    100*rel_tol raises DeterminantDriftWarning but still returns the result.
    """
    cfg = config or SolverConfig()
    kern = _kernel(backend)
    gen = _generator(kern, profile, frame)
    h0 = cfg.initial_step if cfg.initial_step is not None else profile.span / 256.0
    raw = kern.evolve_adaptive(
        gen, profile.t_i, profile.t_f, cfg.rel_tol, cfg.abs_tol, h0,
        cfg.max_steps, profile.interior_discontinuities(), cfg.record_trajectory,
    )
    T, traj = _raw_to_matrix(raw)
    return _finalize(T, traj, cfg.rel_tol, cfg.record_trajectory)


def evolve_fixed(
    profile: FrequencyProfile,
    n_steps: int,
    frame: Optional["ProbeFunction"] = None,
    *,
    backend: Optional[str] = None,
    record_trajectory: bool = False,
):
    """Fixed uniform steps; used for convergence-order studies."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    kern = _kernel(backend)
    gen = _generator(kern, profile, frame)
    raw = kern.evolve_fixed(gen, profile.t_i, profile.t_f, n_steps, record_trajectory)
    T, traj = _raw_to_matrix(raw)
    if record_trajectory:
        return T, [(t, TransferMatrix(a, b, c, d)) for t, a, b, c, d in traj]
    return T


def evolve_state(
    initial: StateVector,
    profile: FrequencyProfile,
    config: Optional[SolverConfig] = None,
    frame: Optional["ProbeFunction"] = None,
) -> StateVector:
    """Propagate a scaled state (phi, pi/omega0) across the support."""
    cfg = config or SolverConfig()
    if cfg.record_trajectory:
        T, _ = evolve(profile, cfg, frame)
    else:
        T = evolve(profile, cfg, frame)
    return T.apply(initial)


def write_trajectory_csv(path, trajectory) -> None:
    """Dump a recorded trajectory as CSV: t,a,b,c,d,det_drift."""
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "a", "b", "c", "d", "det_drift"])
        for t, T in trajectory:
            writer.writerow([
                format(t, ".17g"), format(T.a, ".17g"), format(T.b, ".17g"),
                format(T.c, ".17g"), format(T.d, ".17g"),
                format(T.det_drift(), ".17g"),
            ])
