"""Bogoliubov coefficients and scattering coefficients from a transfer matrix.

The transfer matrix is real everywhere else in the package; complex
arithmetic is confined to this module. With plane-wave boundary data
exp(+i omega0 t) before t_i, the outgoing mixture after t_f is
alpha * exp(+i omega0 t) + beta * exp(-i omega0 t) with

    alpha = (1/2) [a + d + i(b - c)] e^{-i omega0 (t_f - t_i)}
    beta  = (1/2) [a - d + i(b + c)] e^{-i omega0 (t_f + t_i)}

and |alpha|^2 - |beta|^2 = det T = 1.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import NotUnimodular
from .propagator import TransferMatrix

_DET_TOL = 1e-6
_ROUTE_TOL = 1e-12


@dataclass(frozen=True)
class BogoliubovCoefficients:
    """alpha, beta plus the phase reference data they were extracted with."""

    alpha: complex
    beta: complex
    omega0: float
    t_i: float
    t_f: float

    @property
    def alpha_sq(self) -> float:
        return abs(self.alpha) ** 2

    @property
    def beta_sq(self) -> float:
        return abs(self.beta) ** 2

    def phase_stripped(self) -> tuple[complex, complex]:
        """(alpha~, beta~): the coefficients with the endpoint phases undone."""
        return (
            self.alpha * cmath.exp(1j * self.omega0 * (self.t_f - self.t_i)),
            self.beta * cmath.exp(1j * self.omega0 * (self.t_f + self.t_i)),
        )


@dataclass(frozen=True)
class ScatteringCoefficients:
    """Space-domain equivalents: transmission = 1/|alpha|^2, reflection = |beta|^2/|alpha|^2."""

    transmission: float
    reflection: float

    def __post_init__(self):
        if not (0.0 < self.transmission <= 1.0):
            raise ValueError(f"transmission {self.transmission} outside (0, 1]")
        if not (0.0 <= self.reflection < 1.0):
            raise ValueError(f"reflection {self.reflection} outside [0, 1)")
        if abs(self.transmission + self.reflection - 1.0) > 1e-10:
            raise ValueError("transmission + reflection must equal 1")


def alpha_sq_from_transfer(T: TransferMatrix) -> float:
    """|alpha|^2 = (1/4) tr(T T^t + I); trace route, no complex arithmetic."""
    q = T.a * T.a + T.b * T.b + T.c * T.c + T.d * T.d
    return 0.25 * (q + 2.0)


def beta_sq_from_transfer(T: TransferMatrix) -> float:
    """|beta|^2 = (1/4) tr(T T^t - I)."""
    q = T.a * T.a + T.b * T.b + T.c * T.c + T.d * T.d
    return 0.25 * (q - 2.0)


def extract(T: TransferMatrix, omega0: float, t_i: float, t_f: float) -> BogoliubovCoefficients:
    """Bogoliubov coefficients of a unimodular transfer matrix.

    Raises NotUnimodular when |det T - 1| > 1e-6. The direct (complex) and
    trace routes to |alpha|^2, |beta|^2 are cross-checked to 1e-12.
    """
    drift = T.det_drift()
    if drift > _DET_TOL:
        raise NotUnimodular(f"|det T - 1| = {drift:.3e} exceeds {_DET_TOL}")
    alpha = 0.5 * complex(T.a + T.d, T.b - T.c) * cmath.exp(-1j * omega0 * (t_f - t_i))
    beta = 0.5 * complex(T.a - T.d, T.b + T.c) * cmath.exp(-1j * omega0 * (t_f + t_i))
    coeffs = BogoliubovCoefficients(alpha, beta, omega0, t_i, t_f)
    # the routes differ by exactly (det T - 1)/2; anything beyond that is a bug
    half_defect = 0.5 * (T.det() - 1.0)
    scale = max(1.0, coeffs.alpha_sq)
    assert abs(coeffs.alpha_sq - alpha_sq_from_transfer(T) - half_defect) \
        <= _ROUTE_TOL * scale, "direct and trace routes to |alpha|^2 disagree"
    assert abs(coeffs.beta_sq - beta_sq_from_transfer(T) + half_defect) \
        <= _ROUTE_TOL * scale, "direct and trace routes to |beta|^2 disagree"
    return coeffs


def normalization_residual(coeffs: BogoliubovCoefficients) -> float:
    """|alpha|^2 - |beta|^2 - 1; zero for an exactly unimodular T."""
    return coeffs.alpha_sq - coeffs.beta_sq - 1.0


def scattering(coeffs: BogoliubovCoefficients) -> ScatteringCoefficients:
    """Transmission/reflection pair; the two sum to 1 by construction."""
    residual = normalization_residual(coeffs)
    if abs(residual) > 1e-8:
        raise ValueError(f"coefficients not normalized: residual {residual:.3e}")
    transmission = 1.0 / coeffs.alpha_sq
    return ScatteringCoefficients(transmission, 1.0 - transmission)
