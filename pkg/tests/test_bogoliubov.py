import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parabound.bogoliubov import (
    alpha_sq_from_transfer,
    beta_sq_from_transfer,
    extract,
    normalization_residual,
    scattering,
)
from parabound.errors import NotUnimodular
from parabound.propagator import TransferMatrix, evolve


def test_identity_no_evolution():
    co = extract(TransferMatrix.identity(), 1.0, 0.0, 0.0)
    assert co.alpha == pytest.approx(1.0 + 0.0j)
    assert co.beta == pytest.approx(0.0 + 0.0j)
    assert normalization_residual(co) == pytest.approx(0.0, abs=1e-15)


def test_rectangular_pulse_values():
    T = TransferMatrix(0.0, 0.5, -2.0, 0.0)
    co = extract(T, 1.0, 0.0, math.pi / 4)
    # |beta|^2 = ((a-d)^2 + (b+c)^2)/4 = (0 + 2.25)/4
    assert co.beta_sq == pytest.approx(0.5625, abs=1e-14)
    assert co.alpha_sq == pytest.approx(1.5625, abs=1e-14)
    sc = scattering(co)
    assert sc.transmission == pytest.approx(0.64, abs=1e-14)
    assert sc.reflection == pytest.approx(0.36, abs=1e-14)


def test_hyperbolic_pulse_values():
    T = TransferMatrix(math.cosh(1.0), math.sinh(1.0),
                       math.sinh(1.0), math.cosh(1.0))
    co = extract(T, 1.0, 0.0, 1.0)
    assert co.beta_sq == pytest.approx(math.sinh(1.0) ** 2, rel=1e-14)
    assert co.alpha_sq == pytest.approx(math.cosh(1.0) ** 2, rel=1e-14)
    sc = scattering(co)
    assert sc.transmission == pytest.approx(1.0 / math.cosh(1.0) ** 2, rel=1e-12)
    assert sc.reflection == pytest.approx(math.tanh(1.0) ** 2, rel=1e-12)


coeff = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


@given(coeff, coeff, coeff)
@settings(max_examples=300, deadline=None)
def test_route_agreement_on_random_unimodular(a, b, c):
    if abs(a) < 0.1:
        a = a + 0.5
    d = (1.0 + b * c) / a
    if abs(d) > 1e6:
        return
    T = TransferMatrix(a, b, c, d)
    direct_alpha = 0.5 * math.hypot(a + d, b - c)
    assert direct_alpha ** 2 == pytest.approx(alpha_sq_from_transfer(T),
                                              rel=1e-11, abs=1e-11)
    co = extract(T, 1.3, -0.2, 0.9)
    assert co.beta_sq == pytest.approx(beta_sq_from_transfer(T),
                                       rel=1e-11, abs=1e-11)
    assert abs(normalization_residual(co)) <= 1e-8


def test_normalization_across_library(library):
    for prof in library.values():
        T = evolve(prof)
        co = extract(T, prof.omega0, prof.t_i, prof.t_f)
        assert abs(normalization_residual(co)) <= 1e-8
        assert abs(co.alpha) >= 1.0 - 1e-12


def test_phase_covariance_under_time_shift():
    T = TransferMatrix(0.0, 0.5, -2.0, 0.0)
    omega0 = 1.0
    base = extract(T, omega0, 0.0, math.pi / 4)
    s = 0.77
    shifted = extract(T, omega0, s, math.pi / 4 + s)
    assert abs(shifted.alpha) == pytest.approx(abs(base.alpha), rel=1e-14)
    assert abs(shifted.beta) == pytest.approx(abs(base.beta), rel=1e-14)
    # alpha picks up no phase; beta rotates by exp(-2 i omega0 s)
    assert shifted.alpha == pytest.approx(base.alpha, rel=1e-12)
    expected_beta = base.beta * cmath.exp(-2j * omega0 * s)
    assert shifted.beta == pytest.approx(expected_beta, rel=1e-12)


def test_phase_stripped_matches_entries():
    T = TransferMatrix(0.0, 0.5, -2.0, 0.0)
    co = extract(T, 1.0, 0.3, 1.1)
    al, be = co.phase_stripped()
    assert al == pytest.approx(0.5 * complex(T.a + T.d, T.b - T.c), rel=1e-12)
    assert be == pytest.approx(0.5 * complex(T.a - T.d, T.b + T.c), rel=1e-12)


def test_not_unimodular_rejected():
    with pytest.raises(NotUnimodular):
        extract(TransferMatrix(1.1, 0.0, 0.0, 1.0), 1.0, 0.0, 1.0)


def test_scattering_requires_normalization():
    from parabound.bogoliubov import BogoliubovCoefficients

    bad = BogoliubovCoefficients(2.0 + 0j, 0.0 + 0j, 1.0, 0.0, 1.0)
    with pytest.raises(ValueError, match="not normalized"):
        scattering(bad)


def test_scattering_sum_is_exactly_one(library):
    for prof in library.values():
        co = extract(evolve(prof), prof.omega0, prof.t_i, prof.t_f)
        sc = scattering(co)
        assert sc.transmission + sc.reflection == 1.0
