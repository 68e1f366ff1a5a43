import math

import numpy as np
import pytest

from parabound.errors import QuadratureNotConverged
from parabound.quadrature import QuadConfig, adaptive_quadrature, sign_change_roots


def test_polynomial_exact():
    # a single Kronrod panel integrates low-degree polynomials exactly
    for k in range(0, 8):
        val, err = adaptive_quadrature(lambda t, k=k: t ** k, 0.0, 1.0)
        assert val == pytest.approx(1.0 / (k + 1), abs=1e-14)


def test_gaussian_against_erf():
    val, err = adaptive_quadrature(lambda t: np.exp(-t * t), -2.0, 3.0)
    exact = 0.5 * math.sqrt(math.pi) * (math.erf(3.0) + math.erf(2.0))
    assert abs(val - exact) <= max(err, 1e-13)


def test_kinked_integrand_with_breakpoint():
    # integral of |t| over [-1, 2] is 2.5 exactly
    val, err = adaptive_quadrature(np.abs, -1.0, 2.0, breakpoints=[0.0])
    assert val == pytest.approx(2.5, abs=1e-13)
    assert err < 1e-12


def test_kinked_integrand_without_breakpoint_still_converges():
    val, _ = adaptive_quadrature(np.abs, -1.0, 2.0,
                                 QuadConfig(max_subdivisions=10000))
    assert val == pytest.approx(2.5, abs=1e-9)


def test_error_estimate_is_honest():
    cases = [
        (lambda t: np.sin(7.0 * t), 0.0, 2.0, (1.0 - math.cos(14.0)) / 7.0),
        (lambda t: 1.0 / (1.0 + t * t), -1.0, 1.0, math.pi / 2.0),
    ]
    for f, a, b, exact in cases:
        val, err = adaptive_quadrature(f, a, b)
        assert abs(val - exact) <= max(err, 1e-13)


def test_empty_interval():
    assert adaptive_quadrature(np.cos, 1.5, 1.5) == (0.0, 0.0)


def test_subdivision_budget_exhausted():
    cfg = QuadConfig(abs_tol=1e-10, rel_tol=1e-10, max_subdivisions=2)
    with pytest.raises(QuadratureNotConverged):
        adaptive_quadrature(lambda t: np.sin(200.0 * t) ** 2, 0.0, 10.0, cfg)


def test_sign_change_roots_finds_all_sine_zeros():
    roots = sign_change_roots(np.sin, 0.5, 9.0)
    expected = [math.pi, 2 * math.pi]
    assert len(roots) == 2
    for r, e in zip(roots, expected):
        assert r == pytest.approx(e, rel=1e-11)


def test_sign_change_roots_exact_grid_zero():
    roots = sign_change_roots(lambda t: np.asarray(t) - 0.5, 0.0, 1.0, n_scan=2)
    assert roots == [0.5]


def test_quad_config_validation():
    with pytest.raises(ValueError):
        QuadConfig(abs_tol=0.0)
    with pytest.raises(ValueError):
        QuadConfig(rel_tol=0.5)
    with pytest.raises(ValueError):
        QuadConfig(max_subdivisions=0)
