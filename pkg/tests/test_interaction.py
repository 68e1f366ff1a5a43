import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parabound.bogoliubov import extract
from parabound.errors import (
    MismatchedOmega0,
    MismatchedSupport,
    NegativeMagnitude,
    NotUnimodular,
    UnsupportedExactPart,
)
from parabound.interaction import (
    compose,
    compose_coefficients,
    composition_bounds,
    evolve_delta,
    exact_transfer,
    phase_stripped,
    split,
    split_transfer,
    PhaseStrippedPair,
)
from parabound.profiles import constant, gaussian_bump, hyperbolic_pulse, make_profile, rectangular
from parabound.propagator import SolverConfig, TransferMatrix, evolve


REL = 1e-9


def entrywise_close(x: TransferMatrix, y: TransferMatrix, budget: float):
    scale = max(1.0, y.max_norm())
    for a, b in zip((x.a, x.b, x.c, x.d), (y.a, y.b, y.c, y.d)):
        assert abs(a - b) <= budget * scale


class TestSplit:
    def test_self_split_has_zero_delta(self):
        prof = make_profile(rectangular(1.0, 2.0, 0.0, 1.0))
        sp = split(prof, rectangular(1.0, 2.0, 0.0, 1.0))
        ts = np.linspace(0.0, 1.0, 20)
        assert np.allclose(np.asarray(sp.delta_omega_sq(ts), dtype=float), 0.0)
        T_d = evolve_delta(sp)
        entrywise_close(T_d, TransferMatrix.identity(), 10 * REL)

    def test_rectangular_minus_constant(self):
        prof = make_profile(rectangular(1.0, 2.0, 0.0, 1.0))
        sp = split(prof, constant(1.0, 0.0, 1.0))
        assert float(sp.delta_omega_sq(0.5)) == pytest.approx(3.0)

    def test_gaussian_minus_constant(self):
        prof = make_profile(gaussian_bump(1.0, 3.0, 1.0))
        sp = split(prof, constant(1.0, prof.t_i, prof.span))
        for t in (-1.0, 0.0, 0.5):
            assert float(sp.delta_omega_sq(t)) == pytest.approx(
                3.0 * math.exp(-t * t), rel=1e-12)

    def test_support_and_omega0_must_match(self):
        prof = make_profile(rectangular(1.0, 2.0, 0.0, 1.0))
        with pytest.raises(MismatchedSupport):
            split(prof, constant(1.0, 0.0, 2.0))
        with pytest.raises(MismatchedOmega0):
            split(prof, constant(1.1, 0.0, 1.0))

    def test_smooth_exact_part_rejected(self):
        prof = make_profile(gaussian_bump(1.0, 3.0, 1.0))
        with pytest.raises(UnsupportedExactPart):
            split(prof, gaussian_bump(1.0, 3.0, 1.0))


class TestExactTransfer:
    def test_constant_part_is_rotation(self):
        T = exact_transfer(make_profile(constant(1.0, 0.0, 1.0)))
        assert T.a == pytest.approx(math.cos(1.0), abs=1e-14)
        assert T.b == pytest.approx(math.sin(1.0), abs=1e-14)

    def test_matches_adaptive_evolve(self):
        prof = make_profile(hyperbolic_pulse(1.0, -1.0, 0.0, 1.0))
        entrywise_close(exact_transfer(prof), evolve(prof), 10 * REL)


class TestReconstruction:
    @pytest.mark.parametrize("spec,oracle", [
        (rectangular(1.0, 2.0, 0.0, math.pi / 4),
         (0.0, 0.5, -2.0, 0.0)),
        (hyperbolic_pulse(1.0, -1.0, 0.0, 1.0),
         (math.cosh(1.0), math.sinh(1.0), math.sinh(1.0), math.cosh(1.0))),
    ])
    def test_piecewise_profiles_against_closed_form(self, spec, oracle):
        prof = make_profile(spec)
        sp = split(prof, constant(prof.omega0, prof.t_i, prof.span))
        T_e, T_d = split_transfer(sp)
        T_rec = compose(T_e, T_d)
        direct = evolve(prof)
        entrywise_close(T_rec, direct, 10 * REL)
        entrywise_close(T_rec, TransferMatrix(*oracle), 1e-7)

    def test_smooth_profile_reconstruction(self):
        prof = make_profile(gaussian_bump(1.0, 1.5, 0.8))
        cfg = SolverConfig(rel_tol=1e-8)
        sp = split(prof, constant(1.0, prof.t_i, prof.span))
        T_e, T_d = split_transfer(sp, cfg)
        entrywise_close(compose(T_e, T_d), evolve(prof, cfg), 100 * 1e-8)

    def test_delta_determinant_is_unit(self):
        prof = make_profile(gaussian_bump(1.0, 1.5, 0.8))
        sp = split(prof, constant(1.0, prof.t_i, prof.span))
        T_d = evolve_delta(sp)
        assert T_d.det_drift() <= 1e-7


class TestCompose:
    def test_identity(self):
        X = TransferMatrix(1.2, 0.3, 0.5, (1 + 0.15) / 1.2)
        out = compose(TransferMatrix.identity(), X)
        assert (out.a, out.b, out.c, out.d) == (X.a, X.b, X.c, X.d)

    def test_rotations_add(self):
        def rot(t):
            return TransferMatrix(math.cos(t), math.sin(t),
                                  -math.sin(t), math.cos(t))

        out = compose(rot(0.4), rot(0.9))
        expected = rot(1.3)
        entrywise_close(out, expected, 1e-14)

    def test_rejects_non_unimodular(self):
        with pytest.raises(NotUnimodular):
            compose(TransferMatrix(2.0, 0.0, 0.0, 1.0), TransferMatrix.identity())


class TestComposeCoefficients:
    def test_transparent_exact_part(self):
        e = PhaseStrippedPair(1.0 + 0j, 0.0 + 0j)
        d = PhaseStrippedPair(cmath.cosh(0.7), 1j * cmath.sinh(0.7))
        out = compose_coefficients(e, d)
        assert out.alpha_tilde == pytest.approx(d.alpha_tilde)
        assert out.beta_tilde == pytest.approx(d.beta_tilde)

    def test_transparent_delta_part(self):
        e = PhaseStrippedPair(cmath.cosh(0.5) * cmath.exp(0.3j),
                              cmath.sinh(0.5) * cmath.exp(-1.1j))
        d = PhaseStrippedPair(1.0 + 0j, 0.0 + 0j)
        out = compose_coefficients(e, d)
        assert out.beta_tilde == pytest.approx(e.beta_tilde)

    def test_matches_direct_extraction_on_split(self):
        prof = make_profile(rectangular(1.0, 2.0, 0.0, math.pi / 4))
        sp = split(prof, constant(1.0, 0.0, math.pi / 4))
        T_e, T_d = split_transfer(sp)
        composed = compose_coefficients(phase_stripped(T_e), phase_stripped(T_d))
        direct = extract(evolve(prof), 1.0, 0.0, math.pi / 4)
        assert abs(composed.beta_tilde) == pytest.approx(
            math.sqrt(direct.beta_sq), abs=10 * REL)
        assert abs(composed.alpha_tilde) == pytest.approx(
            math.sqrt(direct.alpha_sq), abs=10 * REL)

    @given(st.floats(0.0, 1.5), st.floats(-math.pi, math.pi),
           st.floats(0.0, 1.5), st.floats(-math.pi, math.pi),
           st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi))
    @settings(max_examples=200, deadline=None)
    def test_normalization_closure(self, r1, p1, r2, p2, q1, q2):
        e = PhaseStrippedPair(math.cosh(r1) * cmath.exp(1j * p1),
                              math.sinh(r1) * cmath.exp(1j * q1))
        d = PhaseStrippedPair(math.cosh(r2) * cmath.exp(1j * p2),
                              math.sinh(r2) * cmath.exp(1j * q2))
        out = compose_coefficients(e, d)
        residual = abs(out.alpha_tilde) ** 2 - abs(out.beta_tilde) ** 2 - 1.0
        assert abs(residual) <= 1e-8

    def test_rule_matches_matrix_product(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            a, b, c = rng.uniform(-2, 2, size=3)
            a = a if abs(a) > 0.2 else a + 0.5
            Te = TransferMatrix(a, b, c, (1 + b * c) / a)
            a2, b2, c2 = rng.uniform(-2, 2, size=3)
            a2 = a2 if abs(a2) > 0.2 else a2 + 0.5
            Td = TransferMatrix(a2, b2, c2, (1 + b2 * c2) / a2)
            composed = compose_coefficients(phase_stripped(Te), phase_stripped(Td))
            direct = phase_stripped(Te @ Td)
            assert composed.alpha_tilde == pytest.approx(direct.alpha_tilde,
                                                         rel=1e-10, abs=1e-10)
            assert composed.beta_tilde == pytest.approx(direct.beta_tilde,
                                                        rel=1e-10, abs=1e-10)


class TestCompositionBounds:
    def test_zero_exact_beta_collapses(self):
        lo, up = composition_bounds(0.0, 0.8)
        assert lo == pytest.approx(0.8)
        assert up == pytest.approx(0.8)

    def test_symmetric_cancellation(self):
        s = 0.9
        lo, up = composition_bounds(s, s)
        assert lo == pytest.approx(0.0, abs=1e-15)
        assert up == pytest.approx(2.0 * s * math.sqrt(1.0 + s * s), rel=1e-14)

    @given(st.floats(0.0, 5.0), st.floats(0.0, 5.0))
    @settings(max_examples=200, deadline=None)
    def test_ordering(self, be, bd):
        lo, up = composition_bounds(be, bd)
        assert 0.0 <= lo <= up

    def test_negative_rejected(self):
        with pytest.raises(NegativeMagnitude):
            composition_bounds(-0.1, 0.5)

    def test_sandwich_on_split(self):
        prof = make_profile(hyperbolic_pulse(1.0, -1.0, 0.0, 1.0))
        sp = split(prof, constant(1.0, 0.0, 1.0))
        T_e, T_d = split_transfer(sp)
        beta_full = math.sqrt(extract(evolve(prof), 1.0, 0.0, 1.0).beta_sq)
        lo, up = composition_bounds(phase_stripped(T_e).beta_mag,
                                    phase_stripped(T_d).beta_mag)
        eps = 100 * REL * (1.0 + up)
        assert lo - eps <= beta_full <= up + eps


def test_conjugated_generator_is_traceless():
    prof = make_profile(gaussian_bump(1.0, 1.5, 0.8))
    sp = split(prof, constant(1.0, prof.t_i, prof.span))
    from parabound.interaction import _ExactEvolution

    exact = _ExactEvolution(sp.exact_part)
    for t in np.linspace(prof.t_i, prof.t_f, 11):
        a, b, _c, _d = exact.at(float(t))
        q = -float(sp.delta_omega_sq(float(t)))
        g11 = -a * b * q
        g22 = a * b * q
        assert g11 + g22 == 0.0
