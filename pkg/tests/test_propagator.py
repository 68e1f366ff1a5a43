import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from parabound.errors import (
    DeterminantDriftWarning,
    NonFiniteGenerator,
    StepLimitExceeded,
)
from parabound.profiles import constant, gaussian_bump, hyperbolic_pulse, make_profile, rectangular
from parabound.probes import ProbeFunction
from parabound.propagator import (
    SolverConfig,
    StateVector,
    TransferMatrix,
    available_backends,
    evolve,
    evolve_fixed,
    evolve_state,
    step_exponential,
)
from parabound.bogoliubov import extract


def series_expm(G, dt, terms=60):
    """Matrix-exponential oracle: plain Taylor series summation."""
    A = np.asarray(G, dtype=float) * dt
    out = np.eye(2)
    term = np.eye(2)
    for k in range(1, terms):
        term = term @ A / k
        out = out + term
    return out


finite = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


class TestStepExponential:
    def test_rotation(self):
        tau = 0.7
        T = step_exponential(0.0, 1.0, -1.0, tau)
        assert T.a == pytest.approx(math.cos(tau), abs=1e-15)
        assert T.b == pytest.approx(math.sin(tau), abs=1e-15)
        assert T.c == pytest.approx(-math.sin(tau), abs=1e-15)

    def test_hyperbolic_against_series_oracle(self):
        T = step_exponential(0.0, 1.0, 1.0, 1.0)
        oracle = series_expm([[0.0, 1.0], [1.0, 0.0]], 1.0)
        assert T.a == pytest.approx(oracle[0, 0], rel=1e-14)
        assert T.b == pytest.approx(oracle[0, 1], rel=1e-14)
        # frozen independently computed values
        assert T.a == pytest.approx(1.5430806348152437, abs=1e-13)
        assert T.b == pytest.approx(1.1752011936438014, abs=1e-13)

    def test_zero_interval_is_identity(self):
        T = step_exponential(0.3, 1.2, -0.8, 0.0)
        assert (T.a, T.b, T.c, T.d) == (1.0, 0.0, 0.0, 1.0)

    @given(finite, finite, finite, st.floats(min_value=-2.0, max_value=2.0,
                                             allow_nan=False))
    @settings(max_examples=300, deadline=None)
    def test_unit_determinant_and_series_agreement(self, g11, g12, g21, dt):
        T = step_exponential(g11, g12, g21, dt)
        assert T.det() == pytest.approx(1.0, abs=5e-14)
        oracle = series_expm([[g11, g12], [g21, -g11]], dt)
        scale = max(1.0, np.max(np.abs(oracle)))
        assert abs(T.a - oracle[0, 0]) <= 1e-12 * scale
        assert abs(T.b - oracle[0, 1]) <= 1e-12 * scale
        assert abs(T.c - oracle[1, 0]) <= 1e-12 * scale
        assert abs(T.d - oracle[1, 1]) <= 1e-12 * scale

    def test_nonfinite_rejected(self):
        with pytest.raises(NonFiniteGenerator):
            step_exponential(math.nan, 1.0, 1.0, 0.1)
        with pytest.raises(NonFiniteGenerator):
            step_exponential(0.0, 1.0, 1.0, math.inf)


class TestTransferMatrix:
    def test_determinant_and_inverse(self):
        T = TransferMatrix(2.0, 3.0, 1.0, 2.0)
        assert T.det() == 1.0
        inv = T.inverse_unimodular()
        prod = T @ inv
        assert (prod.a, prod.d) == (1.0, 1.0)
        assert (prod.b, prod.c) == (0.0, 0.0)

    def test_nonfinite_entry_rejected(self):
        with pytest.raises(ValueError):
            TransferMatrix(math.inf, 0.0, 0.0, 1.0)


class TestEvolve:
    def test_constant_profile_rotation(self):
        tau = 2.0
        prof = make_profile(constant(1.0, 0.0, tau))
        T = evolve(prof)
        assert T.a == pytest.approx(math.cos(tau), abs=1e-12)
        assert T.b == pytest.approx(math.sin(tau), abs=1e-12)

    def test_rectangular_closed_form(self):
        prof = make_profile(rectangular(1.0, 2.0, 0.0, math.pi / 4))
        T = evolve(prof)
        oracle = expm(np.array([[0.0, 1.0], [-4.0, 0.0]]) * math.pi / 4)
        assert T.a == pytest.approx(oracle[0, 0], abs=1e-12)
        assert T.b == pytest.approx(oracle[0, 1], abs=1e-12)
        assert T.c == pytest.approx(oracle[1, 0], abs=1e-12)
        assert T.d == pytest.approx(oracle[1, 1], abs=1e-12)
        # frozen closed-form values
        assert T.b == pytest.approx(0.5, abs=1e-12)
        assert T.c == pytest.approx(-2.0, abs=1e-12)

    def test_hyperbolic_closed_form(self):
        prof = make_profile(hyperbolic_pulse(1.0, -1.0, 0.0, 1.0))
        T = evolve(prof)
        assert T.a == pytest.approx(math.cosh(1.0), abs=1e-12)
        assert T.b == pytest.approx(math.sinh(1.0), abs=1e-12)

    def test_group_property(self, library):
        prof = library["gaussian"]
        cfg = SolverConfig(rel_tol=1e-9)
        t_mid = 0.5 * (prof.t_i + prof.t_f) + 0.37
        left = make_profile(gaussian_bump(1.0, 3.0, 1.0))
        # evolve the two halves via tabulated sub-profiles of the same shape
        from parabound.profiles import FrequencyProfile

        first = FrequencyProfile(
            omega0=prof.omega0, t_i=prof.t_i, t_f=t_mid,
            omega_sq=prof.omega_sq, omega_sq_derivative=prof.omega_sq_derivative,
            everywhere_positive=prof.everywhere_positive, kind_tag="window",
        )
        second = FrequencyProfile(
            omega0=prof.omega0, t_i=t_mid, t_f=prof.t_f,
            omega_sq=prof.omega_sq, omega_sq_derivative=prof.omega_sq_derivative,
            everywhere_positive=prof.everywhere_positive, kind_tag="window",
        )
        whole = evolve(prof, cfg)
        parts = evolve(second, cfg) @ evolve(first, cfg)
        scale = max(1.0, whole.max_norm())
        for x, y in zip((whole.a, whole.b, whole.c, whole.d),
                        (parts.a, parts.b, parts.c, parts.d)):
            assert abs(x - y) <= 10 * cfg.rel_tol * scale

    def test_det_preservation_across_library(self, library):
        for rel_tol in (1e-6, 1e-9):
            cfg = SolverConfig(rel_tol=rel_tol)
            for prof in library.values():
                T = evolve(prof, cfg)
                assert T.det_drift() <= 100 * rel_tol

    def test_step_limit(self):
        prof = make_profile(gaussian_bump(1.0, 3.0, 1.0))
        with pytest.raises(StepLimitExceeded):
            evolve(prof, SolverConfig(rel_tol=1e-11, max_steps=16))

    def test_trajectory_recording(self):
        prof = make_profile(rectangular(1.0, 2.0, 0.0, 1.0))
        T, traj = evolve(prof, SolverConfig(record_trajectory=True))
        ts = [t for t, _ in traj]
        assert ts[0] == prof.t_i
        assert ts[-1] == prof.t_f
        assert all(t1 > t0 for t0, t1 in zip(ts, ts[1:]))
        last = traj[-1][1]
        assert (last.a, last.b, last.c, last.d) == (T.a, T.b, T.c, T.d)

    def test_no_drift_warning_on_library(self, library):
        with warnings.catch_warnings():
            warnings.simplefilter("error", DeterminantDriftWarning)
            for prof in library.values():
                evolve(prof)

    def test_drift_warning_fires(self):
        # exercise the quality flag via the internal finalizer
        from parabound.propagator import _finalize

        bad = TransferMatrix(1.0 + 1e-3, 0.0, 0.0, 1.0)
        with pytest.warns(DeterminantDriftWarning):
            _finalize(bad, None, 1e-9, False)

    def test_backend_parity(self, library):
        if len(available_backends()) < 2:
            pytest.skip("compiled backend not built")
        cfg = SolverConfig(rel_tol=1e-8)
        for prof in library.values():
            tp = evolve(prof, cfg, backend="python")
            tc = evolve(prof, cfg, backend="compiled")
            for x, y in zip((tp.a, tp.b, tp.c, tp.d), (tc.a, tc.b, tc.c, tc.d)):
                assert abs(x - y) <= 1e-12 * max(1.0, abs(x))

    def test_unknown_backend(self, library):
        with pytest.raises(ValueError, match="unknown backend"):
            evolve(library["constant"], backend="fortran")


class TestFrameEvolution:
    def test_probe_frame_matches_plain(self, library):
        cfg = SolverConfig(rel_tol=1e-9)
        for name in ("rectangular", "gaussian", "hyperbolic"):
            prof = library[name]
            plain = extract(evolve(prof, cfg), prof.omega0, prof.t_i, prof.t_f)
            probe = ProbeFunction.from_theta_function(
                prof.omega0, prof.t_i, prof.t_f,
                lambda t: 0.4 * np.sin(np.pi * (t - prof.t_i) / prof.span) ** 2)
            framed = extract(evolve(prof, cfg, frame=probe),
                             prof.omega0, prof.t_i, prof.t_f)
            budget = 10 * cfg.rel_tol * (1.0 + plain.beta_sq)
            assert abs(framed.beta_sq - plain.beta_sq) <= budget

    def test_mismatched_probe_rejected(self, library):
        from parabound.errors import InadmissibleProbe

        probe = ProbeFunction.constant(1.0, 0.0, 0.5)
        with pytest.raises(InadmissibleProbe):
            evolve(library["gaussian"], frame=probe)


class TestFixedStep:
    def test_convergence_is_second_order(self):
        prof = make_profile(gaussian_bump(1.0, 3.0, 1.0))
        fine = evolve_fixed(prof, 4096)
        finer = evolve_fixed(prof, 2048)
        ref = np.array([fine.a, fine.b, fine.c, fine.d]) + (
            np.array([fine.a, fine.b, fine.c, fine.d])
            - np.array([finer.a, finer.b, finer.c, finer.d])) / 3.0
        errs = []
        for n in (64, 128, 256, 512):
            T = evolve_fixed(prof, n)
            errs.append(np.max(np.abs(np.array([T.a, T.b, T.c, T.d]) - ref)))
        for e0, e1 in zip(errs, errs[1:]):
            assert 3.5 <= e0 / e1 <= 4.5

    def test_matches_adaptive(self):
        prof = make_profile(gaussian_bump(1.0, 1.0, 0.8))
        adaptive = evolve(prof, SolverConfig(rel_tol=1e-10))
        fixed = evolve_fixed(prof, 60000)
        assert fixed.a == pytest.approx(adaptive.a, abs=1e-8)


class TestEvolveState:
    def test_plane_wave_components(self):
        # (phi, pi/w0) = (1, i) e^{i w0 t}: real and imaginary parts evolve
        # independently and must land on the rotated plane wave
        tau = 1.3
        prof = make_profile(constant(1.0, 0.0, tau))
        re0 = StateVector(1.0, 0.0)
        im0 = StateVector(0.0, 1.0)
        re1 = evolve_state(re0, prof)
        im1 = evolve_state(im0, prof)
        assert re1.phi == pytest.approx(math.cos(tau), abs=1e-12)
        assert re1.pi_scaled == pytest.approx(-math.sin(tau), abs=1e-12)
        assert im1.phi == pytest.approx(math.sin(tau), abs=1e-12)
        assert im1.pi_scaled == pytest.approx(math.cos(tau), abs=1e-12)

    def test_quarter_period(self):
        prof = make_profile(constant(1.0, 0.0, math.pi / 2))
        out = evolve_state(StateVector(1.0, 0.0), prof)
        assert out.phi == pytest.approx(0.0, abs=1e-12)
        assert out.pi_scaled == pytest.approx(-1.0, abs=1e-12)

    def test_hyperbolic_pulse_state(self):
        prof = make_profile(hyperbolic_pulse(1.0, -1.0, 0.0, 1.0))
        out = evolve_state(StateVector(1.0, 0.0), prof)
        assert out.phi == pytest.approx(math.cosh(1.0), abs=1e-10)
        assert out.pi_scaled == pytest.approx(math.sinh(1.0), abs=1e-10)


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(rel_tol=0.0)
    with pytest.raises(ValueError):
        SolverConfig(rel_tol=0.5)
    with pytest.raises(ValueError):
        SolverConfig(max_steps=4)
    with pytest.raises(ValueError):
        SolverConfig(initial_step=-1.0)
