"""Built-in verification suite: invariants, oracles, and dominance checks.

Each check below is one acceptance criterion, self-contained and
independently runnable; `run_all` executes them in order and reports one
pass/fail line per criterion. The `parabound verify` CLI command exits 0
iff every check passes.

The profile library spans the five analytic families; the dominance sweep
builds parameter grids across all of them (> 200 instances) and asserts

    lower bound <= exact |beta|^2 <= every applicable upper bound

with slack quad_error + 100 * rel_tol on each comparison.
"""
from __future__ import annotations

import io
import math
import sys
import time
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .bogoliubov import extract, normalization_residual, scattering
from .bounds import (
    elementary_bound,
    interpolating_bound,
    lower_bound_beta,
    probe_bound,
    triangle_bound,
)
from .interaction import (
    compose,
    composition_bounds,
    phase_stripped,
    split,
    split_transfer,
)
from .probe_optimizer import optimize_probe
from .probes import ProbeFunction
from .profiles import ProfileSpec, constant, gaussian_bump, hyperbolic_pulse, make_profile, rectangular, sech2
from .propagator import SolverConfig, evolve, evolve_fixed, step_exponential

_REL_TOL = 1e-9  # default solver tolerance used throughout the suite


@dataclass(frozen=True)
class CheckResult:
    criterion: int
    name: str
    passed: bool
    detail: str
    seconds: float


def library_specs() -> list[tuple[str, ProfileSpec]]:
    """Representative members of the five analytic families."""
    return [
        ("constant_unit", constant(1.0, 0.0, 2.0)),
        ("constant_w07", constant(0.7, -1.0, 3.0)),
        ("rectangular_barrier", rectangular(1.0, 2.0, 0.0, math.pi / 4)),
        ("rectangular_well", rectangular(1.0, 0.5, 0.0, 1.5)),
        ("hyperbolic_unit", hyperbolic_pulse(1.0, -1.0, 0.0, 1.0)),
        ("gaussian_a3", gaussian_bump(1.0, 3.0, 1.0)),
        ("gaussian_dip", gaussian_bump(1.0, -0.75, 0.8)),
        ("sech2_bump", sech2(1.0, 1.5, 0.7)),
        ("sech2_well", sech2(1.2, -2.5, 0.6)),
    ]


def dominance_specs() -> list[ProfileSpec]:
    """Parameter grids across all five families; >= 200 instances."""
    specs: list[ProfileSpec] = []
    for omega0 in (0.6, 1.0, 1.7):
        for duration in (0.8, 1.7, 2.9):
            specs.append(constant(omega0, 0.0, duration))
    for omega1 in (0.2, 0.45, 0.7, 0.9, 1.15, 1.5, 2.0, 2.6, 3.2):
        for duration in (0.3, 0.7, 1.1, 1.7, 2.4, 3.1):
            specs.append(rectangular(1.0, omega1, 0.0, duration))
    for w_in in (-0.2, -0.6, -1.0, -1.8, -3.0, -4.5):
        for duration in (0.25, 0.5, 0.8, 1.2, 1.7):
            specs.append(hyperbolic_pulse(1.0, w_in, 0.0, duration))
    for amp in (-0.8, -0.5, -0.25, 0.4, 0.9, 1.7, 2.6, 3.5):
        for sigma in (0.35, 0.55, 0.8, 1.05, 1.3, 1.6, 1.9, 2.3):
            specs.append(gaussian_bump(1.0, amp, sigma))
    for amp in (-2.4, -1.2, -0.6, 0.5, 1.1, 2.0, 3.0):
        for width in (0.25, 0.4, 0.55, 0.75, 0.95, 1.2, 1.45):
            specs.append(sech2(1.0, amp, width))
    return specs


def _frame_probes(profile) -> list[ProbeFunction]:
    t_i, t_f, span, w0 = profile.t_i, profile.t_f, profile.span, profile.omega0

    def u(t):
        return (np.asarray(t, dtype=float) - t_i) / span

    shapes = [
        lambda t: 0.4 * np.sin(np.pi * u(t)) ** 2,
        lambda t: -0.35 * np.sin(np.pi * u(t)) ** 2 * np.cos(2.0 * np.pi * u(t)),
        lambda t: 0.25 * np.sin(2.0 * np.pi * u(t)) ** 2,
    ]
    return [ProbeFunction.from_theta_function(w0, t_i, t_f, s, n_nodes=129)
            for s in shapes]


# --- criteria -----------------------------------------------------------

def check_unimodularity() -> CheckResult:
    """|det T - 1| <= 100*rel_tol over the library x 3 tolerance settings."""
    start = time.perf_counter()
    worst = 0.0
    worst_case = ""
    for rel_tol in (1e-6, 1e-9, 1e-11):
        cfg = SolverConfig(rel_tol=rel_tol, abs_tol=min(1e-12, rel_tol))
        for name, spec in library_specs():
            T = evolve(make_profile(spec), cfg)
            drift = T.det_drift() / (100.0 * rel_tol)
            if drift > worst:
                worst = drift
                worst_case = f"{name}@rel_tol={rel_tol}"
    passed = worst <= 1.0
    return CheckResult(1, "unimodularity", passed,
                       f"max |det-1| / (100 rel_tol) = {worst:.3e} ({worst_case})",
                       time.perf_counter() - start)


def check_normalization() -> CheckResult:
    """||alpha|^2 - |beta|^2 - 1| <= 1e-8 on every extraction."""
    start = time.perf_counter()
    worst = 0.0
    for _name, spec in library_specs():
        prof = make_profile(spec)
        T = evolve(prof)
        co = extract(T, prof.omega0, prof.t_i, prof.t_f)
        worst = max(worst, abs(normalization_residual(co)))
    return CheckResult(2, "normalization", worst <= 1e-8,
                       f"max |residual| = {worst:.3e} (tol 1e-8)",
                       time.perf_counter() - start)


def check_rectangular_oracle() -> CheckResult:
    """omega1=2, tau=pi/4: T = [[0, 0.5], [-2, 0]], |beta|^2 = 0.5625."""
    start = time.perf_counter()
    prof = make_profile(rectangular(1.0, 2.0, 0.0, math.pi / 4))
    T = evolve(prof)
    co = extract(T, 1.0, prof.t_i, prof.t_f)
    sc = scattering(co)
    errs = {
        "a": abs(T.a - 0.0), "b": abs(T.b - 0.5),
        "c": abs(T.c + 2.0), "d": abs(T.d - 0.0),
        "beta_sq": abs(co.beta_sq - 0.5625),
        "alpha_sq": abs(co.alpha_sq - 1.5625),
        "transmission": abs(sc.transmission - 0.64),
    }
    worst = max(errs.values())
    return CheckResult(3, "rectangular oracle", worst <= 1e-8,
                       f"max deviation = {worst:.3e} (tol 1e-8)",
                       time.perf_counter() - start)


def check_hyperbolic_saturation() -> CheckResult:
    """Exact, elementary upper, and trace lower bound all equal sinh^2(1)."""
    start = time.perf_counter()
    prof = make_profile(hyperbolic_pulse(1.0, -1.0, 0.0, 1.0))
    T = evolve(prof)
    co = extract(T, 1.0, 0.0, 1.0)
    upper = elementary_bound(prof)
    lower, applicable = lower_bound_beta(T)
    target = math.sinh(1.0) ** 2
    errs = [abs(co.beta_sq - target), abs(upper.beta_sq_bound - target),
            abs(lower - target)]
    worst = max(errs)
    return CheckResult(4, "hyperbolic saturation", worst <= 1e-6 and applicable,
                       f"max deviation from sinh^2(1) = {worst:.3e} (tol 1e-6)",
                       time.perf_counter() - start)


def check_dominance_sweep() -> CheckResult:
    """lower <= exact <= every applicable upper across >= 200 instances."""
    start = time.perf_counter()
    specs = dominance_specs()
    n = len(specs)
    slack_solver = 100.0 * _REL_TOL
    violations = []
    for i, spec in enumerate(specs):
        prof = make_profile(spec)
        T = evolve(prof)
        co = extract(T, prof.omega0, prof.t_i, prof.t_f)
        exact = co.beta_sq
        lower, _app = lower_bound_beta(T)
        if exact < lower - slack_solver:
            violations.append(f"#{i} lower {lower:.6g} > exact {exact:.6g}")
        uppers = [elementary_bound(prof),
                  probe_bound(prof, ProbeFunction.constant(prof.omega0, prof.t_i, prof.t_f))]
        # the frequency-track probes need omega^2 > 0 AND a continuous
        # approach to omega0 at the support edges
        if prof.everywhere_positive and prof.endpoint_mismatch() <= 1e-6:
            track = ProbeFunction.from_profile_omega(prof)
            uppers.append(probe_bound(prof, track))
            uppers.append(triangle_bound(prof, track))
            for eps in (0.25, 0.5, 0.75):
                uppers.append(interpolating_bound(prof, eps))
        for rep in uppers:
            slack = rep.quad_error + slack_solver
            if exact > rep.beta_sq_bound + slack:
                violations.append(
                    f"#{i} {rep.kind}(eps={rep.epsilon}) bound "
                    f"{rep.beta_sq_bound:.6g} < exact {exact:.6g}")
    elapsed = time.perf_counter() - start
    passed = not violations and n >= 200 and elapsed <= 60.0
    detail = f"{n} instances, {len(violations)} violations, {elapsed:.1f}s (budget 60s)"
    if violations:
        detail += "; first: " + violations[0]
    return CheckResult(5, "dominance sweep", passed, detail, elapsed)


def check_adiabatic_tightening() -> CheckResult:
    """Gaussian bump: probe(omega) integral = 2 ln 2, elementary = 3 sqrt(pi)."""
    start = time.perf_counter()
    prof = make_profile(gaussian_bump(1.0, 3.0, 1.0))
    track = ProbeFunction.from_profile_omega(prof)
    adiabatic = probe_bound(prof, track)
    elem = elementary_bound(prof)
    err_probe = abs(adiabatic.integral - 2.0 * math.log(2.0))
    err_elem = abs(elem.integral - 3.0 * math.sqrt(math.pi))
    passed = err_probe <= 1e-6 and err_elem <= 1e-4
    return CheckResult(6, "adiabatic tightening", passed,
                       f"|I_probe - 2ln2| = {err_probe:.3e} (tol 1e-6), "
                       f"|I_elem - 3 sqrt(pi)| = {err_elem:.3e} (tol 1e-4)",
                       time.perf_counter() - start)


def check_frame_independence() -> CheckResult:
    """Probe-frame |beta|^2 matches plain frame for 3 probes x 3 profiles."""
    start = time.perf_counter()
    profiles = [make_profile(s) for _n, s in (
        ("rect", rectangular(1.0, 2.0, 0.0, math.pi / 4)),
        ("gauss", gaussian_bump(1.0, 3.0, 1.0)),
        ("hyp", hyperbolic_pulse(1.0, -1.0, 0.0, 1.0)),
    )]
    worst = 0.0
    for prof in profiles:
        plain = extract(evolve(prof), prof.omega0, prof.t_i, prof.t_f).beta_sq
        budget = 10.0 * _REL_TOL * (1.0 + plain)
        for probe in _frame_probes(prof):
            framed = extract(evolve(prof, frame=probe),
                             prof.omega0, prof.t_i, prof.t_f).beta_sq
            worst = max(worst, abs(framed - plain) / budget)
    return CheckResult(7, "frame independence", worst <= 1.0,
                       f"max |delta beta_sq| / budget = {worst:.3e}",
                       time.perf_counter() - start)


def check_interaction_split() -> CheckResult:
    """Split reconstruction and the composition sandwich on two profiles."""
    start = time.perf_counter()
    cases = [
        make_profile(rectangular(1.0, 2.0, 0.0, math.pi / 4)),
        make_profile(hyperbolic_pulse(1.0, -1.0, 0.0, 1.0)),
    ]
    worst_rec = 0.0
    sandwich_ok = True
    detail_extra = ""
    for prof in cases:
        sp = split(prof, constant(prof.omega0, prof.t_i, prof.span))
        T_e, T_d = split_transfer(sp)
        T_direct = evolve(prof)
        T_rec = compose(T_e, T_d)
        scale = max(1.0, T_direct.max_norm())
        rec_err = max(abs(T_rec.a - T_direct.a), abs(T_rec.b - T_direct.b),
                      abs(T_rec.c - T_direct.c), abs(T_rec.d - T_direct.d))
        worst_rec = max(worst_rec, rec_err / (10.0 * _REL_TOL * scale))
        beta_full = math.sqrt(extract(T_direct, prof.omega0, prof.t_i, prof.t_f).beta_sq)
        lo, up = composition_bounds(phase_stripped(T_e).beta_mag,
                                    phase_stripped(T_d).beta_mag)
        eps = 100.0 * _REL_TOL * (1.0 + up)
        if not (lo - eps <= beta_full <= up + eps):
            sandwich_ok = False
            detail_extra = f"; sandwich broken: {lo} <= {beta_full} <= {up}"
    passed = worst_rec <= 1.0 and sandwich_ok
    return CheckResult(8, "interaction split", passed,
                       f"max reconstruction err / budget = {worst_rec:.3e}"
                       + detail_extra,
                       time.perf_counter() - start)


def check_optimizer_contract() -> CheckResult:
    """Gaussian bump, N=256: S_opt <= 2 ln 2 + 1e-6, monotone, stable."""
    start = time.perf_counter()
    prof = make_profile(gaussian_bump(1.0, 3.0, 1.0))
    _probe, _report, diags = optimize_probe(prof, 256)
    hist = diags.action_history
    monotone = all(b <= a + 1e-12 for a, b in zip(hist, hist[1:]))
    target = 2.0 * math.log(2.0) + 1e-6
    _p2, _r2, diags2 = optimize_probe(prof, 512)
    change = abs(diags2.action_value - diags.action_value) / diags.action_value
    elapsed = time.perf_counter() - start
    passed = (diags.action_value <= target and monotone and change < 0.01
              and elapsed <= 30.0)
    return CheckResult(9, "optimizer contract", passed,
                       f"S_opt(256) = {diags.action_value:.8f} (cap {target:.8f}), "
                       f"monotone = {monotone}, refinement change = {change:.2%}, "
                       f"{elapsed:.1f}s (budget 30s)", elapsed)


def check_integrator_order() -> CheckResult:
    """Fixed-step error drops ~4x per halving on the gaussian bump."""
    start = time.perf_counter()
    prof = make_profile(gaussian_bump(1.0, 3.0, 1.0))
    fine = evolve_fixed(prof, 4096)
    finer = evolve_fixed(prof, 2048)
    # second-order Richardson reference from the two finest runs
    ref = [fine.a + (fine.a - finer.a) / 3.0, fine.b + (fine.b - finer.b) / 3.0,
           fine.c + (fine.c - finer.c) / 3.0, fine.d + (fine.d - finer.d) / 3.0]
    errs = []
    for n in (64, 128, 256, 512):
        T = evolve_fixed(prof, n)
        errs.append(max(abs(T.a - ref[0]), abs(T.b - ref[1]),
                        abs(T.c - ref[2]), abs(T.d - ref[3])))
    ratios = [errs[i] / errs[i + 1] for i in range(3)]
    passed = all(3.5 <= r <= 4.5 for r in ratios)
    return CheckResult(10, "integrator order", passed,
                       "error ratios per halving: "
                       + ", ".join(f"{r:.2f}" for r in ratios)
                       + " (window [3.5, 4.5])",
                       time.perf_counter() - start)


def check_commuting_reduction() -> CheckResult:
    """Constant profiles: adaptive evolve equals the closed-form exponential."""
    start = time.perf_counter()
    rng = np.random.default_rng(20260810)
    worst = 0.0
    for _ in range(10):
        omega0 = float(rng.uniform(0.3, 3.0))
        tau = float(rng.uniform(0.1, 10.0))
        prof = make_profile(constant(omega0, 0.0, tau))
        T = evolve(prof)
        closed = step_exponential(0.0, omega0, -omega0, tau)
        scale = max(1.0, closed.max_norm())
        err = max(abs(T.a - closed.a), abs(T.b - closed.b),
                  abs(T.c - closed.c), abs(T.d - closed.d))
        worst = max(worst, err / (_REL_TOL * scale))
    return CheckResult(11, "commuting-case reduction", worst <= 1.0,
                       f"max closed-form deviation / rel_tol = {worst:.3e}",
                       time.perf_counter() - start)


ALL_CHECKS: list[Callable[[], CheckResult]] = [
    check_unimodularity,
    check_normalization,
    check_rectangular_oracle,
    check_hyperbolic_saturation,
    check_dominance_sweep,
    check_adiabatic_tightening,
    check_frame_independence,
    check_interaction_split,
    check_optimizer_contract,
    check_integrator_order,
    check_commuting_reduction,
]


def run_all(quiet: bool = False, stream=None) -> bool:
    """Run every criterion; one line per check. True iff all passed."""
    out = stream if stream is not None else sys.stdout
    all_passed = True
    for check in ALL_CHECKS:
        result = check()
        all_passed &= result.passed
        line = (f"{'PASS' if result.passed else 'FAIL'}  "
                f"criterion {result.criterion:2d}  {result.name}: {result.detail}")
        if not result.passed or not quiet:
            print(line, file=out)
    status = "all criteria passed" if all_passed else "FAILURES present"
    if not quiet or not all_passed:
        print(status, file=out)
    return all_passed
