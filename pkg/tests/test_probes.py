import math

import numpy as np
import pytest

from parabound.errors import InadmissibleProbe
from parabound.probes import ProbeFunction
from parabound.profiles import gaussian_bump, hyperbolic_pulse, make_profile, rectangular


def test_constant_probe():
    p = ProbeFunction.constant(1.5, 0.0, 2.0)
    ts = np.linspace(0.0, 2.0, 17)
    assert np.allclose(p.omega(ts), 1.5)
    assert np.allclose(p.omega_dot(ts), 0.0)
    assert np.allclose(p.theta(ts), 0.0)


def test_endpoints_must_vanish():
    with pytest.raises(InadmissibleProbe, match="vanish"):
        ProbeFunction(1.0, 0.0, 1.0, np.array([0.1, 0.0, 0.0]))
    # snapping constructor absorbs small residues
    p = ProbeFunction.from_theta_samples(1.0, 0.0, 1.0, [1e-9, 0.2, -1e-9])
    assert p.theta_nodes[0] == 0.0
    assert p.theta_nodes[-1] == 0.0


def test_overflow_guard():
    with pytest.raises(InadmissibleProbe, match="overflow"):
        ProbeFunction(1.0, 0.0, 1.0, np.array([0.0, 60.0, 0.0]))


def test_validation_errors():
    with pytest.raises(InadmissibleProbe):
        ProbeFunction(-1.0, 0.0, 1.0, np.zeros(5))
    with pytest.raises(InadmissibleProbe):
        ProbeFunction(1.0, 1.0, 0.0, np.zeros(5))
    with pytest.raises(InadmissibleProbe):
        ProbeFunction(1.0, 0.0, 1.0, np.array([0.0, math.nan, 0.0]))


def test_interpolation_hits_nodes():
    nodes = np.array([0.0, 0.3, -0.2, 0.5, 0.0])
    p = ProbeFunction(1.0, 0.0, 2.0, nodes)
    for t, th in zip(p.node_times, nodes):
        assert float(p.theta(t)) == pytest.approx(th, abs=1e-14)
        assert float(p.omega(t)) == pytest.approx(math.exp(th), rel=1e-14)


def test_derivative_consistent_with_theta():
    p = ProbeFunction.from_theta_function(
        1.0, 0.0, 3.0, lambda t: 0.4 * np.sin(np.pi * t / 3.0) ** 2, n_nodes=65)
    h = 1e-6
    for t in (0.4, 1.1, 2.3):
        fd = (float(p.theta(t + h)) - float(p.theta(t - h))) / (2 * h)
        assert float(p.theta_dot(t)) == pytest.approx(fd, rel=1e-5, abs=1e-9)
    # omega_dot = omega * theta_dot by the chain rule
    for t in (0.4, 1.1, 2.3):
        assert float(p.omega_dot(t)) == pytest.approx(
            float(p.omega(t)) * float(p.theta_dot(t)), rel=1e-13)


def test_from_profile_omega_tracks_frequency():
    prof = make_profile(gaussian_bump(1.0, 3.0, 1.0))
    p = ProbeFunction.from_profile_omega(prof)
    ts = np.linspace(prof.t_i, prof.t_f, 101)
    expected = np.sqrt(np.asarray(prof.omega_sq(ts), dtype=float))
    assert np.allclose(np.asarray(p.omega(ts), dtype=float), expected, rtol=1e-12)
    assert p.theta_nodes[0] == 0.0 and p.theta_nodes[-1] == 0.0


def test_from_profile_omega_requires_positivity():
    prof = make_profile(hyperbolic_pulse(1.0, -1.0, 0.0, 1.0))
    with pytest.raises(InadmissibleProbe, match="omega\\^2 > 0"):
        ProbeFunction.from_profile_omega(prof)


def test_from_profile_omega_requires_continuous_edges():
    prof = make_profile(rectangular(1.0, 2.0, 0.0, 1.0))
    with pytest.raises(InadmissibleProbe, match="support edges"):
        ProbeFunction.from_profile_omega(prof)


def test_matches_profile():
    prof = make_profile(gaussian_bump(1.0, 3.0, 1.0))
    good = ProbeFunction.constant(prof.omega0, prof.t_i, prof.t_f)
    bad = ProbeFunction.constant(prof.omega0, prof.t_i, prof.t_f + 1.0)
    assert good.matches(prof)
    assert not bad.matches(prof)


def test_write_csv(tmp_path):
    p = ProbeFunction.from_theta_samples(2.0, 0.0, 1.0, [0.0, 0.25, 0.0])
    path = tmp_path / "probe.csv"
    p.write_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "t,theta,omega"
    assert len(lines) == 4
    mid = lines[2].split(",")
    assert float(mid[1]) == 0.25
    assert float(mid[2]) == pytest.approx(2.0 * math.exp(0.25))
