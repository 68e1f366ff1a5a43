import math

import numpy as np
import pytest

from parabound import SolverConfig, make_profile
from parabound.profiles import (
    constant,
    gaussian_bump,
    hyperbolic_pulse,
    rectangular,
    sech2,
)


@pytest.fixture(scope="session")
def library():
    """One built profile per analytic family (plus a negative-dip variant)."""
    specs = {
        "constant": constant(1.0, 0.0, 2.0),
        "rectangular": rectangular(1.0, 2.0, 0.0, math.pi / 4),
        "hyperbolic": hyperbolic_pulse(1.0, -1.0, 0.0, 1.0),
        "gaussian": gaussian_bump(1.0, 3.0, 1.0),
        "gaussian_dip": gaussian_bump(1.0, -0.75, 0.8),
        "sech2": sech2(1.0, 1.5, 0.7),
        "sech2_well": sech2(1.2, -2.5, 0.6),
    }
    return {name: make_profile(spec) for name, spec in specs.items()}


@pytest.fixture(scope="session")
def fast_solver():
    return SolverConfig(rel_tol=1e-7, abs_tol=1e-12)


def random_unimodular(rng: np.random.Generator):
    """Random real 2x2 matrix with determinant exactly 1 (up to rounding)."""
    while True:
        a, b, c = rng.uniform(-3.0, 3.0, size=3)
        if abs(a) > 0.1:
            break
    d = (1.0 + b * c) / a
    return a, b, c, d
