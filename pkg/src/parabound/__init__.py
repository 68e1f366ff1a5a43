"""parabound: exact transfer matrices and rigorous bounds for
phi'' + omega^2(t) phi = 0 (equivalently 1-D scattering phi'' + k^2(x) phi = 0).

The package computes the time-ordered-exponential transfer matrix exactly
(to solver tolerance), extracts Bogoliubov / transmission / reflection
coefficients, evaluates the whole family of rigorous upper and lower
bounds on them, numerically optimizes the probe function the bounds are
built from, and cross-checks everything against closed-form oracles.
"""

from .errors import (
    DeterminantDriftWarning,
    EmptySupport,
    InadmissibleProbe,
    MismatchedOmega0,
    MismatchedSupport,
    NegativeAsymptoticK,
    NegativeMagnitude,
    NegativeOmegaSquared,
    NodeCountTooSmall,
    NonFiniteGenerator,
    NonPositiveOmega0,
    NotUnimodular,
    ParaboundError,
    ParseError,
    QuadratureNotConverged,
    SingularExactPart,
    StepLimitExceeded,
    TabulatedTooSparse,
    UnsupportedExactPart,
    ValidationError,
)
from .profiles import (
    FrequencyProfile,
    ProfileSpec,
    constant,
    from_potential,
    gaussian_bump,
    hyperbolic_pulse,
    load_tabulated_file,
    make_profile,
    rectangular,
    sech2,
    tabulated,
)
from .propagator import (
    SolverConfig,
    StateVector,
    TransferMatrix,
    available_backends,
    evolve,
    evolve_fixed,
    evolve_state,
    kernel_backend,
    step_exponential,
    write_trajectory_csv,
)
from .bogoliubov import (
    BogoliubovCoefficients,
    ScatteringCoefficients,
    alpha_sq_from_transfer,
    beta_sq_from_transfer,
    extract,
    normalization_residual,
    scattering,
)
from .quadrature import QuadConfig, adaptive_quadrature, sign_change_roots
from .probes import ProbeFunction
from .bounds import (
    BoundReport,
    elementary_bound,
    interpolating_bound,
    lower_bound_beta,
    lower_bound_report,
    probe_bound,
    triangle_bound,
)
from .probe_optimizer import (
    OptimizerConfig,
    OptimizerDiagnostics,
    action,
    optimality_diagnostics,
    optimize_probe,
)
from .interaction import (
    PhaseStrippedPair,
    ProfileSplit,
    compose,
    compose_coefficients,
    composition_bounds,
    evolve_delta,
    exact_transfer,
    phase_stripped,
    split,
    split_transfer,
)

__version__ = "0.1.0"
