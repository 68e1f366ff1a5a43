"""Exception hierarchy shared by all parabound modules."""


class ParaboundError(Exception):
    """Base class for all errors raised by this package."""


# --- profile construction ---

class NonPositiveOmega0(ParaboundError):
    """Reference frequency must be strictly positive."""


class EmptySupport(ParaboundError):
    """The computed support interval is empty or degenerate."""


class TabulatedTooSparse(ParaboundError):
    """Tabulated profiles need at least 4 sample points."""


class NegativeAsymptoticK(ParaboundError):
    """No propagating asymptotic states: requires E > 0."""


# --- propagation ---

class NonFiniteGenerator(ParaboundError):
    """Generator entries or step size are NaN/Inf."""


class StepLimitExceeded(ParaboundError):
    """The adaptive integrator ran out of steps before reaching t_f."""


class DeterminantDriftWarning(UserWarning):
    """Transfer-matrix determinant drifted beyond 100*rel_tol.

    The result is still returned; this warning is the quality flag.
    """


# --- coefficient extraction and composition ---

class NotUnimodular(ParaboundError):
    """Transfer matrix determinant differs from 1 beyond tolerance."""


# --- quadrature and bounds ---

class QuadratureNotConverged(ParaboundError):
    """Adaptive quadrature exhausted its subdivision budget."""


class InadmissibleProbe(ParaboundError):
    """Probe function violates its admissibility conditions on this profile."""


class NegativeOmegaSquared(ParaboundError):
    """Bound kind requires omega^2 > 0 everywhere on the support."""


# --- probe optimization ---

class NodeCountTooSmall(ParaboundError):
    """Probe discretization needs at least 16 intervals."""


# --- interaction-picture splits ---

class MismatchedSupport(ParaboundError):
    """Exact part does not share the full profile's support."""


class MismatchedOmega0(ParaboundError):
    """Exact part does not share the full profile's reference frequency."""


class SingularExactPart(ParaboundError):
    """Exact-part transfer matrix lost unit determinant beyond tolerance."""


class UnsupportedExactPart(ParaboundError):
    """Exact part must be piecewise constant (constant, rectangular, hyperbolic_pulse)."""


class NegativeMagnitude(ParaboundError):
    """Coefficient magnitudes must be non-negative."""


# --- CLI / configuration ---

class ParseError(ParaboundError):
    """Config file could not be parsed; message carries line context."""


class ValidationError(ParaboundError):
    """Config parsed but violates one or more invariants (all listed)."""
