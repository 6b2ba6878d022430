"""Exception hierarchy shared by all modules."""


class OptomechError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(OptomechError, ValueError):
    """Malformed configuration file, unknown key or invalid range."""


class InvalidParameters(OptomechError, ValueError):
    """A physical parameter violates its domain (e.g. negative damping)."""


class NumericalFailure(OptomechError):
    """Base class for failures of a numerical stage."""


class NonConvergence(NumericalFailure):
    """The classical fixed-point iteration exceeded its iteration budget."""


class EigFailure(NumericalFailure):
    """The dense eigenvalue routine failed on the drift matrix."""


class UnstableSystem(NumericalFailure):
    """A steady state was requested for a drift matrix that is not stable."""


class UnstableMomentSystem(NumericalFailure):
    """The second-moment system has no stationary solution."""


class StepTooLarge(NumericalFailure):
    """Integrator step violates the stability or accuracy bound."""


class UnphysicalState(NumericalFailure):
    """A covariance matrix violates the uncertainty principle."""


class SingularBlock(NumericalFailure):
    """A local 2x2 covariance block is numerically singular."""


class NonPositiveDeterminant(NumericalFailure):
    """Renyi-2 entropy requested for a matrix with det <= 0."""


class AsymmetricParams(OptomechError, ValueError):
    """The collective-mode reduction needs two identical cavities."""


class UnknownFigure(OptomechError, KeyError):
    """No preset is registered under the requested figure id."""
