"""Exception types shared across the package."""


class CimError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(CimError, ValueError):
    """A parameter is outside its documented domain."""


class InvalidOperationError(CimError):
    """An operation is not applicable to the current state (e.g. discarding every mode)."""


class PhysicalityError(CimError):
    """A covariance matrix violates positivity or the uncertainty bound."""


class DegenerateMeasurementError(CimError):
    """Homodyne conditioning on a quadrature with (numerically) zero variance."""


class GaugeImpossibleError(CimError):
    """A frustrated ring (S* = -1) cannot be gauged to all-ferromagnetic couplings."""


class SingularBasisError(CimError):
    """The measurement-basis matrix is singular (requires S* = -1 to invert)."""


class NoSteadyStateError(CimError):
    """Steady-state quantities requested for above-threshold parameters."""


class UnsupportedParityError(CimError):
    """Characteristic-moment analysis is only defined for an even number of modes."""


class InvalidMomentError(CimError, ValueError):
    """Moment coefficient vectors violate the normalization/matching constraints."""


class NumericalConditioningError(CimError):
    """A linear solve is too ill-conditioned to trust."""


class ConfigError(CimError, ValueError):
    """Malformed configuration or input file; the message names the offending field."""
