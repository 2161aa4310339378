"""Exception types shared across the toolkit."""


class CatsimError(Exception):
    """Base class for toolkit errors."""


class TruncationError(CatsimError):
    """Fock-space cutoff too small for the requested state or displacement."""


class DimensionMismatchError(CatsimError):
    """Operands live on different Hilbert spaces."""


class StateValidationError(CatsimError):
    """Density matrix or state vector violates its invariants."""


class IntegrationError(CatsimError):
    """ODE integration failed or did not meet tolerances."""


class FitError(CatsimError):
    """Least-squares or likelihood fit failed or is degenerate."""


class ConfigError(CatsimError):
    """Invalid run configuration (unknown/missing fields, bad values)."""
