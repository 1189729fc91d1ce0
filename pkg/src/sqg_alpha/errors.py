"""Exception hierarchy shared across the package."""


class ConfigurationError(ValueError):
    """Invalid parameters, grids or configuration files."""


class DataIntegrityError(ValueError):
    """Data that violates a structural invariant (e.g. conjugate symmetry)."""


class InsufficientDataError(ValueError):
    """Too few completed runs to form an estimate."""


class NumericalOverflowError(ArithmeticError):
    """Non-finite values appeared while evaluating the dynamics.

    ``t`` is the time of the state being advanced, ``stage`` the Runge-Kutta
    stage (or None outside a step) and ``last_good_t`` the last time at which
    the trajectory was known to be finite.
    """

    def __init__(self, message, *, t=None, stage=None, last_good_t=None):
        super().__init__(message)
        self.t = t
        self.stage = stage
        self.last_good_t = last_good_t


class SnapshotError(ValueError):
    """Base class for snapshot parse failures."""


class BadMagicError(SnapshotError):
    pass


class VersionMismatchError(SnapshotError):
    pass


class TruncatedPayloadError(SnapshotError):
    pass
