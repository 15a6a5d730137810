"""Exception hierarchy; the CLI maps these onto exit codes."""


class XeitError(Exception):
    """Base class for all errors raised by the package."""


class ConfigError(XeitError, ValueError):
    """Invalid parameters, configuration files or schedules (exit code 2)."""


class ScheduleValidationError(ConfigError):
    """A field schedule is incompatible with the pulse or the grid."""


class TruncatedRecordError(ConfigError):
    """A time record ends before the pulse has left the medium."""


class NumericalError(XeitError, ArithmeticError):
    """Failure during a numerical computation (exit code 3)."""


class SingularityError(NumericalError):
    pass


class ShapeError(NumericalError):
    """A spectrum does not have the expected dip structure."""


class RunawayError(NumericalError):
    pass
