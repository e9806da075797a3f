"""Exception hierarchy shared by every module.

Each class maps to one CLI exit code (see ``semiclassical_ee.cli``).
"""


class SemiclassicalError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class DomainError(SemiclassicalError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""

    exit_code = 3


class UnsupportedError(DomainError):
    """A well-formed request that the library deliberately does not handle."""


class UsageError(SemiclassicalError, ValueError):
    """Inputs that are individually valid but mutually inconsistent."""

    exit_code = 2


class ConfigError(UsageError):
    """Invalid experiment configuration; ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class NumericalError(SemiclassicalError, ArithmeticError):
    """A numerical routine failed to converge or produced an invalid value.

    ``estimate`` carries the best available result when one exists and
    ``index`` the failing eigenvalue index for eigensolver failures.
    """

    exit_code = 3

    def __init__(self, message, estimate=None, index=None):
        super().__init__(message)
        self.estimate = estimate
        self.index = index


class ResourceError(SemiclassicalError):
    """A problem size exceeds a documented enumeration cap."""

    exit_code = 4


class OutputError(SemiclassicalError, OSError):
    """Failure writing an output file."""

    exit_code = 5


class ReproductionError(SemiclassicalError):
    """A reproduced reference number misses its tolerance."""

    exit_code = 6
