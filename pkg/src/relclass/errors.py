"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: configuration problems exit 1,
bounds problems exit 2, internal-consistency failures exit 3.
"""


class RelclassError(Exception):
    exit_code = 1


class ConfigError(RelclassError, ValueError):
    exit_code = 1


class BoundsError(RelclassError, ValueError):
    """An input lies outside the documented range of an operation."""

    exit_code = 2


class SizeError(BoundsError):
    """A finite object (group, cochain space) exceeds its size cap."""


class DomainError(RelclassError, ValueError):
    exit_code = 2


class StructureError(RelclassError, ValueError):
    """Inconsistent algebraic data, e.g. inertia not normal in decomposition."""

    exit_code = 2


class UnsupportedError(RelclassError, NotImplementedError):
    exit_code = 2


class ModeError(RelclassError, TypeError):
    """Exact and floating coefficient series were mixed."""

    exit_code = 2


class FitError(RelclassError, ArithmeticError):
    exit_code = 2

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConsistencyError(RelclassError, AssertionError):
    """Two independent routes to the same quantity disagreed."""

    exit_code = 3
