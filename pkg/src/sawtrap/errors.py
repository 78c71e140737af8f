"""Exception types shared across the package.

``SawtrapError`` is the root of every runtime failure the library raises
on purpose; the CLI maps it to exit code 1.  ``ConfigError`` is separate
(exit code 2).
"""


class SawtrapError(Exception):
    pass


class DimensionMismatchError(SawtrapError, ValueError):
    pass


class StepUnderflowError(SawtrapError):
    def __init__(self, t_last, message=None):
        self.t_last = t_last
        super().__init__(message or f"step size underflow at t={t_last!r}")


class NonFiniteValueError(SawtrapError, ValueError):
    def __init__(self, x, value):
        self.x = x
        self.value = value
        super().__init__(f"function returned {value!r} at x={x!r}")


class QuadratureError(SawtrapError):
    def __init__(self, estimate, error, message="quadrature did not converge"):
        self.estimate = estimate
        self.error = error
        super().__init__(f"{message}: estimate={estimate!r}, error~{error!r}")


class DegenerateDegreeError(SawtrapError, ValueError):
    pass


class DomainError(SawtrapError, ValueError):
    pass


class NoTrapError(SawtrapError):
    def __init__(self, bound, message):
        self.bound = bound
        super().__init__(message)


class PoleError(SawtrapError, ZeroDivisionError):
    def __init__(self, location, message=None):
        self.location = location
        super().__init__(message or f"pole at s={location!r}")


class NoBoundaryError(SawtrapError):
    pass


class StencilError(SawtrapError):
    pass


class CoincidentSitesError(SawtrapError, ValueError):
    def __init__(self, i, j):
        self.pair = (i, j)
        super().__init__(f"sites {i} and {j} coincide")


class ConfigError(Exception):
    """Invalid experiment configuration; ``field`` is a dotted path."""

    def __init__(self, field, message, line=None, column=None):
        self.field = field
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{field}: {message}{where}")
