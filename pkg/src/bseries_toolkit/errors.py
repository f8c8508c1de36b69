"""Exception hierarchy for the toolkit.

Every error raised on purpose by the library derives from BSeriesError, so the
CLI can map domain failures to exit code 1 in one place.
"""


class BSeriesError(Exception):
    """Base class for domain errors."""


class ConfigError(BSeriesError):
    """Invalid configuration value (usually from the environment)."""


class OrderRangeError(BSeriesError, ValueError):
    """Requested order or size lies outside the supported range."""

    def __init__(self, what: str, value: int, low: int, high: int):
        self.what = what
        self.value = value
        self.low = low
        self.high = high
        super().__init__(f"{what} must be in {low}..{high}, got {value}")


class DimensionError(BSeriesError, ValueError):
    """Vectors, matrices or fields with incompatible dimensions."""


class DerivativeDepthError(BSeriesError):
    """A vector field cannot supply the derivative order being asked for."""


class GroupMembershipError(BSeriesError):
    """A series outside the Butcher group (c(empty) != 1) used as a group element."""


class SingularMapError(BSeriesError, ValueError):
    """An affine map that must be invertible is not."""


class ConvergenceError(BSeriesError):
    """An iterative solve did not reach its tolerance."""

    def __init__(self, message: str, residual: float, iterations: int):
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"{message} (residual {residual:.3e} after {iterations} iterations)")


class FormatError(BSeriesError, ValueError):
    """Malformed tree encoding, fraction string, or input file."""


class StructureError(BSeriesError, ValueError):
    """A matrix lacks a required structure, e.g. antisymmetry."""


class UnknownNameError(BSeriesError, LookupError):
    """No catalog entry under the requested name."""

    def __init__(self, kind: str, name: str, known: list[str]):
        self.kind = kind
        self.name = name
        super().__init__(f"no {kind} named {name!r}; known: {', '.join(known)}")
