"""Exception types shared across the package."""


class ParseError(ValueError):
    """Malformed expression text.

    Carries the character offset of the failure and a description of what
    the parser expected there.
    """

    def __init__(self, offset: int, expected: str):
        self.offset = offset
        self.expected = expected
        super().__init__(f"at offset {offset}: expected {expected}")


class DomainError(ValueError):
    """Evaluation outside a function's real domain (log of a nonpositive
    value, fractional power of a negative base, |x| differentiated at 0, ...)."""


class NonFiniteResult(ArithmeticError):
    """An evaluation produced NaN or an infinity; such values are never stored."""


class NonPositiveMetric(ValueError):
    """A metric coefficient was nonpositive at an evaluation point."""


class OutOfRange(ValueError):
    """Requested point lies outside the covered interval."""


class NotMonotone(ValueError):
    """A trajectory component expected to be strictly monotone is not."""


class TargetOutOfRange(ValueError):
    """Inversion target lies outside the range of the monotone component."""


class IntegrationFailure(RuntimeError):
    """The integrator could not produce a usable trajectory."""


class StepUnderflow(IntegrationFailure):
    """The step size hit its floor without meeting the error tolerance."""


class MaxStepsExceeded(IntegrationFailure):
    """The step budget ran out before the requested endpoint."""


class ImmediateBreakdown(IntegrationFailure):
    """The solver's definedness guards fail already at the boundary."""


class InfeasibleBoundaryData(ValueError):
    """Boundary data fails the sign condition required for solvability."""


class InvalidS0(ValueError):
    """Arc-length collar depth outside the admissible interval."""


class InvalidConstant(ValueError):
    """A profile constant that must be positive is not."""
