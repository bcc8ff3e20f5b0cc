"""Exception types shared across moeforge."""


class MoeforgeError(Exception):
    """Base class for all moeforge errors."""


class ShapeError(MoeforgeError, ValueError):
    """Array dimensions are inconsistent or the input is not of the required form."""


class DomainError(MoeforgeError, ValueError):
    """A scalar argument lies outside the domain of the function."""


class NoViolationError(DomainError):
    """The violation gap is nonpositive, so no certificate can exist."""


class NumericalError(MoeforgeError, ArithmeticError):
    """An iterative solver failed to converge."""


class MatrixFileError(MoeforgeError, ValueError):
    """A matrix file could not be parsed."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
