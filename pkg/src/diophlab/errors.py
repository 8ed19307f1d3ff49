"""Exception hierarchy shared by every diophlab module."""


class DiophlabError(Exception):
    pass


class DomainError(DiophlabError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ResourceError(DiophlabError):
    """A requested size exceeds a configured cap (sieve, enumeration, ...)."""


class DegreeError(DomainError):
    pass


class IrreducibleError(DomainError):
    """The quadratic does not split over the integers."""


class SquarePolynomialError(DomainError):
    """The quadratic is a constant times the square of a linear polynomial."""


class NotDiophantinePairError(DomainError):
    pass


class NumericError(DiophlabError, ArithmeticError):
    """A numerical routine (quadrature, bisection) failed to converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class BoundViolation(DiophlabError, AssertionError):
    """A proven inequality was observed to fail on a concrete instance."""
