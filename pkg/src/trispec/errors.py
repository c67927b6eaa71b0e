"""Exception types shared across the package."""


class TrispecError(Exception):
    """Base class for all package errors."""


class DegenerateTriangle(TrispecError, ValueError):
    pass


class UnsupportedOrder(TrispecError, ValueError):
    pass


class BracketFailure(TrispecError, ArithmeticError):
    pass


class ExactFieldError(TrispecError, ArithmeticError):
    """An evaluation left the exact scalar field."""


class InvalidPencil(TrispecError, ValueError):
    pass


class OutOfValidity(TrispecError, ValueError):
    pass


class GenerationError(TrispecError, RuntimeError):
    pass


class PrecisionError(TrispecError, ArithmeticError):
    pass


class EmptyDomain(TrispecError, ValueError):
    pass


class ConvergenceError(TrispecError, RuntimeError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
