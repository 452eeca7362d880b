"""Exception hierarchy shared by every layer of the package."""


class GaloisLabError(Exception):
    """Base class for all errors raised by galois_lab."""


class ContextMismatchError(GaloisLabError, ValueError):
    """Operands live over different (p, N) contexts or have different sizes."""


class PrecisionError(GaloisLabError, ArithmeticError):
    """An operation would need more p-adic precision than the context holds."""


class NotInvertibleError(GaloisLabError, ArithmeticError):
    """Determinant (or scalar) is not a unit at p."""


class DomainError(GaloisLabError, ValueError):
    """Input lies outside the convergence domain of exp/log."""


class EnumerationError(GaloisLabError, RuntimeError):
    """Explicit group enumeration would exceed the configured element bound."""

    def __init__(self, message, estimated_order=None):
        super().__init__(message)
        self.estimated_order = estimated_order


class NormalizationError(GaloisLabError, RuntimeError):
    """Generator normalization failed (abelian span or exhausted budget)."""


class ClosureError(GaloisLabError, RuntimeError):
    """Bracket closure exceeded its dimension guard."""
