"""Exception hierarchy shared by every module in the package."""


class SynthesisError(Exception):
    """Base class for all errors raised by bqdsynth."""


class DimensionError(SynthesisError, ValueError):
    """Matrix shape is wrong (non-square, mismatched, not a power of two)."""


class RangeError(SynthesisError, ValueError):
    """An integer argument (qubit count, level, wire index) is out of range."""


class ValidationError(SynthesisError, ValueError):
    """Input fails a numerical precondition, typically unitarity."""


class DecompositionError(SynthesisError, ArithmeticError):
    """A factorization produced a residual above tolerance."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class UnsupportedError(SynthesisError, NotImplementedError):
    """Requested mode or method exists only as an asymptotic formula or is not meaningful."""


class ParseError(SynthesisError, ValueError):
    """Malformed matrix file or QASM text."""
