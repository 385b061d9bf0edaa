"""Exception hierarchy shared by all engines."""


class FrobSplitError(Exception):
    """Base class for every error raised by this package."""


class NotPrime(FrobSplitError, ValueError):
    pass


class BadReduction(FrobSplitError, ValueError):
    """A rational coefficient cannot be reduced modulo ``p``."""

    def __init__(self, p, term=None, message=None):
        self.p = p
        self.term = term
        if message is None:
            message = f"bad reduction modulo {p}" + (f" at term {term}" if term is not None else "")
        super().__init__(message)


class ArityMismatch(FrobSplitError, ValueError):
    pass


class PrimeMismatch(FrobSplitError, ValueError):
    pass


class ResourceExceeded(FrobSplitError, RuntimeError):
    """A computation would exceed a configured size cap."""

    def __init__(self, what, limit, actual=None):
        self.what = what
        self.limit = limit
        self.actual = actual
        extra = f" (reached {actual})" if actual is not None else ""
        super().__init__(f"{what} exceeds cap {limit}{extra}")


class Unbounded(FrobSplitError, ValueError):
    pass


class NotComplete(FrobSplitError, ValueError):
    pass


class CoefficientOutOfRange(FrobSplitError, ValueError):
    pass


class DegeneratePoints(FrobSplitError, ValueError):
    pass


class LambdaDegenerateModP(FrobSplitError, ValueError):
    pass


class EvenPrime(FrobSplitError, ValueError):
    pass


class HomogeneityViolation(FrobSplitError, ValueError):
    pass


class WildRamification(FrobSplitError, ValueError):
    pass


class OrphanSubspace(FrobSplitError, ValueError):
    pass


class NotHyperplaneCase(FrobSplitError, ValueError):
    pass


class GeneralPositionNotAsserted(FrobSplitError, ValueError):
    pass


class OutOfModel(FrobSplitError, ValueError):
    """The input needs data the model cannot express (e.g. irrational points)."""


class ValidationError(FrobSplitError, ValueError):
    """An instance violates a structural invariant."""

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ParseError(FrobSplitError, ValueError):
    """Malformed instance input; ``line``/``column`` point at the offending spot."""

    def __init__(self, message, line=None, column=None, source=None):
        self.line = line
        self.column = column
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:{column}:"
        super().__init__(f"{where} {message}" if where else message)


class EngineError(FrobSplitError):
    """Wraps an engine failure with the prime at which it happened."""

    def __init__(self, prime, cause):
        self.prime = prime
        self.cause = cause
        super().__init__(f"p={prime}: {type(cause).__name__}: {cause}")
