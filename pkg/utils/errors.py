"""
Error types
All errors subclass ValueError so callers catching ValueError keep working.
"""


class LMomentError(ValueError):
    """Base class for every error raised by lmoment"""


class DomainError(LMomentError):
    """A precondition on the arguments is violated"""


class RangeError(LMomentError):
    """Not enough stored data, or a size cap was exceeded"""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class DataError(LMomentError):
    """An eigenvalue sequence violates one of its invariants"""

    def __init__(self, message, n=None, invariant=None):
        super().__init__(message)
        self.n = n
        self.invariant = invariant


class CoefficientParseError(LMomentError):
    """A coefficient file does not follow the line format"""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class ConfigError(LMomentError):
    """Invalid run or ladder configuration"""
