"""Exception types raised by the toolkit.

Every error derives from :class:`CoherenceError`, and the ones that signal
bad arguments also derive from :class:`ValueError` so callers can catch them
the usual way.
"""


class CoherenceError(Exception):
    """Base class for all toolkit errors."""


class NotHermitian(CoherenceError, ValueError):
    pass


class NoConvergence(CoherenceError, ArithmeticError):
    pass


class NotPositive(CoherenceError, ValueError):
    """An operator that must be PSD has a negative eigenvalue.

    ``where`` names the offending element, e.g. ``(b, n)`` for a MUM element
    or ``k`` for a general SIC element; ``min_eig`` is its smallest eigenvalue.
    """

    def __init__(self, message, t=None, where=None, min_eig=None):
        super().__init__(message)
        self.t = t
        self.where = where
        self.min_eig = min_eig


class DimMismatch(CoherenceError, ValueError):
    pass


class BadDim(CoherenceError, ValueError):
    pass


class BadRank(CoherenceError, ValueError):
    pass


class BadCount(CoherenceError, ValueError):
    pass


class BadAlpha(CoherenceError, ValueError):
    pass


class BadKappa(CoherenceError, ValueError):
    pass


class BadA(CoherenceError, ValueError):
    pass


class ZeroT(CoherenceError, ValueError):
    pass


class BracketFailure(CoherenceError, ArithmeticError):
    pass


class NotPrime(CoherenceError, ValueError):
    pass


class Unsupported(CoherenceError, NotImplementedError):
    pass
