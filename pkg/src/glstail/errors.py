"""Exception hierarchy shared by all glstail modules."""


class GLSTailError(Exception):
    """Base class for every error raised by glstail."""


class DomainError(GLSTailError, ValueError):
    """A parameter domain is invalid, empty, or a query falls outside it."""


class NonFiniteError(GLSTailError, ArithmeticError):
    """A quantity that must be finite (h(p), a norm ratio, a moment) is not."""


class EmptySliceError(GLSTailError, ValueError):
    """The slice R(p) of a transfer kernel is empty at the requested p."""


class DivergenceError(GLSTailError, ArithmeticError):
    """A moment integral does not converge within the configured cutoff."""


class SpecParseError(GLSTailError, ValueError):
    """A textual description of a generating function, oracle or kernel is malformed."""
