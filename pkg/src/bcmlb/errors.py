"""Exception types raised across the package."""


class BCMError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(BCMError, ValueError):
    pass


class NonErgodicError(BCMError, ValueError):
    """Raised when a bound needs lambda(M) < 1 and it is not."""


class SizeLimitError(BCMError, ValueError):
    """Raised by the exhaustive oracle when an instance is too large to enumerate."""


class UndefinedMeritError(BCMError, ArithmeticError):
    """Raised when a figure of merit would divide by zero."""


class ConfigError(BCMError, ValueError):
    pass
