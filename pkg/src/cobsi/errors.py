"""Exception hierarchy shared across the toolkit."""


class CobsiError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(CobsiError, ValueError):
    """Array shapes or counts do not agree."""


class DegenerateRangeError(CobsiError, ValueError):
    """A normalization range collapsed to a single value."""


class DomainError(CobsiError, ValueError):
    """A coordinate lies outside the normalized acquisition domain."""


class EmptyQueryError(CobsiError, ValueError):
    """An operation that needs at least one missing shot received none."""


class NumericalError(CobsiError, ArithmeticError):
    """A solver produced non-finite values."""


class FormatError(CobsiError, ValueError):
    """A file does not follow its declared on-disk layout."""


class ConfigError(CobsiError, ValueError):
    """An experiment configuration is incomplete or inconsistent."""
