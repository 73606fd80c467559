class DistinguishError(Exception):
    """Base class for errors raised by this package."""


class BudgetExceededError(DistinguishError):
    """A requested dense construction is larger than the configured cap."""


class NumericDegeneracyError(DistinguishError):
    """Gram-Schmidt ran out of independent vectors where one was required."""


class TransformMismatchError(DistinguishError):
    """A Schur-Weyl transform was used with objects of a different (N, d)."""


class SizeCapError(DistinguishError):
    """A permanent or oracle evaluation exceeds its size cap."""


class InternalConsistencyError(DistinguishError):
    """A computed quantity violated an invariant by more than rounding."""


class CacheError(DistinguishError):
    pass


class CacheMissingError(CacheError, FileNotFoundError):
    pass


class CacheChecksumError(CacheError):
    pass


class CacheVersionError(CacheError):
    pass
