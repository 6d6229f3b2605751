class BCPError(Exception):
    """Base class for all library errors."""


class DomainError(BCPError, ValueError):
    """An argument lies outside the domain of the requested quantity."""


class CapacityError(BCPError, ValueError):
    """A size guard (sieve limit, oracle scale, counting range) was exceeded."""


class PreconditionError(BCPError, ValueError):
    """Parameters violate the hypotheses an operation is defined for."""


class CacheFormatError(BCPError):
    """A prime cache file failed validation."""


class VerificationError(BCPError):
    def __init__(self, module: str, invariant: str, witness: object):
        self.module = module
        self.invariant = invariant
        self.witness = witness
        super().__init__(f"[{module}] {invariant} violated: {witness!r}")
