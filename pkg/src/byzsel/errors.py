"""Exception types shared across the library."""


class ByzselError(Exception):
    """Base class for all library-specific errors."""


class InvalidValue(ByzselError, ValueError):
    """A box value is negative or otherwise unusable."""


class InvalidThresholds(ByzselError, ValueError):
    """The byzantine count t or the selection size l is out of range."""


class InvalidMarginals(ByzselError, ValueError):
    """A marginal vector leaves the feasible polytope (p in [0,1]^n, sum <= l)."""


class InvalidPrefix(ByzselError, ValueError):
    """A candidate prefix length is outside {t+1, ..., n}."""


class LevelOutOfRange(ByzselError, ValueError):
    """A requested water level lies outside [0, e_max]."""


class UnnormalizedMarginals(InvalidMarginals):
    """Marginals handed to the rounding stage cannot reach mass exactly l."""


class OracleTooLarge(ByzselError, ValueError):
    """An enumeration oracle was asked to handle an instance beyond its guard."""


class DecompositionError(ByzselError, RuntimeError):
    """The greedy decomposition failed to terminate; indicates arithmetic drift."""
