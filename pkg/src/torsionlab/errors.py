"""Exception types shared across the package."""


class TorsionLabError(Exception):
    """Base class for all package errors."""


class ConfigError(TorsionLabError, ValueError):
    """Bad ring spec, bad config file, or a size cap was exceeded."""


class CapExceeded(ConfigError):
    """A configured size cap (ring order, universe bound, brute-force width) was exceeded."""


class IsomorphismUndecided(TorsionLabError):
    """The isomorphism search ran out of budget before reaching a verdict."""


class InvariantViolation(TorsionLabError, AssertionError):
    """An internal consistency check failed."""


class UncertifiedInput(TorsionLabError, ValueError):
    """A theorem checker was handed a pair that has not been certified."""
