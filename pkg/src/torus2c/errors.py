"""Exceptions shared across the package."""


class PreconditionError(ValueError):
    """An operation was called outside its documented domain.

    The command line maps this to exit code 3 so scripted callers can
    distinguish bad math (e.g. epsilon too large for a construction)
    from bad flags.
    """


class ResonanceExhausted(PreconditionError):
    """A resonant-frequency search hit its cap before finding enough terms."""
