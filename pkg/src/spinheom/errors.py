"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Bad configuration: unparsable input, unphysical parameter, or a
    parameter combination the model rejects (e.g. a Matsubara resonance)."""


class NumericsError(RuntimeError):
    """The integration produced non-finite data or left the regime where
    the requested quantities are defined."""
