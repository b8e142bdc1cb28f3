"""Exception hierarchy shared by every layer of the toolkit."""


class RenewalKacError(Exception):
    """Base class for all toolkit errors."""


class InvalidLaw(RenewalKacError, ValueError):
    """Parameters do not describe a valid non-negative inter-arrival law."""


class DegenerateLaw(RenewalKacError):
    """The normalizing constant is undefined (zero or infinite variance)."""


class RunawayPath(RenewalKacError):
    """Path construction hit the event safety cap before passing the horizon."""


class QueryBeyondHorizon(RenewalKacError, ValueError):
    pass


class HorizonTooShort(RenewalKacError, ValueError):
    pass


class InsufficientDraws(RenewalKacError, ValueError):
    pass


class TooFewSamples(RenewalKacError, ValueError):
    pass


class GridMismatch(RenewalKacError, ValueError):
    pass


class OverlappingIncrements(RenewalKacError, ValueError):
    pass


class ConfigError(RenewalKacError, ValueError):
    """Experiment configuration failed validation."""
