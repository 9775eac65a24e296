"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside its mathematical domain."""


class NonCausalAR(ValueError):
    """The autoregressive polynomial has a root in the closed unit disk."""


class DegenerateWeights(ValueError):
    """All weights are zero, so normalized ratios are undefined."""


class MissingInnovations(ValueError):
    """A sample path does not carry its innovation record."""


class NoConvergence(RuntimeError):
    """An iterative solver exhausted its iteration budget."""


class InsufficientSamples(ValueError):
    """Too few samples for the requested statistic."""


class DegeneratePeriodogram(ValueError):
    """A periodogram ordinate needed by an estimator is zero."""


class ParseError(ValueError):
    """Configuration text is not well formed."""


class ValidationError(ValueError):
    """Configuration is well formed but semantically invalid."""
