"""Exception types shared across the engine.

The split mirrors the CLI exit-code contract: configuration/geometry problems
are ValidationError (exit 3), quadratures that miss their certified budget are
AccuracyError (exit 4), and everything a module cannot do by design is
CapabilityError.
"""


class DomainError(ValueError):
    """An argument is outside the mathematical domain (e.g. t <= 0)."""


class CapabilityError(ValueError):
    """The input lacks data the operation requires (e.g. no decay rate, no signs)."""


class ValidationError(ValueError):
    """A geometry or configuration record violates its invariants."""


class AccuracyError(RuntimeError):
    """A quadrature or truncation failed to meet its certified error budget."""


class ConditioningError(RuntimeError):
    """A linear-algebra step is too ill-conditioned to trust (fit or resolvent)."""
