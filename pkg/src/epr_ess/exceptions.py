"""Exception types raised by the library."""


class InvalidBoxError(ValueError):
    """A probability box failed normalization, no-signaling or range checks."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class AsymmetricGameError(ValueError):
    """ESS analysis was requested on a payoff table that is not symmetric."""


class InfeasibleError(ValueError):
    """A construction produced probabilities outside [0, 1].

    ``violations`` lists ``(name, value)`` pairs for every offending entry.
    """

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class UndefinedEmbeddingError(ValueError):
    """The embedding ratio is undefined because omega1 vanishes."""
