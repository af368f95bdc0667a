"""Exception types shared across the package."""


class MicrorevError(Exception):
    """Base class for every error this package raises on purpose."""


class DomainError(MicrorevError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class TruncationTooSmall(MicrorevError):
    """A Fock cutoff leaves more tail mass than the requested budget.

    Carries the measured (or estimated) tail and the budget it violated so
    callers can decide how much to enlarge the cutoff.
    """

    def __init__(self, message: str, tail_mass: float | None = None,
                 budget: float | None = None):
        super().__init__(message)
        self.tail_mass = tail_mass
        self.budget = budget


class ZeroBackwardProbability(MicrorevError):
    """The backward transition probability underflowed to exactly zero."""


class DegenerateData(MicrorevError):
    """A sample set carries no spread, so a scale cannot be fitted."""


class NumericalUnderflow(MicrorevError):
    """An evaluation point sits so far in a fitted tail that the density
    value would be dominated by estimation error rather than signal."""
