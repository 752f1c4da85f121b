"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DimensionError(ValueError):
    """Matrix or vector shapes do not agree."""


class ConvergenceError(RuntimeError):
    """An iterative routine hit its iteration cap."""


class ScenarioError(ValueError):
    """A scenario failed validation.

    All violations are collected before raising so callers can report
    every problem at once.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid scenario")
