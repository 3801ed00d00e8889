"""Exception hierarchy. Each class maps to one CLI exit-code category."""


class MacapError(Exception):
    exit_code = 1


class ParseError(MacapError):
    exit_code = 2


class ValidationError(MacapError, ValueError):
    exit_code = 3


class DomainError(ValidationError):
    """Argument outside the mathematical domain of an operation."""


class RefusalError(MacapError):
    """Work estimate exceeds the configured ceiling."""

    exit_code = 4

    def __init__(self, msg, estimate=None):
        super().__init__(msg)
        self.estimate = estimate


class ConvergenceError(MacapError):
    exit_code = 5

    def __init__(self, msg, best_gap=None):
        super().__init__(msg)
        self.best_gap = best_gap


class EvaluationError(MacapError):
    """Objective returned a non-finite value."""

    exit_code = 5

    def __init__(self, msg, point=None):
        super().__init__(msg)
        self.point = point
