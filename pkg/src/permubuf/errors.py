"""Exception hierarchy. The CLI maps each family onto one exit code."""


class PermubufError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(PermubufError, ValueError):
    pass


class InvalidPermutationError(PermubufError, ValueError):
    pass


class ScheduleFormatError(PermubufError, ValueError):
    """A schedule file or JSON document could not be parsed."""


class InvalidComparisonError(PermubufError, ValueError):
    pass


class ExactArithmeticError(PermubufError, ArithmeticError):
    """An exact count would not fit the fixed-width integers of the kernels."""


class InfeasibleError(PermubufError):
    """Base for refusals on cost grounds (exit code 3)."""


class EnumerationInfeasibleError(InfeasibleError):
    pass


class StateSpaceInfeasibleError(InfeasibleError):
    pass


class CostRefusalError(InfeasibleError):
    def __init__(self, message: str, estimate: int):
        super().__init__(message)
        self.estimate = estimate
