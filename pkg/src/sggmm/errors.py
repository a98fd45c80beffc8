"""Exception types shared across the package."""


class GGMMError(Exception):
    """Base class for all estimation and I/O errors raised by sggmm."""


class InvalidInput(GGMMError, ValueError):
    pass


class DimensionMismatch(GGMMError, ValueError):
    pass


class NotPositiveDefinite(GGMMError, ArithmeticError):
    pass


class DegenerateResponsibility(GGMMError, ArithmeticError):
    pass


class ClusterCollapse(GGMMError):
    """A component's total responsibility fell below the collapse floor."""

    def __init__(self, message, mass=None):
        super().__init__(message)
        self.mass = mass


class NotConverged(GGMMError):
    """Iteration budget exhausted. ``solution`` holds the last iterate, if any."""

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


class ParseError(GGMMError, ValueError):
    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row
