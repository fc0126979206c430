"""Exception hierarchy shared by the library and the CLI."""


class AlloyStefError(Exception):
    """Base class for all errors raised by alloystef."""


class DomainError(AlloyStefError, ValueError):
    """Argument outside the domain where a function is defined."""


class PoleError(DomainError):
    """Evaluation too close to a pole of the segregation function."""


class PreconditionError(AlloyStefError, ValueError):
    """Problem data violates an ordering required by an operation."""


class InadmissibleError(AlloyStefError):
    """Boundary data outside the instantaneous-solidification interval."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class BracketError(AlloyStefError):
    """No sign change could be located for a bracketed root search."""


class SolverError(AlloyStefError):
    """Root search did not meet its convergence or residual contract."""


class NoRubinsteinSolutionError(SolverError):
    """The fixed-temperature system has no detectable root for this T1."""


class EquivalenceError(AlloyStefError):
    """The fixed-temperature counterpart of a solved problem failed."""


class MultiplicityWarning(UserWarning):
    """More than one sign change was found in a root scan."""
