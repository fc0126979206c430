"""Explicit similarity solutions for two-phase binary-alloy solidification.

Heat-flux, convective and fixed-temperature conditions at the fixed face,
the admissibility gates for instantaneous solidification, closed-form
fields and independent verification of solved instances.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AlloyStefError,
    BracketError,
    DomainError,
    EquivalenceError,
    InadmissibleError,
    MultiplicityWarning,
    NoRubinsteinSolutionError,
    PoleError,
    PreconditionError,
    SolverError,
)
from .model import (  # noqa: E402
    Convective,
    Dirichlet,
    Flux,
    Material,
    PhaseProperties,
    ProblemSpec,
    characteristic_temperatures,
    check_admissibility,
)
from .phase_diagram import PowerLawDiagram, TabulatedDiagram  # noqa: E402
from .solver import SimilaritySolution, SolverConfig, solve  # noqa: E402
