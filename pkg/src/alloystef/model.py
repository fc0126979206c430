"""Problem data and the admissibility gates for instantaneous solidification."""

import math
from dataclasses import dataclass
from typing import Optional, Union

from .errors import DomainError, PreconditionError
from .phase_diagram import PhaseDiagram


def _positive(name, value):
    value = float(value)
    if not (math.isfinite(value) and value > 0.0):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return value


@dataclass(frozen=True)
class PhaseProperties:
    """Transport coefficients of one phase."""

    k: float
    alpha: float
    d: float

    def __post_init__(self):
        for name in ("k", "alpha", "d"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))


@dataclass(frozen=True)
class Material:
    solid: PhaseProperties
    liquid: PhaseProperties
    rho: float
    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "rho", _positive("rho", self.rho))
        object.__setattr__(self, "gamma", _positive("gamma", self.gamma))


@dataclass(frozen=True)
class Flux:
    """Heat extracted as ``q0 / sqrt(t)`` through the fixed face."""

    q0: float
    kind = "flux"

    def __post_init__(self):
        object.__setattr__(self, "q0", _positive("q0", self.q0))


@dataclass(frozen=True)
class Convective:
    """Newton cooling ``h0 / sqrt(t) * (T(0, t) - T_inf)`` at the fixed face."""

    h0: float
    T_inf: float
    kind = "convective"

    def __post_init__(self):
        object.__setattr__(self, "h0", _positive("h0", self.h0))
        if not math.isfinite(self.T_inf):
            raise DomainError("T_inf must be finite")


@dataclass(frozen=True)
class Dirichlet:
    """Fixed temperature ``T1`` at the face."""

    T1: float
    kind = "dirichlet"

    def __post_init__(self):
        if not math.isfinite(self.T1):
            raise DomainError("T1 must be finite")


BoundaryCondition = Union[Flux, Convective, Dirichlet]


@dataclass(frozen=True)
class ProblemSpec:
    material: Material
    diagram: PhaseDiagram
    T0: float
    C0: float
    bc: BoundaryCondition

    def __post_init__(self):
        d = self.diagram
        if not (d.T_A < self.T0 < d.T_B):
            raise DomainError(f"T_A < T0 < T_B violated: T_A={d.T_A}, T0={self.T0}, T_B={d.T_B}")
        c_lo, c_hi = d.concentration_range()
        if not (c_lo < self.C0 < c_hi):
            raise DomainError(
                f"C0 must lie strictly inside the concentration range ({c_lo}, {c_hi}), got {self.C0}"
            )
        if not self.C0 < d.liquidus(self.T0):
            raise DomainError(
                f"initially liquid requires C0 < f_l(T0): C0={self.C0}, f_l(T0)={d.liquidus(self.T0)}"
            )

    def with_bc(self, bc):
        return ProblemSpec(self.material, self.diagram, self.T0, self.C0, bc)


@dataclass(frozen=True)
class AdmissibilityReport:
    kind: str
    lower_bound: float
    upper_bound: float
    actual: Optional[float]
    admissible: bool
    T_0l: float
    T_0s: float

    def as_dict(self):
        return {
            "kind": self.kind,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "actual": self.actual,
            "admissible": self.admissible,
            "T_0l": self.T_0l,
            "T_0s": self.T_0s,
        }


def characteristic_temperatures(spec):
    """Return ``(T_0s, T_0l)``: the solidus and liquidus temperatures of C0."""
    d = spec.diagram
    return d.inv_solidus(spec.C0), d.inv_liquidus(spec.C0)


def flux_bounds(spec):
    T_0s, T_0l = characteristic_temperatures(spec)
    liq = spec.material.liquid
    scale = liq.k / math.sqrt(math.pi * liq.alpha)
    return (spec.T0 - T_0l) * scale, (spec.T0 - T_0s) * scale


def check_admissibility_flux(spec):
    if not isinstance(spec.bc, Flux):
        raise PreconditionError("flux gate needs a Flux boundary condition")
    T_0s, T_0l = characteristic_temperatures(spec)
    lower, upper = flux_bounds(spec)
    q0 = spec.bc.q0
    return AdmissibilityReport("flux", lower, upper, q0, lower < q0 < upper, T_0l, T_0s)


def convective_bounds(spec, T_inf):
    T_0s, T_0l = characteristic_temperatures(spec)
    if not T_inf < T_0s:
        raise PreconditionError(
            f"convective gate needs T_inf < T_0s < T_0l (got T_inf={T_inf}, T_0s={T_0s})"
        )
    liq = spec.material.liquid
    scale = liq.k / math.sqrt(math.pi * liq.alpha)
    lower = (spec.T0 - T_0l) * scale / (T_0l - T_inf)
    upper = (spec.T0 - T_0s) * scale / (T_0s - T_inf)
    return lower, upper


def check_admissibility_convective(spec):
    if not isinstance(spec.bc, Convective):
        raise PreconditionError("convective gate needs a Convective boundary condition")
    T_0s, T_0l = characteristic_temperatures(spec)
    lower, upper = convective_bounds(spec, spec.bc.T_inf)
    h0 = spec.bc.h0
    return AdmissibilityReport("convective", lower, upper, h0, lower < h0 < upper, T_0l, T_0s)


def check_admissibility_dirichlet(spec):
    """Gate ``T_A < T1 < T_0l``; the solver's sign-change search has the final say."""
    if not isinstance(spec.bc, Dirichlet):
        raise PreconditionError("dirichlet gate needs a Dirichlet boundary condition")
    T_0s, T_0l = characteristic_temperatures(spec)
    lower, upper = spec.diagram.T_A, T_0l
    T1 = spec.bc.T1
    return AdmissibilityReport("dirichlet", lower, upper, T1, lower < T1 < upper, T_0l, T_0s)


def check_admissibility(spec):
    if isinstance(spec.bc, Flux):
        return check_admissibility_flux(spec)
    if isinstance(spec.bc, Convective):
        return check_admissibility_convective(spec)
    return check_admissibility_dirichlet(spec)
