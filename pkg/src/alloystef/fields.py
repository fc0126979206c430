"""Closed-form temperature and concentration fields of a solved instance."""

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError
from .solver import fixed_face_formula
from .specfun import erf, erf_derivative

INTERFACE_BAND = 1e-12


@dataclass(frozen=True)
class ProfileSample:
    t: float
    x: float
    region: str
    T: float
    C: float
    # solid-side concentration, only set on the interface where C jumps
    C_solid_side: Optional[float] = None


def _check_t(t):
    t = float(t)
    if not (math.isfinite(t) and t > 0):
        raise DomainError(f"time must be positive, got {t!r}")
    return t


def _check_x(x):
    x = float(x)
    if not (math.isfinite(x) and x >= 0):
        raise DomainError(f"position must be non-negative, got {x!r}")
    return x


def diffusivities(sol):
    """Diffusivity attached to each field pair, keyed like the solution attributes."""
    m = sol.spec.material
    return {"T_s": m.solid.alpha, "T_l": m.liquid.alpha, "C_s": m.solid.d, "C_l": m.liquid.d}


def front_position(sol, t):
    t = _check_t(t)
    return 2.0 * sol.front_coefficient * math.sqrt(sol.spec.material.solid.alpha * t)


def front_velocity(sol, t):
    t = _check_t(t)
    return sol.front_coefficient * math.sqrt(sol.spec.material.solid.alpha / t)


def branch_value(sol, name, x, t):
    """Evaluate one similarity branch (``"T_s"``, ``"T_l"``, ``"C_s"``, ``"C_l"``)
    at ``(x, t)`` regardless of which phase occupies that point."""
    A, B = getattr(sol, name)
    theta = diffusivities(sol)[name]
    return A + B * erf(x / (2.0 * math.sqrt(theta * t)))


def branch_gradient(sol, name, x, t):
    """Exact x-derivative of a branch."""
    _, B = getattr(sol, name)
    theta = diffusivities(sol)[name]
    w = 2.0 * math.sqrt(theta * t)
    return B * erf_derivative(x / w) / w


def _band(s):
    return INTERFACE_BAND * max(1.0, s)


def region_of(sol, x, t):
    s = front_position(sol, t)
    if abs(x - s) <= _band(s):
        return "interface"
    return "solid" if x < s else "liquid"


def temperature_at(sol, x, t):
    x, t = _check_x(x), _check_t(t)
    region = region_of(sol, x, t)
    if region == "interface":
        return sol.T_k
    return branch_value(sol, "T_s" if region == "solid" else "T_l", x, t)


def concentration_at(sol, x, t):
    """Concentration; on the interface the liquid-side value ``f_l(T_k)``."""
    x, t = _check_x(x), _check_t(t)
    region = region_of(sol, x, t)
    if region == "interface":
        return sol.spec.diagram.liquidus(sol.T_k)
    return branch_value(sol, "C_s" if region == "solid" else "C_l", x, t)


def fixed_face_temperature(sol):
    return fixed_face_formula(sol.spec, sol.front_coefficient, sol.T_k)


def sample_profile(sol, times, x_max, n_x):
    """Uniform x-grid on ``[0, x_max]`` per time plus the exact front position."""
    times = [_check_t(t) for t in times]
    if not times:
        raise DomainError("sample_profile needs at least one time")
    if not (x_max > 0):
        raise DomainError(f"x_max must be positive, got {x_max!r}")
    if int(n_x) < 2:
        raise DomainError(f"n_x must be at least 2, got {n_x!r}")
    n_x = int(n_x)
    out = []
    for t in sorted(times):
        s = front_position(sol, t)
        xs = [x_max * i / (n_x - 1) for i in range(n_x)]
        if s not in xs:
            xs.append(s)
        for x in sorted(xs):
            region = region_of(sol, x, t)
            solid_side = sol.spec.diagram.solidus(sol.T_k) if region == "interface" else None
            out.append(ProfileSample(t, x, region, temperature_at(sol, x, t),
                                     concentration_at(sol, x, t), solid_side))
    return out
