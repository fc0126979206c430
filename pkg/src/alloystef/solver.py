"""Scalar functions of the similarity systems and their bracketed solution.

Each boundary condition reduces the free-boundary problem to a pair

    T_k = target(x),    M(x) = phi(T_k),

with ``target`` one of F (heat flux), W (convective) or G (fixed
temperature).  Eliminating T_k leaves a scalar root problem in the front
coefficient ``x`` which is solved by plain bisection between a point near 0
(where M blows up) and the point where ``target`` approaches the pole of phi.
"""

import logging
import math
import warnings
from dataclasses import dataclass, field
from functools import partial
from typing import Optional

import numpy as np

from . import model
from .errors import (
    BracketError,
    DomainError,
    InadmissibleError,
    MultiplicityWarning,
    NoRubinsteinSolutionError,
    SolverError,
)
from .model import Convective, Dirichlet, Flux
from .specfun import SQRT_PI, erf, erfc, erfcx, q1_of, q_of

log = logging.getLogger(__name__)

#: Left end of every root bracket; M and the targets are finite here.
ROOT_LOWER = 1e-200
BRACKET_SCAN = np.logspace(-12, 3, 301)
UNIQUENESS_STEP = 1e-3


@dataclass(frozen=True)
class SolverConfig:
    tol_lambda: float = 1e-12
    tol_residual: float = 1e-10
    max_iterations: int = 200
    bracket_margin: float = 1e-9

    def __post_init__(self):
        for name in ("tol_lambda", "tol_residual", "bracket_margin"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive, got {v!r}")
        if self.max_iterations <= 0:
            raise DomainError("max_iterations must be positive")
        if not self.tol_lambda < self.bracket_margin:
            raise DomainError("tol_lambda must be smaller than bracket_margin")


@dataclass(frozen=True)
class SimilaritySolution:
    """Front coefficient, interface temperature and the four field pairs.

    Each pair ``(A, B)`` defines ``A + B * erf(x / (2 sqrt(theta t)))`` with
    theta the diffusivity of that field.
    """

    kind: str
    front_coefficient: float
    T_k: float
    T_fixed_face: float
    T_s: tuple
    T_l: tuple
    C_s: tuple
    C_l: tuple
    spec: model.ProblemSpec
    residuals: dict = field(default_factory=dict)
    x_max: Optional[float] = None
    warnings: tuple = ()

    def summary(self):
        return {
            "kind": self.kind,
            "front_coefficient": self.front_coefficient,
            "T_k": self.T_k,
            "T_fixed_face": self.T_fixed_face,
            "coefficients": {
                "T_s": list(self.T_s),
                "T_l": list(self.T_l),
                "C_s": list(self.C_s),
                "C_l": list(self.C_l),
            },
            "residuals": dict(self.residuals),
            "x_max": self.x_max,
            "warnings": list(self.warnings),
        }


def _ratio_T(spec):
    m = spec.material
    return math.sqrt(m.solid.alpha / m.liquid.alpha)


def _positive_arg(x):
    x = float(x)
    if not (math.isfinite(x) and x > 0):
        raise DomainError(f"argument must be positive, got {x!r}")
    return x


def limit_at_infinity(spec):
    """Common large-x limit of F, W and G: ``T0 + gamma rho alpha_l / k_l``."""
    m = spec.material
    return spec.T0 + m.gamma * m.rho * m.liquid.alpha / m.liquid.k


def eval_M(spec, x):
    """``1 / Q(sqrt(alpha_s / d_l) x)``; decreases from +inf to 1."""
    x = _positive_arg(x)
    m = spec.material
    return 1.0 / q_of(math.sqrt(m.solid.alpha / m.liquid.d) * x)


def eval_F(spec, x, q0=None):
    x = _positive_arg(x)
    m = spec.material
    q0 = spec.bc.q0 if q0 is None else q0
    liq = m.liquid
    c = _ratio_T(spec)
    latent = m.gamma * m.rho * liq.alpha / liq.k * q_of(c * x)
    flux = q0 / liq.k * math.sqrt(liq.alpha * math.pi) * math.exp(-x * x) * erfcx(c * x)
    return spec.T0 + latent - flux


def _conv_denominator(spec, x, h0):
    sol = spec.material.solid
    return sol.k + h0 * math.sqrt(math.pi * sol.alpha) * erf(x)


def eval_F2(spec, x, h0=None):
    x = _positive_arg(x)
    h0 = spec.bc.h0 if h0 is None else h0
    m = spec.material
    c = _ratio_T(spec)
    num = h0 * m.solid.k * math.sqrt(math.pi * m.liquid.alpha) * math.exp(-x * x) * erfcx(c * x)
    return num / (m.liquid.k * _conv_denominator(spec, x, h0))


def eval_H(spec, x, h0=None):
    x = _positive_arg(x)
    h0 = spec.bc.h0 if h0 is None else h0
    m = spec.material
    c = _ratio_T(spec)
    face = h0 * m.solid.k * math.sqrt(math.pi * m.liquid.alpha) * math.exp(-x * x) / (
        x * _conv_denominator(spec, x, h0)
    )
    bulk = m.liquid.k * math.sqrt(math.pi * m.solid.alpha) / (math.sqrt(m.liquid.alpha) * q_of(c * x))
    return face + bulk


def eval_W(spec, x, h0=None, T_inf=None):
    x = _positive_arg(x)
    bc = spec.bc
    h0 = bc.h0 if h0 is None else h0
    T_inf = bc.T_inf if T_inf is None else T_inf
    m = spec.material
    latent = m.gamma * m.rho * math.sqrt(math.pi * m.solid.alpha * m.liquid.alpha)
    return T_inf + (spec.T0 - T_inf) / (eval_F2(spec, x, h0) + 1.0) + latent / eval_H(spec, x, h0)


def eval_G(spec, x, T1=None):
    """Fixed-temperature target in a form that never builds ``exp(x**2)``.

    Numerator and denominator of the textbook expression are divided by
    ``Q1(x)`` (or, when that ratio ``r`` exceeds 1, by ``Q(c x)``).
    """
    x = _positive_arg(x)
    T1 = spec.bc.T1 if T1 is None else T1
    m = spec.material
    a_s, a_l = m.solid.alpha, m.liquid.alpha
    k_s, k_l = m.solid.k, m.liquid.k
    c = _ratio_T(spec)
    qc = q_of(c * x)
    r = c * erfcx(c * x) * math.exp(-x * x) / erf(x)
    latent = m.gamma * m.rho * a_s * a_l
    if r <= 1.0:
        num = latent * qc + T1 * k_s * a_l * r + spec.T0 * k_l * a_s
        den = k_s * a_l * r + k_l * a_s
    else:
        inv = 1.0 / r
        num = latent * qc * inv + T1 * k_s * a_l + spec.T0 * k_l * a_s * inv
        den = k_s * a_l + k_l * a_s * inv
    return num / den


def eval_G_direct(spec, x, T1=None):
    """Literal Q1/Q expression for G; only usable while ``Q1`` is finite."""
    x = _positive_arg(x)
    T1 = spec.bc.T1 if T1 is None else T1
    m = spec.material
    a_s, a_l = m.solid.alpha, m.liquid.alpha
    k_s, k_l = m.solid.k, m.liquid.k
    qc = q_of(_ratio_T(spec) * x)
    q1 = q1_of(x)
    num = m.gamma * m.rho * a_s * a_l * q1 * qc + T1 * k_s * a_l * qc + spec.T0 * k_l * a_s * q1
    return num / (k_s * a_l * qc + k_l * a_s * q1)


def target_function(spec):
    """Return the F/W/G callable matching the boundary condition."""
    if isinstance(spec.bc, Flux):
        return partial(eval_F, spec)
    if isinstance(spec.bc, Convective):
        return partial(eval_W, spec)
    return partial(eval_G, spec)


def find_upper_bracket(spec, target_fn, cfg=None):
    """Locate where the increasing ``target_fn`` reaches ``T_0l`` minus a margin.

    The returned point sits just below the level, so phi stays finite there.
    """
    cfg = cfg or SolverConfig()
    T_0s, T_0l = model.characteristic_temperatures(spec)
    level = T_0l - cfg.bracket_margin * (T_0l - T_0s)
    v0 = target_fn(float(BRACKET_SCAN[0]))
    if v0 >= level:
        raise BracketError(
            f"target(0+) = {v0:.12g} is not below T_0l = {T_0l:.12g}; admissibility gate violated"
        )
    if limit_at_infinity(spec) < level:
        raise BracketError("target(+inf) lies below T_0l; no crossing possible")

    prev = float(BRACKET_SCAN[0])
    hi = None
    for xv in BRACKET_SCAN[1:]:
        xv = float(xv)
        if target_fn(xv) >= level:
            hi = xv
            break
        prev = xv
    if hi is None:
        raise BracketError(f"no crossing of T_0l found in [{BRACKET_SCAN[0]:g}, {BRACKET_SCAN[-1]:g}]")

    lo = prev
    for _ in range(cfg.max_iterations):
        if hi - lo <= cfg.tol_lambda:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if target_fn(mid) < level:
            lo = mid
        else:
            hi = mid
    return lo


def _bisect(fn, lo, hi, cfg, label):
    """Halve ``[lo, hi]`` until it can shrink no further in double precision.

    Returns whichever end has the smaller ``|fn|``.
    """
    f_lo, f_hi = fn(lo), fn(hi)
    if not (f_lo > 0 > f_hi or f_lo < 0 < f_hi):
        raise BracketError(f"{label}: no sign change on [{lo:.6g}, {hi:.6g}] (f = {f_lo:.3g}, {f_hi:.3g})")
    for _ in range(cfg.max_iterations):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = fn(mid)
        if f_mid == 0.0:
            return mid, 0.0
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    if hi - lo > cfg.tol_lambda:
        raise SolverError(
            f"{label}: bisection did not converge in {cfg.max_iterations} iterations; "
            f"bracket [{lo:.17g}, {hi:.17g}], f = ({f_lo:.3e}, {f_hi:.3e})"
        )
    return (lo, f_lo) if abs(f_lo) <= abs(f_hi) else (hi, f_hi)


def _liquid_pairs(spec, coef, T_k):
    m = spec.material
    B_T = (spec.T0 - T_k) / erfc(_ratio_T(spec) * coef)
    C_int = spec.diagram.liquidus(T_k)
    B_C = (spec.C0 - C_int) / erfc(math.sqrt(m.solid.alpha / m.liquid.d) * coef)
    return (spec.T0 - B_T, B_T), (spec.C0 - B_C, B_C)


def solid_temperature_pair(spec, coef, T_k):
    """Solid temperature ``(A, B)`` implied by the boundary condition."""
    bc = spec.bc
    sol = spec.material.solid
    e = erf(coef)
    if isinstance(bc, Flux):
        B = bc.q0 * math.sqrt(math.pi * sol.alpha) / sol.k
        return T_k - B * e, B
    if isinstance(bc, Convective):
        K = _conv_denominator(spec, coef, bc.h0)
        B = bc.h0 * math.sqrt(math.pi * sol.alpha) * (T_k - bc.T_inf) / K
        A = bc.T_inf + sol.k * (T_k - bc.T_inf) / K
        return A, B
    return bc.T1, (T_k - bc.T1) / e


def fixed_face_formula(spec, coef, T_k):
    """Face temperature from the closed-form expression for each condition."""
    bc = spec.bc
    sol = spec.material.solid
    if isinstance(bc, Flux):
        return T_k - bc.q0 / sol.k * math.sqrt(sol.alpha * math.pi) * erf(coef)
    if isinstance(bc, Convective):
        g = bc.h0 * math.sqrt(math.pi * sol.alpha) * erf(coef)
        return T_k - g * (T_k - bc.T_inf) / (sol.k + g)
    return bc.T1


def build_solution(spec, coef, T_k, residuals=None, x_max=None, notes=()):
    """Assemble a :class:`SimilaritySolution` from ``(coef, T_k)``."""
    T_s = solid_temperature_pair(spec, coef, T_k)
    T_l, C_l = _liquid_pairs(spec, coef, T_k)
    C_s = (spec.diagram.solidus(T_k), 0.0)
    return SimilaritySolution(
        kind=spec.bc.kind,
        front_coefficient=coef,
        T_k=T_k,
        T_fixed_face=fixed_face_formula(spec, coef, T_k),
        T_s=T_s,
        T_l=T_l,
        C_s=C_s,
        C_l=C_l,
        spec=spec,
        residuals=dict(residuals or {}),
        x_max=x_max,
        warnings=tuple(notes),
    )


def system_residuals(spec, coef, T_k):
    """Residuals of both equations of the coupled system.

    ``segregation`` is ``|M - phi(T_k)|``; ``segregation_scaled`` divides it by
    ``max(1, M)``; ``segregation_temperature`` is ``|phi^-1(M) - T_k|``.
    Close to the lower gate phi is huge and steep, so only the temperature
    form stays well conditioned; it is the one the solver contract uses.
    """
    target = target_function(spec)
    M = eval_M(spec, coef)
    d = spec.diagram
    seg = abs(M - d.phi(spec.C0, T_k))
    return {
        "interface_temperature": abs(T_k - target(coef)),
        "segregation": seg,
        "segregation_scaled": seg / max(1.0, M),
        "segregation_temperature": abs(d.inv_phi(spec.C0, M) - T_k),
    }


def contract_residual(res):
    return max(res["interface_temperature"], res["segregation_temperature"])


def reduced_equation(spec):
    """``x -> M(x) - phi(target(x))``, the scalar equation for the front coefficient."""
    target = target_function(spec)
    phi = spec.diagram.phi
    C0 = spec.C0

    def g(x):
        return eval_M(spec, x) - phi(C0, target(x))

    return g


def _solve(spec, cfg, label):
    cfg = cfg or SolverConfig()
    report = model.check_admissibility(spec)
    if not report.admissible:
        raise InadmissibleError(
            f"{label}: boundary datum {report.actual!r} outside the open interval "
            f"({report.lower_bound:.12g}, {report.upper_bound:.12g})",
            report,
        )
    target = target_function(spec)
    x_max = find_upper_bracket(spec, target, cfg)
    g = reduced_equation(spec)
    coef, _ = _bisect(g, ROOT_LOWER, x_max, cfg, label)
    T_k = target(coef)
    res = system_residuals(spec, coef, T_k)
    worst = contract_residual(res)
    if worst > cfg.tol_residual:
        raise SolverError(f"{label}: residual {worst:.3e} exceeds {cfg.tol_residual:.1e} at x={coef:.17g}")
    log.debug("%s: coef=%.17g T_k=%.17g residuals=%s", label, coef, T_k, res)
    return coef, T_k, res, x_max


def solve_flux(spec, cfg=None):
    if not isinstance(spec.bc, Flux):
        raise DomainError("solve_flux needs a Flux boundary condition")
    coef, T_k, res, x_max = _solve(spec, cfg, "flux")
    return build_solution(spec, coef, T_k, res, x_max)


def solve_convective(spec, cfg=None):
    if not isinstance(spec.bc, Convective):
        raise DomainError("solve_convective needs a Convective boundary condition")
    coef, T_k, res, x_max = _solve(spec, cfg, "convective")
    return build_solution(spec, coef, T_k, res, x_max)


def count_sign_changes(fn, xs):
    signs = [v > 0 for v in (fn(float(x)) for x in xs)]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def solve_dirichlet(spec, cfg=None):
    """Fixed-temperature solve; G is not known to be monotone, so the bracket
    is confirmed by a sign change and scanned afterwards for extra roots."""
    if not isinstance(spec.bc, Dirichlet):
        raise DomainError("solve_dirichlet needs a Dirichlet boundary condition")
    try:
        coef, T_k, res, x_max = _solve(spec, cfg, "dirichlet")
    except BracketError as exc:
        raise NoRubinsteinSolutionError(f"no Rubinstein solution detected for this T1: {exc}") from exc

    g = reduced_equation(spec)
    grid = np.concatenate([[ROOT_LOWER], np.arange(UNIQUENESS_STEP, x_max, UNIQUENESS_STEP), [x_max]])
    changes = count_sign_changes(g, grid)
    notes = ()
    if changes > 1:
        msg = f"{changes} sign changes of M - phi(G) on (0, {x_max:.6g}); root may not be unique"
        warnings.warn(msg, MultiplicityWarning, stacklevel=2)
        notes = (msg,)
    return build_solution(spec, coef, T_k, res, x_max, notes)


def solve(spec, cfg=None):
    if isinstance(spec.bc, Flux):
        return solve_flux(spec, cfg)
    if isinstance(spec.bc, Convective):
        return solve_convective(spec, cfg)
    return solve_dirichlet(spec, cfg)
