"""Independent checks of solved instances against the full free-boundary system.

Stefan and boundary conditions use exact derivatives of the similarity
form; only the PDE residuals use finite differences.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import fields, model, solver
from .errors import AlloyStefError, DomainError, EquivalenceError
from .model import Convective, Dirichlet, Flux
from .specfun import erf, erfcx, q_of

PDE_TOL = 1e-5
INTERFACE_TOL = 1e-12
BOUNDARY_TOL = 1e-10
FAR_FIELD_TOL = 1e-10
STEFAN_RTOL = 1e-9
LIMIT_TOL = 1e-6

EQUIV_FRONT_TOL = 1e-9
EQUIV_TK_TOL = 1e-9
EQUIV_FIELD_TOL = 1e-8


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: Optional[float]
    passed: bool
    detail: str = ""

    def as_dict(self):
        return {"name": self.name, "value": self.value, "tolerance": self.tolerance,
                "pass": self.passed, "detail": self.detail}


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)
    flags: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def add(self, name, value, tolerance, passed=None, detail=""):
        value = float(value)
        if passed is None:
            passed = value <= tolerance
        self.checks.append(CheckResult(name, value, tolerance, bool(passed), detail))

    def extend(self, other):
        self.checks.extend(other.checks)
        self.flags.update(other.flags)
        return self

    def get(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failed(self):
        return [c.name for c in self.checks if not c.passed]

    def as_dict(self):
        return {"pass": self.passed, "checks": [c.as_dict() for c in self.checks],
                "flags": dict(self.flags)}


@dataclass(frozen=True)
class GridSpec:
    times: tuple = (0.5, 1.0, 2.0, 10.0)
    n_points: int = 60

    def __post_init__(self):
        if not self.times or any(not (t > 0) for t in self.times):
            raise DomainError("grid times must be a non-empty list of positive values")
        if self.n_points < 50:
            raise DomainError("at least 50 interior points per phase are required")


@dataclass(frozen=True)
class EquivalenceDelta:
    delta_front: float
    delta_Tk: float
    sup_field_delta: float
    original: object = None
    rubinstein: object = None

    @property
    def within_contract(self):
        return (self.delta_front <= EQUIV_FRONT_TOL and self.delta_Tk <= EQUIV_TK_TOL
                and self.sup_field_delta <= EQUIV_FIELD_TOL)

    def as_dict(self):
        return {"delta_front": self.delta_front, "delta_Tk": self.delta_Tk,
                "sup_field_delta": self.sup_field_delta, "within_contract": self.within_contract,
                "contract": {"delta_front": EQUIV_FRONT_TOL, "delta_Tk": EQUIV_TK_TOL,
                             "sup_field_delta": EQUIV_FIELD_TOL}}


def _pde_residual(sol, name, x, t):
    theta = fields.diffusivities(sol)[name]
    h = 1e-4 * math.sqrt(theta * t)
    k = 1e-4 * t
    u = lambda xx, tt: fields.branch_value(sol, name, xx, tt)  # noqa: E731
    u_xx = (u(x + h, t) - 2.0 * u(x, t) + u(x - h, t)) / (h * h)
    u_t = (u(x, t + k) - u(x, t - k)) / (2.0 * k)
    return theta * u_xx - u_t


def _far_point(sol, t):
    fl = fields.diffusivities(sol)
    reach = 12.0 * math.sqrt(max(fl["T_l"], fl["C_l"]) * t)
    return max(40.0 * fields.front_position(sol, t), fields.front_position(sol, t) + reach)


def residual_report(sol, grid=None):
    """Check every line of the free-boundary system on a set of times."""
    grid = grid or GridSpec()
    spec = sol.spec
    m = spec.material
    d = spec.diagram
    bc = spec.bc
    rep = VerificationReport()

    pde = {"T_s": 0.0, "T_l": 0.0, "C_s": 0.0, "C_l": 0.0}
    for t in grid.times:
        s = fields.front_position(sol, t)
        for name in ("T_s", "C_s"):
            h = 1e-4 * math.sqrt(fields.diffusivities(sol)[name] * t)
            for x in np.linspace(2 * h, s - 2 * h, grid.n_points):
                pde[name] = max(pde[name], abs(_pde_residual(sol, name, float(x), t)))
        span = 6.0 * math.sqrt(max(m.liquid.alpha, m.liquid.d) * t)
        for name in ("T_l", "C_l"):
            h = 1e-4 * math.sqrt(fields.diffusivities(sol)[name] * t)
            for x in np.linspace(s + 2 * h, s + span, grid.n_points):
                pde[name] = max(pde[name], abs(_pde_residual(sol, name, float(x), t)))
    for name in ("T_s", "T_l", "C_s", "C_l"):
        rep.add(f"pde_{name}", pde[name], PDE_TOL)

    iface = {"T_s": 0.0, "T_l": 0.0, "C_s": 0.0, "C_l": 0.0}
    C_sol, C_liq = d.solidus(sol.T_k), d.liquidus(sol.T_k)
    for t in grid.times:
        s = fields.front_position(sol, t)
        iface["T_s"] = max(iface["T_s"], abs(fields.branch_value(sol, "T_s", s, t) - sol.T_k))
        iface["T_l"] = max(iface["T_l"], abs(fields.branch_value(sol, "T_l", s, t) - sol.T_k))
        iface["C_s"] = max(iface["C_s"], abs(fields.branch_value(sol, "C_s", s, t) - C_sol))
        iface["C_l"] = max(iface["C_l"], abs(fields.branch_value(sol, "C_l", s, t) - C_liq))
    for name, v in iface.items():
        rep.add(f"interface_{name}", v, INTERFACE_TOL)

    bnd, face, grad_c = 0.0, 0.0, 0.0
    for t in grid.times:
        T_face = fields.branch_value(sol, "T_s", 0.0, t)
        flux = m.solid.k * fields.branch_gradient(sol, "T_s", 0.0, t) * math.sqrt(t)
        if isinstance(bc, Flux):
            err = abs(flux - bc.q0)
        elif isinstance(bc, Convective):
            err = abs(flux - bc.h0 * (T_face - bc.T_inf))
        else:
            err = abs(T_face - bc.T1)
        bnd = max(bnd, err)
        face = max(face, abs(T_face - sol.T_fixed_face))
        grad_c = max(grad_c, abs(fields.branch_gradient(sol, "C_s", 0.0, t)))
    rep.add(f"boundary_{bc.kind}", bnd, BOUNDARY_TOL)
    rep.add("boundary_fixed_face_consistency", face, BOUNDARY_TOL)
    rep.add("boundary_C_s_gradient", grad_c, 0.0)

    far_T, far_C, init_T, init_C = 0.0, 0.0, 0.0, 0.0
    x_fixed = _far_point(sol, 1.0)
    for t in grid.times:
        xf = _far_point(sol, t)
        far_T = max(far_T, abs(fields.branch_value(sol, "T_l", xf, t) - spec.T0))
        far_C = max(far_C, abs(fields.branch_value(sol, "C_l", xf, t) - spec.C0))
    for t in (1e-2, 1e-4, 1e-6):
        init_T = max(init_T, abs(fields.branch_value(sol, "T_l", x_fixed, t) - spec.T0))
        init_C = max(init_C, abs(fields.branch_value(sol, "C_l", x_fixed, t) - spec.C0))
    rep.add("initial_T_l", init_T, FAR_FIELD_TOL)
    rep.add("far_field_T_l", far_T, FAR_FIELD_TOL)
    rep.add("initial_C_l", init_C, FAR_FIELD_TOL)
    rep.add("far_field_C_l", far_C, FAR_FIELD_TOL)

    energy, mass = 0.0, 0.0
    for t in grid.times:
        s = fields.front_position(sol, t)
        ds = fields.front_velocity(sol, t)
        lhs = (m.solid.k * fields.branch_gradient(sol, "T_s", s, t)
               - m.liquid.k * fields.branch_gradient(sol, "T_l", s, t))
        rhs = m.gamma * m.rho * ds
        energy = max(energy, abs(lhs - rhs) / abs(rhs))
        lhs = (m.liquid.d * fields.branch_gradient(sol, "C_l", s, t)
               - m.solid.d * fields.branch_gradient(sol, "C_s", s, t))
        rhs = (d.solidus(sol.T_k) - d.liquidus(sol.T_k)) * ds
        mass = max(mass, abs(lhs - rhs) / abs(rhs))
    rep.add("stefan_energy", energy, STEFAN_RTOL, detail="relative")
    rep.add("stefan_mass", mass, STEFAN_RTOL, detail="relative")
    return rep


def _field_grid(sol, n_x, n_t):
    times = np.geomspace(0.1, 10.0, n_t)
    pts = []
    m = sol.spec.material
    for t in times:
        t = float(t)
        reach = 2.0 * fields.front_position(sol, t) + 6.0 * math.sqrt(
            max(m.liquid.alpha, m.liquid.d) * t)
        pts.extend((float(x), t) for x in np.linspace(0.0, reach, n_x))
    return pts


def equivalence_check(spec, cfg=None, t1_perturbation=0.0, n_x=50, n_t=10):
    """Solve a flux/convective problem and its fixed-temperature counterpart."""
    if isinstance(spec.bc, Dirichlet):
        raise DomainError("equivalence_check needs a flux or convective problem")
    original = solver.solve(spec, cfg)
    T1 = fields.fixed_face_temperature(original) + t1_perturbation
    try:
        rub = solver.solve_dirichlet(spec.with_bc(Dirichlet(T1)), cfg)
    except AlloyStefError as exc:
        raise EquivalenceError(
            f"fixed-temperature solve with T1={T1:.17g} failed after {spec.bc.kind} solve "
            f"(front={original.front_coefficient:.17g}, T_k={original.T_k:.17g}): {exc}"
        ) from exc

    sup = 0.0
    for x, t in _field_grid(original, n_x, n_t):
        for fn in (fields.temperature_at, fields.concentration_at):
            sup = max(sup, abs(fn(original, x, t) - fn(rub, x, t)))
    return EquivalenceDelta(
        delta_front=abs(rub.front_coefficient - original.front_coefficient),
        delta_Tk=abs(rub.T_k - original.T_k),
        sup_field_delta=sup,
        original=original,
        rubinstein=rub,
    )


def erf_mu_bounds_check(dirichlet_sol, origin_bc):
    """Inequalities bounding erf(mu) for a fixed-temperature solution.

    ``origin_bc`` is the flux or convective condition the fixed-face
    temperature was extracted from.
    """
    spec = dirichlet_sol.spec
    m = spec.material
    T_0s, T_0l = model.characteristic_temperatures(spec)
    T1 = spec.bc.T1
    scale = math.sqrt(m.liquid.alpha / m.solid.alpha) * m.solid.k / m.liquid.k * (dirichlet_sol.T_k - T1)
    lower = scale / (spec.T0 - T_0s)
    upper = scale / (spec.T0 - T_0l)
    e = erf(dirichlet_sol.front_coefficient)
    rep = VerificationReport()

    if isinstance(origin_bc, Convective):
        T_inf = origin_bc.T_inf
        lo52 = lower * (T_0s - T_inf) / (T1 - T_inf)
        hi52 = upper * (T_0l - T_inf) / (T1 - T_inf)
        rep.add("convective_erf_lower", e, None, lo52 < e, f"{lo52:.17g} < erf(mu)")
        rep.add("convective_erf_upper", e, None, e < hi52, f"erf(mu) < {hi52:.17g}")
        tag = "reduced_erf"
    elif isinstance(origin_bc, Flux):
        tag = "flux_erf"
    else:
        raise DomainError("origin must be a Flux or Convective boundary condition")
    rep.add(f"{tag}_lower", e, None, lower < e, f"{lower:.17g} < erf(mu)")
    rep.add(f"{tag}_upper", e, None, e < upper, f"erf(mu) < {upper:.17g}")
    rep.flags["physical_meaning"] = bool(upper < 1.0)
    rep.flags["physical_meaning_factor"] = upper
    rep.flags["erf_mu"] = e
    return rep


def c0_interval_check(sol):
    """``f_l(T_fixed_face) <= C0 <= f_l(T0)``."""
    spec = sol.spec
    d = spec.diagram
    rep = VerificationReport()
    C2 = d.liquidus(spec.T0)
    if not (d.T_A <= sol.T_fixed_face <= d.T_B):
        rep.add("c0_interval", spec.C0, None, False,
                f"fixed-face temperature {sol.T_fixed_face!r} outside the diagram")
        return rep
    C1 = d.liquidus(sol.T_fixed_face)
    rep.add("c0_interval", spec.C0, None, C1 <= spec.C0 <= C2, f"[{C1:.17g}, {C2:.17g}]")
    return rep


def _monotone(rep, name, xs, fn, increasing):
    vals = np.array([fn(float(x)) for x in xs])
    steps = np.diff(vals)
    ok = bool(np.all(steps > 0)) if increasing else bool(np.all(steps < 0))
    worst = float(steps.min() if increasing else -steps.max())
    rep.add(f"{name}_{'increasing' if increasing else 'decreasing'}", worst, None, ok,
            "smallest step on the grid")


def _limit(rep, name, got, expected):
    rep.add(name, abs(got - expected), LIMIT_TOL, detail=f"got {got:.17g}, expected {expected:.17g}")


def _diverges(rep, name, got, threshold=1e6):
    rep.add(name, got, None, got > threshold, f"> {threshold:g}")


def monotonicity_suite(spec, n_grid=100, small=1e-10, large=1e7):
    """Grid monotonicity and limit values of the scalar functions for this spec."""
    rep = VerificationReport()
    xs = np.linspace(0.01, 5.0, n_grid)
    m = spec.material
    k_l, a_l, a_s = m.liquid.k, m.liquid.alpha, m.solid.alpha
    T_0s, T_0l = model.characteristic_temperatures(spec)

    _monotone(rep, "erf", xs, erf, True)
    _limit(rep, "erf_limit_0", erf(small), 0.0)
    _limit(rep, "erf_limit_inf", erf(10.0), 1.0)
    _monotone(rep, "Q", xs, q_of, True)
    _limit(rep, "Q_limit_0", q_of(small), 0.0)
    _limit(rep, "Q_limit_inf", q_of(large), 1.0)
    _monotone(rep, "F1", xs, erfcx, False)
    _limit(rep, "F1_limit_0", erfcx(small), 1.0)
    _limit(rep, "F1_limit_inf", erfcx(large), 0.0)

    M = lambda x: solver.eval_M(spec, x)  # noqa: E731
    _monotone(rep, "M", xs, M, False)
    _diverges(rep, "M_limit_0", M(small))
    _limit(rep, "M_limit_inf", M(large), 1.0)

    Ts = np.linspace(T_0s, T_0l, n_grid + 1)[:-1]
    phi = lambda T: spec.diagram.phi(spec.C0, T)  # noqa: E731
    _monotone(rep, "phi", Ts, phi, True)
    _limit(rep, "phi_at_T0s", phi(T_0s), 1.0)
    _diverges(rep, "phi_limit_T0l", phi(T_0l - 1e-9 * (T_0l - T_0s)))

    t_inf = solver.limit_at_infinity(spec)
    bc = spec.bc
    if isinstance(bc, Flux):
        F = lambda x: solver.eval_F(spec, x)  # noqa: E731
        _monotone(rep, "F", xs, F, True)
        _limit(rep, "F_limit_0", F(small), spec.T0 - math.sqrt(math.pi * a_l) * bc.q0 / k_l)
        _limit(rep, "F_limit_inf", F(large), t_inf)
    elif isinstance(bc, Convective):
        F2 = lambda x: solver.eval_F2(spec, x)  # noqa: E731
        H = lambda x: solver.eval_H(spec, x)  # noqa: E731
        W = lambda x: solver.eval_W(spec, x)  # noqa: E731
        _monotone(rep, "F2", xs, F2, False)
        _limit(rep, "F2_limit_0", F2(small), bc.h0 / k_l * math.sqrt(a_l * math.pi))
        _limit(rep, "F2_limit_inf", F2(large), 0.0)
        _monotone(rep, "H", xs, H, False)
        _diverges(rep, "H_limit_0", H(small))
        _limit(rep, "H_limit_inf", H(large), math.sqrt(math.pi * a_s) / math.sqrt(a_l) * k_l)
        _monotone(rep, "W", xs, W, True)
        beta = bc.h0 * math.sqrt(math.pi * a_l) / k_l
        _limit(rep, "W_limit_0", W(small), bc.T_inf + (spec.T0 - bc.T_inf) / (1.0 + beta))
        _limit(rep, "W_limit_inf", W(large), t_inf)
    else:
        G = lambda x: solver.eval_G(spec, x)  # noqa: E731
        _limit(rep, "G_limit_0", G(small), bc.T1)
        _limit(rep, "G_limit_inf", G(large), t_inf)
        vals = np.array([G(float(x)) for x in xs])
        # monotonicity of G is not established, so it is reported rather than gated
        rep.flags["G_increasing_on_grid"] = bool(np.all(np.diff(vals) > 0))
    return rep
