import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alloystef.errors import (
    BracketError,
    DomainError,
    InadmissibleError,
    MultiplicityWarning,
    NoRubinsteinSolutionError,
    SolverError,
)
from alloystef.model import Convective, Dirichlet, Flux, convective_bounds, flux_bounds
from alloystef.solver import (
    SolverConfig,
    build_solution,
    contract_residual,
    count_sign_changes,
    eval_F,
    eval_G,
    eval_G_direct,
    eval_M,
    eval_W,
    limit_at_infinity,
    reduced_equation,
    solve,
    solve_dirichlet,
    solve_flux,
    system_residuals,
    target_function,
)

import oracles
from conftest import REF_CONV, REF_DIR, REF_FLUX, ref_spec

# front coefficient and interface temperature from the 60-digit oracle
FLUX_REF = (0.0552000756180287434713685546816, 0.476490239877999)
CONV_REF = (0.083053557264646578, 0.46536986060164021)
DIR_REF = (0.16364544344896794, 0.43605633650674724)


def test_flux_oracle_sign_checks_bracket_root():
    assert oracles.flux_g(0.05) > 0
    assert oracles.flux_g(0.06) < 0
    # dense scan below the point where F reaches T_0l (x ~ 0.0667, phi's pole)
    xs = np.linspace(1e-4, 0.066, 400)
    vals = [oracles.flux_g(x) for x in xs]
    assert sum(1 for a, b in zip(vals, vals[1:]) if (a > 0) != (b > 0)) == 1


@pytest.mark.parametrize("bc, ref", [(REF_FLUX, FLUX_REF), (REF_CONV, CONV_REF), (REF_DIR, DIR_REF)])
def test_reference_solutions_match_oracle(bc, ref):
    sol = solve(ref_spec(bc))
    assert sol.front_coefficient == pytest.approx(ref[0], rel=1e-13)
    assert sol.T_k == pytest.approx(ref[1], abs=1e-13)
    for key in ("interface_temperature", "segregation", "segregation_scaled", "segregation_temperature"):
        assert sol.residuals[key] <= 1e-10, key


def test_flux_front_in_unit_interval_bracket():
    lam = solve_flux(ref_spec(REF_FLUX)).front_coefficient
    assert 0.05 < lam < 0.06


def test_dirichlet_oracle_root():
    coef, Tk = oracles.root_of(oracles.dir_target, 0.1, 0.2)
    sol = solve(ref_spec(REF_DIR))
    assert abs(sol.front_coefficient - float(coef)) <= 1e-14
    assert sol.T_fixed_face == 0.3


def test_target_functions_match_oracle():
    f, c, d = ref_spec(REF_FLUX), ref_spec(REF_CONV), ref_spec(REF_DIR)
    for x in (1e-3, 0.05, 0.3, 1.0, 2.5):
        F_ref = 0.8 + oracles.q_ref(x) - 0.25 * math.sqrt(math.pi) * oracles.erfc_ref(x)
        assert eval_F(f, x) == pytest.approx(float(F_ref), abs=1e-14)
        assert eval_W(c, x) == pytest.approx(float(oracles.conv_target(x)), abs=1e-14)
        assert eval_G(d, x) == pytest.approx(float(oracles.dir_target(x)), abs=1e-14)


@pytest.mark.parametrize("x", [1e-8, 0.01, 0.5, 1.0, 3.0, 5.0, 10.0, 25.0])
def test_g_ratio_form_matches_direct(x):
    s = ref_spec(REF_DIR)
    assert eval_G(s, x) == pytest.approx(eval_G_direct(s, x), rel=1e-13)


def test_g_is_finite_where_direct_form_overflows():
    s = ref_spec(REF_DIR)
    for x in (30.0, 100.0, 1e3, 1e7):
        v = eval_G(s, x)
        assert math.isfinite(v) and v < limit_at_infinity(s)
    with pytest.raises(DomainError):
        eval_G_direct(s, 30.0)


def test_limits_at_infinity():
    for bc in (REF_FLUX, REF_CONV, REF_DIR):
        s = ref_spec(bc)
        assert target_function(s)(1e7) == pytest.approx(1.8, abs=1e-6)


def test_limits_at_thirty_are_not_yet_converged():
    # Q(30) = 1 - 5.5e-4, so the targets at x = 30 sit visibly below 1.8
    assert eval_G(ref_spec(REF_DIR), 30.0) == pytest.approx(1.79945, abs=1e-5)


def test_m_limits():
    s = ref_spec(REF_FLUX)
    assert eval_M(s, 1e-12) > 1e11
    assert eval_M(s, 1e7) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("which", [0, 1])
def test_gate_boundaries_are_refused(which):
    q0 = flux_bounds(ref_spec(REF_FLUX))[which]
    with pytest.raises(InadmissibleError) as info:
        solve(ref_spec(Flux(q0)))
    assert info.value.report is not None and not info.value.report.admissible


def test_convective_outside_gate_refused():
    hi = convective_bounds(ref_spec(REF_FLUX), 0.0)[1]
    with pytest.raises(InadmissibleError):
        solve(ref_spec(Convective(hi * 1.01, 0.0)))


def test_dirichlet_above_liquidus_refused():
    with pytest.raises(InadmissibleError):
        solve(ref_spec(Dirichlet(0.55)))


def test_dirichlet_just_below_liquidus_has_no_bracket():
    with pytest.raises(NoRubinsteinSolutionError):
        solve_dirichlet(ref_spec(Dirichlet(0.5 - 1e-12)))


def test_solver_rejects_wrong_condition():
    with pytest.raises(DomainError):
        solve_flux(ref_spec(REF_DIR))


def test_solver_config_validation():
    with pytest.raises(DomainError):
        SolverConfig(tol_lambda=0.0)
    with pytest.raises(DomainError):
        SolverConfig(max_iterations=0)
    with pytest.raises(DomainError):
        SolverConfig(tol_lambda=1e-6, bracket_margin=1e-9)


def test_iteration_cap_reports_failure():
    with pytest.raises(SolverError, match="did not converge"):
        solve(ref_spec(REF_FLUX), SolverConfig(max_iterations=5, tol_lambda=1e-12))


def test_reference_dirichlet_root_is_unique():
    with warnings.catch_warnings():
        warnings.simplefilter("error", MultiplicityWarning)
        sol = solve(ref_spec(REF_DIR))
    assert sol.warnings == ()
    g = reduced_equation(ref_spec(REF_DIR))
    assert count_sign_changes(g, np.linspace(1e-6, sol.x_max, 2000)) == 1


def test_count_sign_changes():
    assert count_sign_changes(math.sin, np.linspace(0.1, 10.0, 1000)) == 3


def test_summary_contents():
    sol = solve(ref_spec(REF_FLUX))
    d = sol.summary()
    assert d["kind"] == "flux"
    assert set(d["coefficients"]) == {"T_s", "T_l", "C_s", "C_l"}
    assert d["T_fixed_face"] == sol.T_fixed_face


def test_build_solution_is_consistent_with_residuals():
    s = ref_spec(REF_FLUX)
    sol = solve(s)
    rebuilt = build_solution(s, sol.front_coefficient, sol.T_k)
    assert rebuilt.T_s == sol.T_s and rebuilt.C_l == sol.C_l
    res = system_residuals(s, sol.front_coefficient + 1e-3, sol.T_k)
    assert res["interface_temperature"] > 1e-4


def test_near_lower_gate_residual_in_temperature_form():
    # phi is ~5e6 and very steep here; |M - phi| cannot reach 1e-10 in doubles
    lo, hi = flux_bounds(ref_spec(REF_FLUX))
    sol = solve(ref_spec(Flux(lo * (1 + 1e-6))))
    assert sol.front_coefficient < 1e-4
    assert sol.residuals["segregation_temperature"] <= 1e-10
    assert sol.residuals["segregation_scaled"] <= 1e-8


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=0.01, max_value=0.99), st.floats(min_value=1.5, max_value=3.0))
def test_random_flux_solutions_satisfy_system(u, e):
    base = ref_spec(REF_FLUX, e)
    lo, hi = flux_bounds(base)
    s = base.with_bc(Flux(lo + u * (hi - lo)))
    sol = solve(s)
    T_0s, T_0l = 0.25, base.diagram.inv_liquidus(0.25)
    assert T_0s < sol.T_k < T_0l
    assert contract_residual(sol.residuals) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=0.01, max_value=0.99), st.floats(min_value=-1.0, max_value=0.2))
def test_random_convective_solutions_satisfy_system(u, T_inf):
    base = ref_spec(REF_FLUX)
    lo, hi = convective_bounds(base, T_inf)
    s = base.with_bc(Convective(lo + u * (hi - lo), T_inf))
    sol = solve(s)
    assert 0.25 < sol.T_k < 0.5
    assert T_inf < sol.T_fixed_face < sol.T_k
    assert contract_residual(sol.residuals) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=0.001, max_value=0.49))
def test_random_dirichlet_solutions(T1):
    sol = solve(ref_spec(Dirichlet(T1)))
    assert T1 < sol.T_k < 0.5
    assert sol.residuals["interface_temperature"] <= 1e-10
