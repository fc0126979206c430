import math

import numpy as np
import pytest

from alloystef.model import Convective, Dirichlet, Flux, Material, PhaseProperties, ProblemSpec, flux_bounds, convective_bounds
from alloystef.phase_diagram import PowerLawDiagram


def unit_material():
    p = PhaseProperties(1.0, 1.0, 1.0)
    return Material(p, p, 1.0, 1.0)


def ref_spec(bc, exponent_l=2.0):
    """f_l = T^exponent_l, f_s = T on [0, 1]; T0 = 0.8, C0 = 0.25, unit coefficients."""
    return ProblemSpec(unit_material(), PowerLawDiagram(0.0, 1.0, exponent_l, 1.0), 0.8, 0.25, bc)


REF_FLUX = Flux(0.25)
REF_CONV = Convective(0.7, 0.0)
REF_DIR = Dirichlet(0.3)


def random_specs(n, seed=20240611):
    """Half flux, half convective; exponent_l and the boundary datum drawn inside the gates."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        e = float(rng.uniform(1.5, 3.0))
        base = ref_spec(Flux(0.25), e)
        u = float(rng.uniform(0.02, 0.98))
        if i % 2 == 0:
            lo, hi = flux_bounds(base)
            out.append(base.with_bc(Flux(lo + u * (hi - lo))))
        else:
            lo, hi = convective_bounds(base, 0.0)
            out.append(base.with_bc(Convective(lo + u * (hi - lo), 0.0)))
    return out


@pytest.fixture
def flux_spec():
    return ref_spec(REF_FLUX)


@pytest.fixture
def conv_spec():
    return ref_spec(REF_CONV)


@pytest.fixture
def dir_spec():
    return ref_spec(REF_DIR)


@pytest.fixture(scope="session")
def ref_solutions():
    from alloystef.solver import solve
    return {bc.kind: solve(ref_spec(bc)) for bc in (REF_FLUX, REF_CONV, REF_DIR)}


SQRT_PI = math.sqrt(math.pi)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
