import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alloystef.errors import DomainError
from alloystef.specfun import erf, erf_derivative, erfc, erfcx, q1_of, q_of

from oracles import erf_ref, erfc_ref, erfcx_cf, q_ref

GRID = np.linspace(0.0, 6.0, 1000)


def test_erf_matches_series_oracle_on_grid():
    worst = max(abs(erf(x) - float(erf_ref(x))) for x in GRID)
    assert worst <= 1e-13


def test_erfc_matches_oracle_on_grid():
    worst = max(abs(erfc(x) - float(erfc_ref(x))) for x in GRID)
    assert worst <= 1e-13


def test_erfc_relative_accuracy_in_tail():
    # erfc is evaluated directly, not as 1 - erf, so the tail keeps its digits
    for x in (4.0, 8.0, 12.0, 20.0, 26.0):
        ref = float(erfc_ref(x))
        assert abs(erfc(x) - ref) <= 1e-13 * ref


@pytest.mark.parametrize("x", [0.0, 0.1, 1.0, 3.0, 10.0, 50.0, 100.0, 500.0, 1e4, 1e8])
def test_erfcx_relative_to_oracle(x):
    ref = 1.0 if x == 0 else float(erfcx_cf(x))
    assert abs(erfcx(x) - ref) <= 1e-14 * ref


def test_q_stays_below_one_up_to_700():
    xs = np.concatenate([np.linspace(0.0, 30.0, 301), np.linspace(30.0, 700.0, 200)])
    vals = [q_of(x) for x in xs]
    assert all(math.isfinite(v) and 0.0 <= v < 1.0 for v in vals)
    assert q_of(700.0) == pytest.approx(float(q_ref(700.0)), rel=1e-14)


@pytest.mark.parametrize("x", [0.01, 0.5, 2.0, 5.0, 40.0])
def test_q_matches_oracle(x):
    assert q_of(x) == pytest.approx(float(q_ref(x)), rel=1e-14)


def test_q1_against_direct_mp():
    for x in (0.1, 1.0, 4.0, 10.0):
        with mp.workdps(40):
            ref = mp.sqrt(mp.pi) * x * mp.exp(mp.mpf(x) ** 2) * erf_ref(x)
        assert q1_of(x) == pytest.approx(float(ref), rel=1e-13)


def test_domain_errors():
    for bad in (float("nan"), float("inf")):
        with pytest.raises(DomainError):
            erf(bad)
        with pytest.raises(DomainError):
            erfc(bad)
    with pytest.raises(DomainError):
        erfcx(-1.0)
    with pytest.raises(DomainError):
        q_of(-0.1)
    with pytest.raises(DomainError):
        q1_of(27.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.0, max_value=30.0))
def test_erf_plus_erfc_is_one(x):
    assert abs(erf(x) + erfc(x) - 1.0) <= 2e-16


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.0, max_value=4.0), st.floats(min_value=1e-6, max_value=1.0))
def test_erf_increasing_and_odd(x, dx):
    assert erf(x + dx) > erf(x)
    assert erf(-x) == -erf(x)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.0, max_value=1e6), st.floats(min_value=1e-3, max_value=10.0))
def test_q_increasing_and_bounded(x, dx):
    assert 0.0 <= q_of(x) < 1.0
    # non-decreasing up to a few ulps of rounding near 1
    assert q_of(x + dx) >= q_of(x) - 1e-15


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.0, max_value=26.0))
def test_erfcx_consistent_with_erfc(x):
    assert erfcx(x) == pytest.approx(math.exp(x * x) * erfc(x), rel=1e-12)


def test_erf_derivative_matches_fd():
    for x in (0.0, 0.3, 1.7, 3.0):
        h = 1e-5
        fd = (erf(x + h) - erf(x - h)) / (2 * h)
        assert abs(erf_derivative(x) - fd) <= 1e-9
