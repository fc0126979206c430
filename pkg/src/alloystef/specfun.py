"""Error-function family and the scaled quantities built on it.

Everything of the form ``exp(a) * erfc(b)`` is routed through :func:`erfcx`
so intermediate values stay inside double range.
"""

import math

from scipy import special

from .errors import DomainError

SQRT_PI = math.sqrt(math.pi)

#: Largest argument accepted by :func:`q1_of`; ``exp(x**2)`` overflows soon after.
Q1_MAX_ARG = 26.0


def _finite(x, name="x"):
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return x


def erf(x):
    """Error function, 2/sqrt(pi) * int_0^x exp(-t^2) dt."""
    return math.erf(_finite(x))


def erfc(x):
    """Complementary error function, evaluated directly (no ``1 - erf``)."""
    return math.erfc(_finite(x))


def erfcx(x):
    """Scaled complementary error function ``exp(x**2) * erfc(x)`` for x >= 0.

    Stays finite for arbitrarily large ``x``, where it behaves like
    ``1 / (sqrt(pi) * x)``.
    """
    x = _finite(x)
    if x < 0.0:
        raise DomainError(f"erfcx is defined here for x >= 0, got {x!r}")
    return float(special.erfcx(x))


def q_of(x):
    """``sqrt(pi) * x * exp(x**2) * erfc(x)``: increases from 0 towards 1."""
    x = _finite(x)
    if x < 0.0:
        raise DomainError(f"Q is defined for x >= 0, got {x!r}")
    return SQRT_PI * x * erfcx(x)


def q1_of(x):
    """``sqrt(pi) * x * exp(x**2) * erf(x)`` on ``0 <= x <= 26``.

    Grows like ``exp(x**2)``; callers that only need ratios against it should
    use the ratio form in :mod:`alloystef.solver` instead.
    """
    x = _finite(x)
    if x < 0.0 or x > Q1_MAX_ARG:
        raise DomainError(f"Q1 is evaluated only on [0, {Q1_MAX_ARG}], got {x!r}")
    return SQRT_PI * x * math.exp(x * x) * math.erf(x)


def erf_derivative(x):
    """d/dx erf(x) = 2/sqrt(pi) * exp(-x**2)."""
    x = _finite(x)
    return 2.0 / SQRT_PI * math.exp(-x * x)
