"""Liquidus/solidus phase diagrams and the segregation function phi.

Two curve families are built in: a normalized power law and a monotone
piecewise-linear table.  Both share the inverse and phi machinery on
:class:`PhaseDiagram`.
"""

import bisect
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, PoleError

INVERSE_TOL = 0.0  # bisect until the bracket cannot shrink further
INVERSE_MAX_ITER = 200
POLE_TOL = 1e-14
ENDPOINT_TOL = 1e-12


@dataclass(frozen=True)
class CheckRecord:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class DiagramValidation:
    checks: tuple

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]


class PhaseDiagram:
    """Common behaviour for diagrams on ``[T_A, T_B]``.

    Subclasses provide ``T_A``, ``T_B``, ``_fl`` and ``_fs`` (unchecked curve
    evaluation inside the closed interval).
    """

    T_A: float
    T_B: float

    def _check_T(self, T):
        T = float(T)
        if not (self.T_A <= T <= self.T_B):
            raise DomainError(f"temperature {T!r} outside [{self.T_A}, {self.T_B}]")
        return T

    def liquidus(self, T):
        return self._fl(self._check_T(T))

    def solidus(self, T):
        return self._fs(self._check_T(T))

    def _invert(self, curve, C, label):
        C = float(C)
        lo, hi = self.T_A, self.T_B
        c_lo, c_hi = curve(lo), curve(hi)
        if not (c_lo <= C <= c_hi):
            raise DomainError(f"concentration {C!r} outside {label} range [{c_lo}, {c_hi}]")
        if C == c_lo:
            return lo
        if C == c_hi:
            return hi
        for _ in range(INVERSE_MAX_ITER):
            if hi - lo <= INVERSE_TOL:
                break
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if curve(mid) < C:
                lo = mid
            else:
                hi = mid
        return lo if abs(curve(lo) - C) <= abs(curve(hi) - C) else hi

    def inv_liquidus(self, C):
        return self._invert(self._fl, C, "liquidus")

    def inv_solidus(self, C):
        return self._invert(self._fs, C, "solidus")

    def concentration_range(self):
        return self._fl(self.T_A), self._fl(self.T_B)

    def phi(self, C0, T):
        """Segregation ratio ``(f_s(T) - f_l(T)) / (C0 - f_l(T))``.

        Defined on the open interval minus the pole at ``f_l^{-1}(C0)``.
        """
        T = float(T)
        if not (self.T_A < T < self.T_B):
            raise DomainError(f"phi needs T in ({self.T_A}, {self.T_B}), got {T!r}")
        fl = self._fl(T)
        denom = C0 - fl
        if abs(denom) < POLE_TOL:
            raise PoleError(f"phi evaluated at its pole (C0 - f_l(T) = {denom:.3e})")
        return (self._fs(T) - fl) / denom

    def inv_phi(self, C0, value):
        """Temperature in ``[T_0s, T_0l)`` where ``phi(C0, T) = value`` (value >= 1)."""
        value = float(value)
        lo, hi = self.inv_solidus(C0), self.inv_liquidus(C0)
        if not value >= 1.0:
            raise DomainError(f"phi takes values >= 1 on [T_0s, T_0l), got {value!r}")
        for _ in range(INVERSE_MAX_ITER):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if self.phi(C0, mid) < value:
                lo = mid
            else:
                hi = mid
        return lo

    def validate(self, n_grid=1000):
        return validate_diagram(self, n_grid)


@dataclass(frozen=True)
class PowerLawDiagram(PhaseDiagram):
    """``f = ((T - T_A) / (T_B - T_A)) ** exponent`` with concentrations in [0, 1].

    ``exponent_l > exponent_s >= 1`` puts the liquidus strictly below the
    solidus inside the interval.
    """

    T_A: float = 0.0
    T_B: float = 1.0
    exponent_l: float = 2.0
    exponent_s: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.T_A) and math.isfinite(self.T_B)) or self.T_A >= self.T_B:
            raise DomainError(f"need finite T_A < T_B, got T_A={self.T_A}, T_B={self.T_B}")
        if not (self.exponent_l > 0 and self.exponent_s > 0):
            raise DomainError("power-law exponents must be positive")

    def _base(self, T):
        return (T - self.T_A) / (self.T_B - self.T_A)

    def _fl(self, T):
        return self._base(T) ** self.exponent_l

    def _fs(self, T):
        return self._base(T) ** self.exponent_s

    def describe(self):
        return {"type": "power_law", "T_A": self.T_A, "T_B": self.T_B,
                "exponent_l": self.exponent_l, "exponent_s": self.exponent_s}


@dataclass(frozen=True)
class TabulatedDiagram(PhaseDiagram):
    """Piecewise-linear curves through knots ``(T_i, C_l_i, C_s_i)``.

    Construction only insists on strictly increasing ``T``; the curve axioms
    are checked by :func:`validate_diagram`.
    """

    T: tuple
    C_l: tuple
    C_s: tuple
    T_A: float = field(init=False)
    T_B: float = field(init=False)

    def __post_init__(self):
        T = tuple(float(v) for v in self.T)
        C_l = tuple(float(v) for v in self.C_l)
        C_s = tuple(float(v) for v in self.C_s)
        if not (len(T) == len(C_l) == len(C_s)):
            raise DomainError("knot columns must have equal length")
        if len(T) < 2:
            raise DomainError("a tabulated diagram needs at least two knots")
        if any(b <= a for a, b in zip(T, T[1:])):
            raise DomainError("knot temperatures must be strictly increasing")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "C_l", C_l)
        object.__setattr__(self, "C_s", C_s)
        object.__setattr__(self, "T_A", T[0])
        object.__setattr__(self, "T_B", T[-1])

    def _interp(self, col, T):
        i = bisect.bisect_right(self.T, T) - 1
        i = min(max(i, 0), len(self.T) - 2)
        t0, t1 = self.T[i], self.T[i + 1]
        w = (T - t0) / (t1 - t0)
        return col[i] + w * (col[i + 1] - col[i])

    def _fl(self, T):
        return self._interp(self.C_l, T)

    def _fs(self, T):
        return self._interp(self.C_s, T)

    @classmethod
    def from_file(cls, path):
        """Read a ``T C_l C_s`` whitespace table (header line required)."""
        path = Path(path)
        lines = path.read_text(encoding="utf-8").splitlines()
        rows = []
        header_seen = False
        for lineno, raw in enumerate(lines, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if not header_seen:
                if parts != ["T", "C_l", "C_s"]:
                    raise DomainError(f"{path}:{lineno}: expected header 'T C_l C_s', got {line!r}")
                header_seen = True
                continue
            if len(parts) != 3:
                raise DomainError(f"{path}:{lineno}: expected 3 columns, got {len(parts)}")
            try:
                rows.append(tuple(float(p) for p in parts))
            except ValueError as exc:
                raise DomainError(f"{path}:{lineno}: {exc}") from None
        if not header_seen:
            raise DomainError(f"{path}: empty diagram table")
        T, C_l, C_s = zip(*rows) if rows else ((), (), ())
        return cls(T, C_l, C_s)

    def describe(self):
        return {"type": "tabulated", "T": list(self.T), "C_l": list(self.C_l), "C_s": list(self.C_s)}


def liquidus(d, T):
    return d.liquidus(T)


def solidus(d, T):
    return d.solidus(T)


def inv_liquidus(d, C):
    return d.inv_liquidus(C)


def inv_solidus(d, C):
    return d.inv_solidus(C)


def phi_of(d, C0, T):
    return d.phi(C0, T)


def validate_diagram(d, n_grid=1000):
    """Check the curve axioms on a uniform grid and report each one."""
    grid = np.linspace(d.T_A, d.T_B, n_grid)
    fl = np.array([d._fl(t) for t in grid])
    fs = np.array([d._fs(t) for t in grid])
    checks = []

    lo_gap = abs(d._fl(d.T_A) - d._fs(d.T_A))
    hi_gap = abs(d._fl(d.T_B) - d._fs(d.T_B))
    checks.append(CheckRecord("endpoint_T_A", lo_gap <= ENDPOINT_TOL, f"|f_l - f_s| = {lo_gap:.3e}"))
    checks.append(CheckRecord("endpoint_T_B", hi_gap <= ENDPOINT_TOL, f"|f_l - f_s| = {hi_gap:.3e}"))

    for name, vals in (("liquidus_increasing", fl), ("solidus_increasing", fs)):
        steps = np.diff(vals)
        ok = bool(np.all(steps > 0))
        checks.append(CheckRecord(name, ok, f"min step {steps.min():.3e}"))
    if isinstance(d, TabulatedDiagram):
        for name, col in (("liquidus_knots_increasing", d.C_l), ("solidus_knots_increasing", d.C_s)):
            ok = all(b > a for a, b in zip(col, col[1:]))
            checks.append(CheckRecord(name, ok))

    gap = fs[1:-1] - fl[1:-1]
    checks.append(CheckRecord("liquidus_below_solidus", bool(np.all(gap > 0)), f"min gap {gap.min():.3e}"))
    return DiagramValidation(tuple(checks))
