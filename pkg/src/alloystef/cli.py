"""Command-line front end: config loading, command dispatch and file output.

Exit codes: 0 success, 1 verification/equivalence contract not met,
2 inadmissible data, 3 solver failure, 4 configuration or I/O error.
"""

import argparse
import configparser
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, fields, model, solver, verify
from .errors import AlloyStefError, DomainError, EquivalenceError, InadmissibleError
from .model import Convective, Dirichlet, Flux
from .phase_diagram import PowerLawDiagram, TabulatedDiagram

log = logging.getLogger("alloystef")

EXIT_OK = 0
EXIT_CONTRACT = 1
EXIT_INADMISSIBLE = 2
EXIT_SOLVER = 3
EXIT_CONFIG = 4

COMMANDS = ("check", "solve", "profile", "verify", "equivalence", "sweep")
PROFILE_HEADER = ("t", "x", "region", "T", "C")
SWEEP_HEADER = ("param", "value", "admissible", "front_coefficient", "T_k", "T_fixed_face")


class ConfigError(AlloyStefError):
    """Config file could not be parsed or violates a model invariant."""


@dataclass
class RunConfig:
    spec: model.ProblemSpec
    solver: solver.SolverConfig
    raw: dict
    path: Path
    times: tuple = (1.0,)
    x_max: float = 1.0
    n_x: int = 101
    param: str = None
    sweep_from: float = None
    sweep_to: float = None
    steps: int = None
    out: Path = None
    extra: dict = field(default_factory=dict)


def _line_index(text):
    """Map ``(section, key)`` and ``(section, None)`` to 1-based line numbers."""
    where = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            where[(section, None)] = lineno
        elif "=" in line and section is not None and not line.startswith(("#", ";")):
            where[(section, line.split("=", 1)[0].strip())] = lineno
    return where


class _Reader:
    def __init__(self, parser, lines, path):
        self.parser = parser
        self.lines = lines
        self.path = path

    def loc(self, section, key=None):
        n = self.lines.get((section, key)) or self.lines.get((section, None))
        return f"{self.path}:{n}" if n else str(self.path)

    def has(self, section, key=None):
        if key is None:
            return self.parser.has_section(section)
        return self.parser.has_option(section, key)

    def text(self, section, key):
        if not self.parser.has_section(section):
            raise ConfigError(f"{self.path}: missing section [{section}]")
        if not self.parser.has_option(section, key):
            raise ConfigError(f"{self.loc(section)}: missing key '{key}' in [{section}]")
        return self.parser.get(section, key).strip().strip('"').strip("'")

    def num(self, section, key, default=None):
        if default is not None and not self.has(section, key):
            return default
        raw = self.text(section, key)
        try:
            v = float(raw)
        except ValueError:
            raise ConfigError(f"{self.loc(section, key)}: '{key}' is not a number: {raw!r}") from None
        if not math.isfinite(v):
            raise ConfigError(f"{self.loc(section, key)}: '{key}' must be finite")
        return v

    def build(self, section, key, fn, *args):
        try:
            return fn(*args)
        except DomainError as exc:
            raise ConfigError(f"{self.loc(section, key)}: {exc}") from None


def _phase(r, section):
    return r.build(section, None, model.PhaseProperties,
                   r.num(section, "k"), r.num(section, "alpha"), r.num(section, "d"))


def _diagram(r, base_dir):
    kind = r.text("diagram", "type").lower()
    if kind == "power_law":
        d = r.build("diagram", None, PowerLawDiagram, r.num("diagram", "T_A"), r.num("diagram", "T_B"),
                    r.num("diagram", "exponent_l"), r.num("diagram", "exponent_s"))
    elif kind == "tabulated":
        table = Path(r.text("diagram", "file"))
        if not table.is_absolute():
            table = base_dir / table
        if not table.exists():
            raise ConfigError(f"{r.loc('diagram', 'file')}: diagram table {table} does not exist")
        d = r.build("diagram", "file", TabulatedDiagram.from_file, table)
    else:
        raise ConfigError(f"{r.loc('diagram', 'type')}: unknown diagram type {kind!r}")
    report = d.validate()
    if not report.passed:
        names = ", ".join(c.name for c in report.failures())
        raise ConfigError(f"{r.loc('diagram')}: phase diagram axioms violated: {names}")
    return d


def _boundary(r):
    kind = r.text("boundary", "type").lower()
    if kind == "flux":
        return r.build("boundary", "q0", Flux, r.num("boundary", "q0"))
    if kind == "convective":
        return r.build("boundary", "h0", Convective, r.num("boundary", "h0"), r.num("boundary", "T_inf"))
    if kind == "dirichlet":
        return r.build("boundary", "T1", Dirichlet, r.num("boundary", "T1"))
    raise ConfigError(f"{r.loc('boundary', 'type')}: unknown boundary type {kind!r}")


def load_config(path):
    """Parse and validate a config file into a :class:`RunConfig`."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from None
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"parse error: {exc}") from None
    r = _Reader(parser, _line_index(text), path)

    material = r.build("material", None, model.Material, _phase(r, "material.solid"),
                       _phase(r, "material.liquid"), r.num("material", "rho"), r.num("material", "gamma"))
    diagram = _diagram(r, path.parent)
    bc = _boundary(r)
    T0, C0 = r.num("initial", "T0"), r.num("initial", "C0")
    try:
        spec = model.ProblemSpec(material, diagram, T0, C0, bc)
    except DomainError as exc:
        key = "C0" if "C0" in str(exc) else "T0"
        raise ConfigError(f"{r.loc('initial', key)}: {exc}") from None

    defaults = solver.SolverConfig()
    cfg = r.build("solver", None, solver.SolverConfig,
                  r.num("solver", "tol_lambda", defaults.tol_lambda),
                  r.num("solver", "tol_residual", defaults.tol_residual),
                  int(r.num("solver", "max_iterations", defaults.max_iterations)),
                  r.num("solver", "bracket_margin", defaults.bracket_margin))
    raw = {s: dict(parser.items(s)) for s in parser.sections()}
    return RunConfig(spec=spec, solver=cfg, raw=raw, path=path)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def profile_rows(samples):
    return [(s.t, s.x, s.region, s.T, s.C) for s in samples]


def write_csv(rows, path=None, header=PROFILE_HEADER):
    """Write rows as UTF-8 CSV with LF endings and 17 significant digits.

    ``rows`` may be :class:`~alloystef.fields.ProfileSample` objects or
    plain tuples matching ``header``.
    """
    rows = list(rows)
    if not rows:
        raise DomainError("write_csv needs at least one row")
    if isinstance(rows[0], fields.ProfileSample):
        rows, header = profile_rows(rows), PROFILE_HEADER
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _emit_json(payload, path):
    text = json.dumps(payload, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _envelope(cfg, command, **body):
    return {"alloystef_version": __version__, "command": command, **body, "config": cfg.raw}


def _admissibility(cfg):
    try:
        return model.check_admissibility(cfg.spec)
    except DomainError as exc:
        raise InadmissibleError(str(exc)) from exc


def _cmd_check(cfg):
    rep = _admissibility(cfg)
    _emit_json(_envelope(cfg, "check", admissibility=rep.as_dict()), cfg.out)
    return EXIT_OK if rep.admissible else EXIT_INADMISSIBLE


def _solve(cfg):
    rep = _admissibility(cfg)
    if not rep.admissible:
        raise InadmissibleError(
            f"{rep.kind} datum {rep.actual!r} outside ({rep.lower_bound!r}, {rep.upper_bound!r})", rep)
    return rep, solver.solve(cfg.spec, cfg.solver)


def _cmd_solve(cfg):
    rep, sol = _solve(cfg)
    _emit_json(_envelope(cfg, "solve", admissibility=rep.as_dict(), solution=sol.summary()), cfg.out)
    return EXIT_OK


def _cmd_profile(cfg):
    _, sol = _solve(cfg)
    write_csv(fields.sample_profile(sol, cfg.times, cfg.x_max, cfg.n_x), cfg.out)
    return EXIT_OK


def _cmd_verify(cfg):
    rep, sol = _solve(cfg)
    report = verify.residual_report(sol)
    report.extend(verify.c0_interval_check(sol))
    report.extend(verify.monotonicity_suite(cfg.spec))
    _emit_json(_envelope(cfg, "verify", solution=sol.summary(), report=report.as_dict()), cfg.out)
    return EXIT_OK if report.passed else EXIT_CONTRACT


def _cmd_equivalence(cfg):
    if isinstance(cfg.spec.bc, Dirichlet):
        raise DomainError("equivalence needs a flux or convective boundary condition")
    rep = _admissibility(cfg)
    if not rep.admissible:
        raise InadmissibleError(f"{rep.kind} datum outside its admissible interval", rep)
    delta = verify.equivalence_check(cfg.spec, cfg.solver)
    bounds = verify.erf_mu_bounds_check(delta.rubinstein, cfg.spec.bc)
    payload = _envelope(cfg, "equivalence", deltas=delta.as_dict(),
                        original=delta.original.summary(), rubinstein=delta.rubinstein.summary(),
                        inequalities=bounds.as_dict())
    _emit_json(payload, cfg.out)
    return EXIT_OK if delta.within_contract and bounds.passed else EXIT_CONTRACT


def sweep_rows(spec, param, values, cfg=None):
    """One ``(param, value, admissible, front, T_k, T_face)`` row per value."""
    rows = []
    for v in values:
        v = float(v)
        if param == "q0":
            bc = Flux(v)
        else:
            bc = Convective(v, spec.bc.T_inf)
        s = spec.with_bc(bc)
        ok = model.check_admissibility(s).admissible
        front = T_k = T_face = None
        if ok:
            try:
                sol = solver.solve(s, cfg)
                front, T_k, T_face = sol.front_coefficient, sol.T_k, sol.T_fixed_face
            except AlloyStefError as exc:
                log.warning("sweep %s=%r: %s", param, v, exc)
        rows.append((param, v, ok, front, T_k, T_face))
    return rows


def _cmd_sweep(cfg):
    if cfg.param not in ("q0", "h0"):
        raise DomainError("sweep needs --param q0 or --param h0")
    need = Flux if cfg.param == "q0" else Convective
    if not isinstance(cfg.spec.bc, need):
        raise DomainError(f"--param {cfg.param} needs a {need.kind} boundary condition in the config")
    if cfg.sweep_from is None or cfg.sweep_to is None or not cfg.steps or cfg.steps < 1:
        raise DomainError("sweep needs --from, --to and --steps >= 1")
    values = np.linspace(cfg.sweep_from, cfg.sweep_to, cfg.steps)
    write_csv(sweep_rows(cfg.spec, cfg.param, values, cfg.solver), cfg.out, SWEEP_HEADER)
    return EXIT_OK


_DISPATCH = {
    "check": _cmd_check,
    "solve": _cmd_solve,
    "profile": _cmd_profile,
    "verify": _cmd_verify,
    "equivalence": _cmd_equivalence,
    "sweep": _cmd_sweep,
}


def run_command(cfg, command):
    """Run one command; returns the process exit code."""
    try:
        return _DISPATCH[command](cfg)
    except InadmissibleError as exc:
        log.error("inadmissible data: %s", exc)
        return EXIT_INADMISSIBLE
    except EquivalenceError as exc:
        log.error("equivalence failed: %s", exc)
        return EXIT_SOLVER
    except (DomainError, ConfigError, OSError) as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except AlloyStefError as exc:
        log.error("solver failure: %s", exc)
        return EXIT_SOLVER


def _times(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad time list {text!r}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="alloystef",
                                description="Explicit similarity solutions of binary-alloy solidification.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--times", type=_times, default=(1.0,))
    p.add_argument("--xmax", type=float, default=1.0)
    p.add_argument("--nx", type=int, default=101)
    p.add_argument("--param", choices=("q0", "h0"))
    p.add_argument("--from", dest="sweep_from", type=float)
    p.add_argument("--to", dest="sweep_to", type=float)
    p.add_argument("--steps", type=int)
    return p


def _setup_logging():
    level = os.environ.get("ALLOYSTEF_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None):
    _setup_logging()
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    cfg.out = args.out
    cfg.times = args.times
    cfg.x_max = args.xmax
    cfg.n_x = args.nx
    cfg.param = args.param
    cfg.sweep_from = args.sweep_from
    cfg.sweep_to = args.sweep_to
    cfg.steps = args.steps
    return run_command(cfg, args.command)


if __name__ == "__main__":
    sys.exit(main())
