"""Sweep q0 across the admissible interval of a flux config and report the response.

    python scripts/sweep_flux.py configs/ref1_flux.ini --points 31 --out sweep.csv
"""

import argparse

import numpy as np

from alloystef.cli import SWEEP_HEADER, load_config, sweep_rows, write_csv
from alloystef.model import Flux, flux_bounds


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("config")
    ap.add_argument("--points", type=int, default=31)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    cfg = load_config(args.config)
    if not isinstance(cfg.spec.bc, Flux):
        raise SystemExit("config must use a flux boundary condition")
    lo, hi = flux_bounds(cfg.spec)
    values = np.linspace(lo, hi, args.points + 2)[1:-1]
    rows = sweep_rows(cfg.spec, "q0", values, cfg.solver)
    if args.out:
        write_csv(rows, args.out, SWEEP_HEADER)

    front = np.array([r[3] for r in rows], dtype=float)
    face = np.array([r[5] for r in rows], dtype=float)
    print(f"admissible q0 interval: ({lo:.12g}, {hi:.12g})")
    print(f"front coefficient {front[0]:.6g} .. {front[-1]:.6g}, strictly increasing: {bool(np.all(np.diff(front) > 0))}")
    print(f"face temperature {face[0]:.6g} .. {face[-1]:.6g}, strictly decreasing: {bool(np.all(np.diff(face) < 0))}")


if __name__ == "__main__":
    main()
