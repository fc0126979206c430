"""Randomised check of the flux/convective to fixed-temperature equivalence.

For each random admissible spec: solve, re-solve with the fixed-face
temperature as Dirichlet data, and record the deltas and the erf(mu)
inequalities. Prints a summary and, with --out, one CSV row per spec.

    python scripts/equivalence_study.py --n 200 --seed 1
"""

import argparse
import csv

import numpy as np

from alloystef import verify
from alloystef.model import Convective, Flux, PhaseProperties, Material, ProblemSpec, convective_bounds, flux_bounds
from alloystef.phase_diagram import PowerLawDiagram


def random_spec(rng, kind):
    p = PhaseProperties(1.0, 1.0, 1.0)
    e = float(rng.uniform(1.5, 3.0))
    base = ProblemSpec(Material(p, p, 1.0, 1.0), PowerLawDiagram(0.0, 1.0, e, 1.0), 0.8, 0.25, Flux(0.2))
    u = float(rng.uniform(0.01, 0.99))
    if kind == "flux":
        lo, hi = flux_bounds(base)
        return base.with_bc(Flux(lo + u * (hi - lo)))
    T_inf = float(rng.uniform(-1.0, 0.2))
    lo, hi = convective_bounds(base, T_inf)
    return base.with_bc(Convective(lo + u * (hi - lo), T_inf))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    rows = []
    for i in range(args.n):
        kind = "flux" if i % 2 == 0 else "convective"
        spec = random_spec(rng, kind)
        d = verify.equivalence_check(spec)
        bounds = verify.erf_mu_bounds_check(d.rubinstein, spec.bc)
        rows.append({
            "kind": kind,
            "exponent_l": spec.diagram.exponent_l,
            "datum": spec.bc.q0 if kind == "flux" else spec.bc.h0,
            "T_inf": getattr(spec.bc, "T_inf", ""),
            "T1": d.rubinstein.spec.bc.T1,
            "delta_front": d.delta_front,
            "delta_Tk": d.delta_Tk,
            "sup_field_delta": d.sup_field_delta,
            "within_contract": d.within_contract,
            "failed_bounds": " ".join(bounds.failed()),
            "physical_meaning": bounds.flags["physical_meaning"],
        })

    print(f"{len(rows)} specs, all within contract: {all(r['within_contract'] for r in rows)}")
    print(f"worst delta_front {max(r['delta_front'] for r in rows):.2e}, "
          f"worst sup field delta {max(r['sup_field_delta'] for r in rows):.2e}")
    for kind in ("flux", "convective"):
        sub = [r for r in rows if r["kind"] == kind]
        bad = [r for r in sub if r["failed_bounds"]]
        print(f"{kind}: {len(bad)}/{len(sub)} violate an erf(mu) bound")
        if bad:
            hot = sum(r["T1"] > 0.25 for r in bad)
            print(f"  of these, {hot} have a face temperature above T_0s = 0.25")
    if args.out:
        with open(args.out, "w", newline="\n", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(rows)


if __name__ == "__main__":
    main()
