"""Relative gap of the lemma22 quadrature identity under grid refinement."""

import argparse
import time

from quadcurv import functional as F
from quadcurv.models import make_perturbed_torus

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--n", type=int, default=4)
ap.add_argument("--eps", type=float, default=0.05)
ap.add_argument("--seed", type=int, default=7)
ap.add_argument("--grids", default="12,18,24")
args = ap.parse_args()

rows = []
for N in (int(g) for g in args.grids.split(",")):
    t0 = time.perf_counter()
    m = make_perturbed_torus(args.n, args.eps, seed=args.seed, grid=N)
    rep = F.identity_check(m, "lemma22")
    m.release()
    rows.append({"grid": N, "lhs": rep.lhs, "rhs": rep.rhs, "relative_gap": rep.relative_gap,
                 "seconds": time.perf_counter() - t0})
print(F.sweep_csv(rows), end="")
