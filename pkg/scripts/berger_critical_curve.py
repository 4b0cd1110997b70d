"""Critical curve of the Berger family: t*(eps, s), EL residuals and theorem verdicts."""

import argparse

import numpy as np

from quadcurv import functional as F
from quadcurv import hypotheses as H
from quadcurv.models import make_berger_sphere

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--s", type=float, default=0.0)
ap.add_argument("--eps", default="0.3:1.9")
ap.add_argument("--points", type=int, default=17)
args = ap.parse_args()

a, b = (float(v) for v in args.eps.split(":"))
rows = []
for eps in np.linspace(a, b, args.points):
    if abs(eps - 1) < 1e-9:
        continue
    t = F.berger_critical_t(eps, args.s)
    p = F.FunctionalParams(t, args.s)
    m = make_berger_sphere(eps)
    crit = F.criticality(m, p)
    systems = H.classify(H.ParamPoint(3, t, args.s)).satisfied_systems
    worst = "none"
    for thm in H.THEOREMS:
        v = H.manifold_hypothesis_check(m, thm, p).verdict
        if v == "CONTRADICTION":
            worst = f"CONTRADICTION:{thm}"
    rows.append({"eps": float(eps), "t": t, "s": args.s,
                 "el_traceless": crit["traceless"]["relative"], "el_scalar": crit["scalar"]["relative"],
                 "systems": ";".join(systems), "contradiction": worst})
print(F.sweep_csv(rows), end="")
