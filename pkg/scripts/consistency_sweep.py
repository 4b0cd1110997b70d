"""Catalog x theorems x admissible (t, s) sweep for both readings of the line-family inequality."""

import argparse

from quadcurv import hypotheses as H
from quadcurv.models import CATALOG, load_model

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--k", type=int, default=100)
ap.add_argument("--seed", type=int, default=0)
ap.add_argument("--models", default=",".join(CATALOG))
args = ap.parse_args()

models = {name: load_model(name) for name in args.models.split(",")}
for form in H.LINE_FORMS:
    out = H.consistency_sweep(models, k=args.k, seed=args.seed, line_form=form)
    print(f"line_form={form}: {dict(sorted(out['counts'].items()))}")
    for c in out["contradictions"][:5]:
        print(f"  CONTRADICTION {c['model']} {c['theorem']} {c['system']} t={c['t']:.4g} s={c['s']:.4g} "
              f"margin={c['min_margin']:.4g} |R0|/|Ric|={c['einstein_relative']:.3g}")
    if len(out["contradictions"]) > 5:
        print(f"  ... {len(out['contradictions']) - 5} more")
