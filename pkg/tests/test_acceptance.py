"""The ten acceptance criteria, at their stated sizes and tolerances.

Each test records one "criterion k PASS|FAIL: detail" line; conftest prints
them all at the end of the run.
"""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from golden import GOLDEN
from quadcurv import charts as C
from quadcurv import estimates as E
from quadcurv import functional as F
from quadcurv import hypotheses as H
from quadcurv import invariants as inv
from quadcurv import tensors as T
from quadcurv.models import CATALOG, load_model, make_perturbed_torus, make_round_sphere


def report(k, ok, detail):
    line = f"criterion {k} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_01_algebraic_identities():
    t0 = time.perf_counter()
    worst = {}
    for n in (3, 4, 5, 6):
        rng = np.random.default_rng(np.random.SeedSequence([1, n]))
        rm = T.random_curvature_batch(rng, 10_000, n)
        res = inv.decomposition_residuals(inv.pack_from_frame(rm))
        worst[n] = max(float(np.max(res[k])) for k in ("r15_rel", "r16_rel", "r17_rel"))
    dt = time.perf_counter() - t0
    ok = max(worst.values()) < 1e-11 and dt < 60
    report(1, ok, f"max relative residual {max(worst.values()):.2e} over 4 x 1e4 tensors in {dt:.1f} s")


def test_criterion_02_space_forms():
    worst_cf, worst_fd, rm_gap = 0.0, 0.0, 0.0
    for n in (3, 4, 5):
        m = make_round_sphere(n)
        pts = m.sample_points(2, seed=n)
        for pack, bucket in ((m.pack_at(pts, depth=2), "cf"), (m.fd_pack(pts, depth=2), "fd")):
            dev = max(float(np.max(np.abs(pack.R - n * (n - 1)))) / (n * (n - 1)),
                      float(np.max(np.abs(pack.weyl))), float(np.max(np.abs(pack.cotton))),
                      float(np.max(np.abs(pack.bach))), float(np.max(np.abs(pack.ric0))))
            if bucket == "cf":
                worst_cf = max(worst_cf, dev)
                nm = pack.norms
                split = nm["norm_W2"] + 4 / (n - 2) * nm["norm_Ric0_2"] + 2 / (n * (n - 1)) * pack.R ** 2
                rm_gap = max(rm_gap, float(np.max(np.abs(nm["norm_Rm2"] - 2 * n * (n - 1)))),
                             float(np.max(np.abs(split - 2 * n * (n - 1)))))
            else:
                worst_fd = max(worst_fd, dev)
    ok = worst_cf < 1e-10 and worst_fd < 1e-5 and rm_gap < 1e-10
    report(2, ok, f"closed form {worst_cf:.1e}, FD {worst_fd:.1e}, |Rm|^2 split {rm_gap:.1e}")


def test_criterion_03_weyl_divergence():
    m = make_perturbed_torus(4, eps=0.05, seed=7)
    chart = m.chart(0)
    x = m.sample_points(20, seed=7)
    r1 = C.weyl_divergence_check(chart, x, C.FDConfig(0.1, order=4))["residual"]
    r2 = C.weyl_divergence_check(chart, x, C.FDConfig(0.05, order=4))["residual"]
    ok = r1 < 1e-3 and r1 / r2 >= 8
    report(3, ok, f"residual {r1:.2e} at h = 0.1, {r2:.2e} at h = 0.05 (factor {r1 / r2:.1f})")


def test_criterion_04_lemma22_quadrature():
    t0 = time.perf_counter()
    gaps = []
    for N in (12, 18, 24):
        m = make_perturbed_torus(4, eps=0.05, seed=7, grid=N)
        gaps.append(F.identity_check(m, "lemma22").relative_gap)
        m.release()
    dt = time.perf_counter() - t0
    ok = gaps[-1] < 1e-2 and gaps[0] > gaps[1] > gaps[2] and dt < 600
    report(4, ok, "relative gaps " + ", ".join(f"{g:.2e}" for g in gaps) + f" at 12/18/24 in {dt:.0f} s")


def test_criterion_05_cotton_divergence_berger():
    t0 = time.perf_counter()
    rep = F.identity_check(load_model("berger-0.5"), "cotton_div")
    dt = time.perf_counter() - t0
    ok = rep.relative_gap < 1e-5 and dt < 1
    report(5, ok, f"relative gap {rep.relative_gap:.1e} in {dt:.3f} s")


def test_criterion_06_space_forms_critical():
    rng = np.random.default_rng(6)
    worst = 0.0
    for t, s in rng.uniform(-3, 3, (20, 2)):
        p = F.FunctionalParams(float(t), float(s))
        for n in (3, 4, 5):
            unit, _ = make_round_sphere(n).normalize_unit_volume()
            a = F.el_residual_traceless(unit, p)
            b = F.el_residual_scalar(unit, p)
            worst = max(worst, a.relative, b.relative)
    report(6, worst < 1e-8, f"max EL residual {worst:.1e} over 20 (t, s) x n = 3, 4, 5")


def test_criterion_07_estimate_fuzz():
    t0 = time.perf_counter()
    bad, ratios = 0, {}
    for est in E.ESTIMATES:
        for n in (3, 4, 5, 6):
            rep = E.fuzz(est, n, 100_000, seed=0)
            bad += rep["violations"]
            ratios[(est, n)] = rep["max_ratio"]
    r0 = T.SymTensor2(np.diag([1.0, 1.0, -2.0]))
    w0 = T.AlgebraicCurvatureTensor(np.zeros((3,) * 4), geometric=False)
    eq = E.check_lemma23(w0, r0, 1.0)
    eq_gap = abs(eq["lhs"] / eq["rhs"] - 1)
    dt = time.perf_counter() - t0
    ok = bad == 0 and eq_gap < 1e-12
    report(7, ok, f"{bad} violations in 8 x 1e5 trials (max ratio {max(ratios.values()):.3f}); "
                  f"equality witness gap {eq_gap:.1e}; {dt:.0f} s")


def test_criterion_08_parameter_classifier():
    mism = []
    for n, t, s, systems, flags in GOLDEN:
        v = H.classify(H.ParamPoint(n, t, s)).to_json()
        if v["systems"] != systems or [f for f in v["flags"] if f != "boundary"] != flags:
            mism.append((n, t, s))
    cons = {}
    for label in ("4th-Form-13", "4th-Form-14", "3th-Proof-2", "3-Proof-4", "5-Proof-4"):
        rep = H.check_consequence(label, size=100_000, seed=0)
        cons[label] = rep
    failing = {k: v for k, v in cons.items() if not v["ok"]}
    detail = f"golden {len(GOLDEN) - len(mism)}/{len(GOLDEN)} rows match; consequences: "
    detail += ", ".join(f"{k} {'ok' if v['ok'] else 'VIOLATED'} ({v['violations']}/{v['samples']})"
                        for k, v in cons.items())
    for k, v in failing.items():
        ce = next(p["counterexample"] for p in v["parts"] if p["counterexample"])
        detail += f"; {k} counterexample n={ce['n']} t={ce['t']:.4g} s={ce['s']:.4g}"
    report(8, not mism and not failing, detail)


def test_criterion_09_product_critical_search():
    t0 = time.perf_counter()
    rep = F.restricted_critical_search(F.make_family("product-spheres"), F.FunctionalParams(0.0, 0.0))
    dt = time.perf_counter() - t0
    ok = rep["converged"] and rep["grad_norm"] < 1e-8 and abs(rep["x"][0] - 1) < 1e-6 and dt < 30
    report(9, ok, f"r1/r2 = {rep['x'][0]:.10f}, |grad| = {rep['grad_norm']:.1e}, {dt:.1f} s")


def test_criterion_10_consistency_sweep():
    t0 = time.perf_counter()
    models = {name: load_model(name) for name in CATALOG}
    out = H.consistency_sweep(models, k=100, seed=0)
    for m in models.values():
        m.release()
    dt = time.perf_counter() - t0
    by = {}
    for c in out["contradictions"]:
        key = (c["model"], c["theorem"])
        by[key] = by.get(key, 0) + 1
    detail = f"verdicts {dict(sorted(out['counts'].items()))} in {dt:.0f} s"
    if by:
        detail += "; CONTRADICTION on " + ", ".join(f"{m}/{t} x{k}" for (m, t), k in sorted(by.items()))
    report(10, out["ok"], detail)
