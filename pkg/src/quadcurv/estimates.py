"""Fuzzing the two pointwise algebraic estimates and probing their sharpness.

lemma23:  |-W_ijkl r_jl r_ik + lam tr(r^3)|
              <= sqrt((n-2)/(2(n-1))) (|W|^2 + 2(n-2) lam^2 |r|^2 / n)^(1/2) |r|^2
ww_bound: |W_ikpq W_jkpq r_ij| <= sqrt((n-1)/n) |W|^2 |r|

Everything is in an orthonormal frame; r is traceless symmetric, W Weyl-like.
"""

from __future__ import annotations

import math

import numpy as np

from . import tensors as T
from .errors import ArgumentError

ESTIMATES = ("lemma23", "ww_bound")
BLOCK = 10_000


def lemma23_sides(w, r0, lam):
    """Batched (lhs, rhs, rhs via the combined tensor)."""
    n = r0.shape[-1]
    lam = np.asarray(lam, dtype=float)
    nr2 = T.norm2(r0, rank=2)
    lhs = np.abs(-np.einsum("...ijkl,...jl,...ik->...", w, r0, r0) + lam * T.cube_trace(r0))
    k = math.sqrt((n - 2) / (2 * (n - 1)))
    # hypot avoids underflow of lam^2 for tiny lam
    rhs = k * np.hypot(np.sqrt(T.norm2(w, rank=4)), np.abs(lam) * np.sqrt(2 * (n - 2) / n * nr2)) * nr2
    comb = w + (lam / math.sqrt(2 * n))[..., None, None, None, None] * T.kn(r0, np.broadcast_to(np.eye(n), r0.shape))
    rhs_comb = k * np.sqrt(T.norm2(comb, rank=4)) * nr2
    return lhs, rhs, rhs_comb


def ww_sides(w, r0):
    n = r0.shape[-1]
    lhs = np.abs(np.einsum("...ij,...ij->...", T.ww(w), r0))
    rhs = math.sqrt((n - 1) / n) * T.norm2(w, rank=4) * np.sqrt(T.norm2(r0, rank=2))
    return lhs, rhs


def _check_inputs(w, r0, tol=1e-10):
    r = r0.entries
    n = r.shape[0]
    scale = max(1.0, float(np.max(np.abs(r))))
    if abs(np.trace(r)) > tol * scale:
        raise ArgumentError("r0 must be traceless")
    if w.n != n:
        raise ArgumentError("w and r0 dimensions differ")
    wscale = max(1.0, float(np.max(np.abs(w.entries))))
    if float(np.max(np.abs(T.single_traces(w.entries)))) > tol * wscale:
        raise ArgumentError("w must be trace-free (Weyl-like)")


def check_lemma23(w: T.AlgebraicCurvatureTensor, r0: T.SymTensor2, lam: float,
                  slack: float = 1e-12) -> dict:
    _check_inputs(w, r0)
    lhs, rhs, rc = lemma23_sides(w.entries, r0.entries, lam)
    lhs, rhs, rc = float(lhs), float(rhs), float(rc)
    return {"lhs": lhs, "rhs": rhs, "rhs_combined": rc, "ok": lhs <= rhs * (1 + slack),
            "equality_gap": abs(rhs - rc) / max(rhs, 1e-300) if rhs > 0 else abs(rc)}


def check_ww_bound(w: T.AlgebraicCurvatureTensor, r0: T.SymTensor2, slack: float = 1e-12) -> dict:
    _check_inputs(w, r0)
    lhs, rhs = (float(x) for x in ww_sides(w.entries, r0.entries))
    return {"lhs": lhs, "rhs": rhs, "ok": lhs <= rhs * (1 + slack)}


def _draw_block(estimate, n, size, rng, dist, w_zero=False):
    r0 = T.random_traceless_batch(rng, size, n, dist)
    w = np.zeros((size,) + (n,) * 4) if w_zero else T.random_weyl_batch(rng, size, n, dist)
    lam = rng.standard_normal(size) * 3 if estimate == "lemma23" else None
    return w, r0, lam


def _ratio(estimate, w, r0, lam):
    if estimate == "lemma23":
        lhs, rhs, _ = lemma23_sides(w, r0, lam)
    else:
        lhs, rhs = ww_sides(w, r0)
    with np.errstate(invalid="ignore", divide="ignore"):
        return lhs, rhs, np.where(rhs > 0, lhs / rhs, 0.0)


def _loop_lemma23(w, r0, lam):
    """Independent loop evaluation, used to confirm a reported violation."""
    n = r0.shape[0]
    a = sum(w[i, j, k, l] * r0[j, l] * r0[i, k] for i in range(n) for j in range(n)
            for k in range(n) for l in range(n))
    c = sum(r0[i, j] * r0[j, k] * r0[k, i] for i in range(n) for j in range(n) for k in range(n))
    nr2 = sum(r0[i, j] ** 2 for i in range(n) for j in range(n))
    nw2 = sum(w[i, j, k, l] ** 2 for i in range(n) for j in range(n) for k in range(n) for l in range(n))
    rhs = math.sqrt((n - 2) / (2 * (n - 1))) * math.hypot(math.sqrt(nw2), abs(lam) * math.sqrt(2 * (n - 2) / n * nr2)) * nr2
    return abs(-a + lam * c), rhs


def _loop_ww(w, r0):
    n = r0.shape[0]
    s = sum(w[i, k, p, q] * w[j, k, p, q] * r0[i, j] for i in range(n) for j in range(n)
            for k in range(n) for p in range(n) for q in range(n))
    nr2 = sum(r0[i, j] ** 2 for i in range(n) for j in range(n))
    nw2 = float(np.sum(w * w))
    return abs(s), math.sqrt((n - 1) / n) * nw2 * math.sqrt(nr2)


def fuzz(estimate: str, n: int, trials: int, seed: int = 0, slack: float = 1e-12) -> dict:
    """Random search for violations; even blocks Gaussian, odd blocks Cauchy entries."""
    if estimate not in ESTIMATES:
        raise ArgumentError(f"unknown estimate {estimate!r}; expected one of {', '.join(ESTIMATES)}")
    T._check_n(n)
    if trials < 0:
        raise ArgumentError("trials must be non-negative")
    max_ratio, violations, witness, done = 0.0, 0, None, 0
    block = 0
    while done < trials:
        size = min(BLOCK, trials - done)
        rng = np.random.default_rng(np.random.SeedSequence([seed, block]))
        dist = "normal" if block % 2 == 0 else "cauchy"
        w, r0, lam = _draw_block(estimate, n, size, rng, dist)
        lhs, rhs, ratio = _ratio(estimate, w, r0, lam)
        bad = np.flatnonzero(lhs > rhs * (1 + slack))
        for i in bad:
            # re-evaluate independently before counting it
            args = (w[i], r0[i], lam[i]) if estimate == "lemma23" else (w[i], r0[i])
            l2, r2 = (_loop_lemma23 if estimate == "lemma23" else _loop_ww)(*args)
            if l2 > r2 * (1 + slack):
                violations += 1
                if witness is None:
                    witness = _witness(estimate, n, w[i], r0[i], None if lam is None else lam[i], l2 / r2)
        max_ratio = max(max_ratio, float(np.max(ratio)) if ratio.size else 0.0)
        done += size
        block += 1
    return {"estimate": estimate, "n": n, "trials": trials, "seed": seed, "violations": violations,
            "max_ratio": max_ratio, "ok": violations == 0, "counterexample": witness}


def _witness(estimate, n, w, r0, lam, ratio):
    out = {"estimate": estimate, "n": n, "ratio": float(ratio), "w": np.asarray(w).tolist(),
           "r0": np.asarray(r0).tolist()}
    if lam is not None:
        out["lambda"] = float(lam)
    return out


def _project(estimate, n, w, r0, w_zero):
    r0 = T.traceless(T.sym(r0))
    w = np.zeros_like(w) if (w_zero or n == 3) else T.weyl_part(T.project_curvature(w))
    return w, r0


def tightness_search(n: int, estimate: str, trials: int, seed: int = 0, w_zero: bool = False,
                     starts: int = 4, steps: int = 300) -> dict:
    """Best lhs/rhs over random samples, then hill-climb from the best few."""
    if estimate not in ESTIMATES:
        raise ArgumentError(f"unknown estimate {estimate!r}; expected one of {', '.join(ESTIMATES)}")
    T._check_n(n)
    if trials <= 0:
        return {"estimate": estimate, "n": n, "trials": 0, "best_ratio": None, "witness": None}
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0]))
    w, r0, lam = _draw_block(estimate, n, trials, rng, "normal", w_zero)
    _, _, ratio = _ratio(estimate, w, r0, lam)
    order = np.argsort(ratio)[::-1][:starts]
    best = (-1.0, None)
    for i in order:
        cw, cr = w[i], r0[i]
        cl = None if lam is None else np.array([lam[i]])
        cur = float(ratio[i])
        sigma = 0.3
        for _ in range(steps):
            pw = cw + sigma * rng.standard_normal(cw.shape)
            pr = cr + sigma * rng.standard_normal(cr.shape)
            pw, pr = _project(estimate, n, pw, pr, w_zero)
            pl = None if cl is None else cl + sigma * rng.standard_normal(1)
            _, _, r = _ratio(estimate, pw[None], pr[None], pl)
            if r[0] > cur:
                cw, cr, cl, cur = pw, pr, pl, float(r[0])
            else:
                sigma *= 0.985
        if cur > best[0]:
            best = (cur, (cw, cr, None if cl is None else float(cl[0])))
    cw, cr, cl = best[1]
    return {"estimate": estimate, "n": n, "trials": trials, "best_ratio": best[0],
            "witness": _witness(estimate, n, cw, cr, cl, best[0])}
