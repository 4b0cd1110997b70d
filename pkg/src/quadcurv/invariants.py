"""Curvature packs: every pointwise invariant in one orthonormal frame.

A :class:`CurvaturePack` holds stacked arrays for a batch of points. Components
are always taken on an orthonormal frame, so indices can be moved freely. The
derivative slot of a covariant derivative is the last axis, e.g.
``d_ric[..., i, j, a] = R_ij,a`` and ``d_cotton[..., i, j, k, a] = C_ijk,a``.

Depth counts how many derivatives of curvature are present:

* 0: rm, ric, R, ric0, weyl
* 1: additionally d_ric, d_R, d_ric0, cotton
* 2: additionally hess_R, lap_ric0, d_cotton, div_cotton, bach
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import tensors as T

# derivative order of each field; a metric scaling g -> c^2 g multiplies frame
# components by c^-(2 + order)
_ORDER = {
    "rm": 0, "ric": 0, "R": 0, "ric0": 0, "weyl": 0,
    "d_ric": 1, "d_R": 1, "d_ric0": 1, "cotton": 1, "div_weyl": 1,
    "hess_R": 2, "lap_ric0": 2, "d_cotton": 2, "div_cotton": 2, "bach": 2,
}


@dataclass(frozen=True, eq=False)
class CurvaturePack:
    n: int
    rm: np.ndarray
    ric: np.ndarray
    R: np.ndarray
    ric0: np.ndarray
    weyl: np.ndarray
    depth: int = 0
    point: np.ndarray | None = None
    d_ric: np.ndarray | None = None
    d_R: np.ndarray | None = None
    d_ric0: np.ndarray | None = None
    cotton: np.ndarray | None = None
    div_weyl: np.ndarray | None = None
    hess_R: np.ndarray | None = None
    lap_ric0: np.ndarray | None = None
    d_cotton: np.ndarray | None = None
    div_cotton: np.ndarray | None = None
    bach: np.ndarray | None = None
    norms: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.norms:
            object.__setattr__(self, "norms", _norms(self))

    @property
    def shape(self) -> tuple:
        return np.shape(self.R)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape, dtype=int))

    def scaled(self, c: float) -> "CurvaturePack":
        """Pack of the metric c^2 g (same points)."""
        upd = {}
        for name, k in _ORDER.items():
            v = getattr(self, name)
            if v is not None:
                upd[name] = v * c ** (-(2 + k))
        return replace(self, norms={}, **upd)

    def take(self, idx) -> "CurvaturePack":
        """Sub-pack at flat indices ``idx`` of the batch."""
        idx = np.atleast_1d(np.asarray(idx))
        upd = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, np.ndarray) and f.name != "norms":
                flat = v.reshape((self.size,) + v.shape[len(self.shape):])
                upd[f.name] = flat[idx]
        return replace(self, norms={}, **upd)

    def flat(self) -> "CurvaturePack":
        return self.take(np.arange(self.size))

    def validate(self) -> dict:
        """Max residuals of the structural invariants (recomputed)."""
        out = {
            "ric_contraction": _mx(self.ric - T.ricci_contract(self.rm)),
            "scalar_trace": _mx(self.R - T.trace(self.ric)),
            "ric0_trace": _mx(T.trace(self.ric0)),
            "weyl_traces": _mx(T.single_traces(self.weyl)),
            "rm_symmetry": T.curvature_symmetry_residual(self.rm),
            "rm_bianchi": _mx(T.bianchi_sum(self.rm)),
        }
        if self.cotton is not None:
            c = self.cotton
            out["cotton_antisym"] = _mx(c + np.swapaxes(c, -3, -2))
            out["cotton_traces"] = max(_mx(np.einsum("...iik->...k", c)),
                                       _mx(np.einsum("...iji->...j", c)),
                                       _mx(np.einsum("...ijj->...i", c)))
            out["cotton_cyclic"] = _mx(c + np.einsum("...jki->...ijk", c)
                                       + np.einsum("...kij->...ijk", c))
        if self.hess_R is not None:
            out["hess_R_asym"] = _mx(self.hess_R - np.swapaxes(self.hess_R, -1, -2))
        if self.bach is not None:
            out["bach_asym"] = _mx(self.bach - np.swapaxes(self.bach, -1, -2))
            out["bach_trace"] = _mx(T.trace(self.bach))
        recomputed = _norms(self)
        out["norms"] = max(_mx(np.asarray(recomputed[k]) - np.asarray(v))
                           / max(1.0, _mx(v)) for k, v in self.norms.items())
        return out

    def records(self, full: bool = False) -> list[dict]:
        """One JSON-ready dict per point."""
        flat = self.flat()
        out = []
        for p in range(flat.size):
            rec = {"point": None if flat.point is None else flat.point[p].tolist(),
                   "R": float(flat.R[p])}
            for key in ("norm_Rm2", "norm_W2", "norm_Ric0_2", "norm_C2", "norm_dR2"):
                if key in flat.norms:
                    rec[key] = float(flat.norms[key][p])
            if full:
                tens = {}
                for name in ("rm", "ric", "ric0", "weyl", "cotton", "hess_R", "bach"):
                    v = getattr(flat, name)
                    if v is not None:
                        tens[name] = v[p]
                rec["tensors"] = tens
            out.append(rec)
        return out


def _mx(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def _norms(p: CurvaturePack) -> dict:
    out = {
        "norm_Rm2": T.norm2(p.rm, rank=4),
        "norm_W2": T.norm2(p.weyl, rank=4),
        "norm_Ric2": T.norm2(p.ric, rank=2),
        "norm_Ric0_2": T.norm2(p.ric0, rank=2),
    }
    if p.cotton is not None:
        out["norm_C2"] = T.norm2(p.cotton, rank=3)
    if p.d_R is not None:
        out["norm_dR2"] = T.norm2(p.d_R, rank=1)
    if p.d_ric0 is not None:
        out["norm_dRic0_2"] = T.norm2(p.d_ric0, rank=3)
    return out


# ---------------------------------------------------------------------------
# construction

def weyl_from_riemann(rm, g=None, ginv=None):
    """Weyl tensor by the Ricci form and by the traceless-Ricci form.

    Returns ``(w_ricci, w_traceless, max_difference)``.
    """
    n = rm.shape[-1]
    if g is None:
        g = np.broadcast_to(np.eye(n), rm.shape[:-4] + (n, n))
    w1 = T.weyl_part(rm, g, ginv)
    ric = T.ricci_contract(rm, ginv)
    r = T.trace(ric, ginv)
    r0 = T.traceless(ric, g, ginv)
    gg = T.kn(g, g)
    w2 = rm - T.kn(r0, g) / (n - 2) - (r / (2 * n * (n - 1)))[..., None, None, None, None] * gg
    return w1, w2, _mx(w1 - w2)


def cotton_from_dric(d_ric, d_R=None):
    """C_ijk = R_kj,i - R_ki,j - (R_,i g_jk - R_,j g_ik) / (2(n-1)) (frame)."""
    n = d_ric.shape[-1]
    if d_R is None:
        d_R = np.einsum("...iia->...a", d_ric)
    eye = np.eye(n)
    c = np.einsum("...kji->...ijk", d_ric) - np.einsum("...kij->...ijk", d_ric)
    c -= (np.einsum("...i,jk->...ijk", d_R, eye) - np.einsum("...j,ik->...ijk", d_R, eye)) / (2 * (n - 1))
    return c


def cotton_from_dric0(d_ric0, d_R):
    n = d_ric0.shape[-1]
    eye = np.eye(n)
    c = np.einsum("...kji->...ijk", d_ric0) - np.einsum("...kij->...ijk", d_ric0)
    c += (n - 2) / (2 * n * (n - 1)) * (np.einsum("...i,jk->...ijk", d_R, eye)
                                        - np.einsum("...j,ik->...ijk", d_R, eye))
    return c


def pack_from_frame(rm, d_ric=None, dd_ric=None, point=None) -> CurvaturePack:
    """Build a pack from orthonormal-frame components.

    ``d_ric[..., i, j, a] = R_ij,a`` and ``dd_ric[..., i, j, a, b] = R_ij,ab``.
    """
    n = rm.shape[-1]
    ric = T.ricci_contract(rm)
    R = T.trace(ric)
    ric0 = T.traceless(ric)
    weyl = np.zeros_like(rm) if n == 3 else T.weyl_part(rm)
    kw = dict(n=n, rm=rm, ric=ric, R=R, ric0=ric0, weyl=weyl, point=point)
    if d_ric is None:
        return CurvaturePack(depth=0, **kw)
    eye = np.eye(n)
    d_R = np.einsum("...iia->...a", d_ric)
    d_ric0 = d_ric - np.einsum("ij,...a->...ija", eye, d_R) / n
    cotton = cotton_from_dric(d_ric, d_R)
    kw.update(d_ric=d_ric, d_R=d_R, d_ric0=d_ric0, cotton=cotton)
    if dd_ric is None:
        return CurvaturePack(depth=1, **kw)
    hess_R = np.einsum("...iiab->...ab", dd_ric)
    dd_ric0 = dd_ric - np.einsum("ij,...ab->...ijab", eye, hess_R) / n
    lap_ric0 = np.einsum("...ijaa->...ij", dd_ric0)
    d_cotton = (np.einsum("...kjib->...ijkb", dd_ric) - np.einsum("...kijb->...ijkb", dd_ric)
                - (np.einsum("...ib,jk->...ijkb", hess_R, eye)
                   - np.einsum("...jb,ik->...ijkb", hess_R, eye)) / (2 * (n - 1)))
    div_cotton = np.einsum("...ijki->...jk", d_cotton)
    kw.update(hess_R=hess_R, lap_ric0=lap_ric0, d_cotton=d_cotton, div_cotton=div_cotton,
              bach=bach_from_parts(d_cotton, weyl, ric))
    return CurvaturePack(depth=2, **kw)


def bach_from_parts(d_cotton, weyl, ric):
    """Bach tensor: C_kij,k for n = 3, (C_kij,k + W_ikjl R_kl)/(n-2) otherwise."""
    n = weyl.shape[-1]
    b = np.einsum("...kijk->...ij", d_cotton)
    if n == 3:
        return b
    return (b + T.curv_sym(weyl, ric)) / (n - 2)


def pack_from_coordinates(g, rm, d_ric=None, dd_ric=None, point=None) -> CurvaturePack:
    """Pack from coordinate components, converted with E = chol(g)^-T."""
    e = T.orthonormal_frame(g)
    f = lambda t, k: None if t is None else T.to_frame(t, e, k)
    return pack_from_frame(f(rm, 4), f(d_ric, 3), f(dd_ric, 4), point=point)


def concat(packs: list[CurvaturePack]) -> CurvaturePack:
    """Join flat packs of equal depth into one."""
    first = packs[0]
    upd = {}
    for f in fields(first):
        v = getattr(first, f.name)
        if isinstance(v, np.ndarray) and f.name != "norms":
            upd[f.name] = np.concatenate([getattr(p.flat(), f.name) for p in packs])
    return replace(first, norms={}, **upd)


# ---------------------------------------------------------------------------
# scalar contractions used across the integral identities

def scalar_terms(p: CurvaturePack) -> dict:
    """Pointwise scalars entering the integral identities and estimates."""
    r0 = p.ric0
    out = {
        "W_r0_r0": np.einsum("...ijkl,...jl,...ik->...", p.weyl, r0, r0),
        "tr_r0_3": T.cube_trace(r0),
        "WW_r0": np.einsum("...ij,...ij->...", T.ww(p.weyl), r0),
        "R_r0_2": p.R * p.norms["norm_Ric0_2"],
        "norm_r0": np.sqrt(p.norms["norm_Ric0_2"]),
        "norm_W": np.sqrt(p.norms["norm_W2"]),
    }
    if p.depth >= 1:
        out["norm_dR2"] = p.norms["norm_dR2"]
        out["norm_dRic0_2"] = p.norms["norm_dRic0_2"]
        out["norm_C2"] = p.norms["norm_C2"]
    if p.depth >= 2:
        out["divC_ric"] = np.einsum("...jk,...jk->...", p.div_cotton, p.ric)
    return out


def decomposition_residuals(p: CurvaturePack) -> dict:
    """Residuals of the norm split and the two contracted decompositions.

    ``r17`` is absolute; ``r15`` and ``r16`` are max-norms of the tensor
    differences. ``*_rel`` divide by |Rm|^2 (all three are quadratic).
    """
    n = p.n
    eye = np.eye(n)
    nm = p.norms
    r0 = p.ric0
    R = p.R[..., None, None]
    r0sq = np.einsum("...ik,...jk->...ij", r0, r0)
    n_r0 = nm["norm_Ric0_2"][..., None, None]
    r17 = np.abs(nm["norm_Rm2"] - nm["norm_W2"] - 4 / (n - 2) * nm["norm_Ric0_2"]
                 - 2 / (n * (n - 1)) * p.R ** 2)
    w_r0 = T.curv_sym(p.weyl, r0)
    lhs15 = T.curv_sym(p.rm, r0)
    rhs15 = w_r0 + (n_r0 * eye - 2 * r0sq) / (n - 2) - R * r0 / (n * (n - 1))
    lhs16 = T.ww(p.rm)
    rhs16 = (T.ww(p.weyl) + 4 / (n - 2) * w_r0 + 2 * (n - 4) / (n - 2) ** 2 * r0sq
             + 2 / (n - 2) ** 2 * n_r0 * eye + 2 / (n ** 2 * (n - 1)) * R ** 2 * eye
             + 4 / (n * (n - 1)) * R * r0)
    r15 = np.max(np.abs(lhs15 - rhs15), axis=(-1, -2))
    r16 = np.max(np.abs(lhs16 - rhs16), axis=(-1, -2))
    scale = np.maximum(nm["norm_Rm2"], np.finfo(float).tiny)
    return {"r17": r17, "r15": r15, "r16": r16,
            "r17_rel": r17 / scale, "r15_rel": r15 / scale, "r16_rel": r16 / scale}


def ww_bound(p: CurvaturePack) -> dict:
    """|W_ikpq W_jkpq R0_ij| against sqrt((n-1)/n) |W|^2 |R0|."""
    lhs = np.abs(np.einsum("...ij,...ij->...", T.ww(p.weyl), p.ric0))
    rhs = np.sqrt((p.n - 1) / p.n) * p.norms["norm_W2"] * np.sqrt(p.norms["norm_Ric0_2"])
    return {"lhs": lhs, "rhs": rhs}
