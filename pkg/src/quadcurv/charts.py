"""Finite-difference geometry on a single coordinate chart.

Everything is built from one primitive, :func:`partial`, which differences an
arbitrary vectorised field callback. Derived fields (Christoffel symbols,
curvature, covariant derivatives of curvature) are themselves callbacks, so
higher derivatives are nested differences of the derived field rather than
expanded formulas.

Field callbacks take coordinates of shape ``(..., n)`` and return arrays of
shape ``(..., *components)``. Derivatives append one axis at the end.

Array conventions (coordinate components, all lower indices unless noted):

* ``gamma[..., k, i, j] = Gamma^k_ij``
* ``rm[..., i, j, k, l] = R_ijkl`` with ``R_ijij > 0`` on spheres
* covariant derivative ``t[..., i1, .., ir, a] = t_{i1..ir, a}``
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import invariants as inv
from . import tensors as T
from .errors import ArgumentError, DomainError, GeometryError, UnsupportedDimensionError

# central stencils: offsets and weights for the first derivative
_STENCILS = {
    2: (np.array([-1.0, 1.0]), np.array([-0.5, 0.5])),
    4: (np.array([-2.0, -1.0, 1.0, 2.0]), np.array([1 / 12, -2 / 3, 2 / 3, -1 / 12])),
    6: (np.array([-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]),
        np.array([-1 / 60, 3 / 20, -3 / 4, 3 / 4, -3 / 20, 1 / 60])),
}


@dataclass(frozen=True)
class FDConfig:
    """Step (scalar or per coordinate), stencil order, Richardson on/off."""

    h: float | tuple = 1e-3
    order: int = 4
    richardson: bool = False

    def __post_init__(self):
        if self.order not in _STENCILS:
            raise ArgumentError(f"stencil order must be 2, 4 or 6, got {self.order}")
        if np.any(np.asarray(self.h, dtype=float) <= 0):
            raise ArgumentError("FD step must be positive")

    def steps(self, n: int) -> np.ndarray:
        h = np.broadcast_to(np.asarray(self.h, dtype=float), (n,))
        return np.array(h)

    @property
    def reach(self) -> float:
        """Largest stencil offset in units of h."""
        return float(self.order // 2)

    def halved(self) -> "FDConfig":
        h = np.atleast_1d(np.asarray(self.h, dtype=float)) / 2
        return FDConfig(float(h[0]) if h.size == 1 else tuple(h), self.order, self.richardson)


def default_config(chart: "MetricChart", depth: int, order: int = 4) -> FDConfig:
    """Step tuned to the nesting depth (roundoff grows like eps / h^depth)."""
    rel = {0: 1e-3, 1: 1e-3, 2: 1e-3, 3: 1.5e-3, 4: 2e-3}[min(max(depth, 0), 4)]
    return FDConfig(chart.scale * rel, order)


@dataclass(frozen=True, eq=False)
class MetricChart:
    """Box chart ``domain[i] = (lo, hi)``; periodic coordinates have period hi - lo."""

    n: int
    domain: tuple
    metric_fn: Callable
    periodic: tuple = ()
    name: str = "chart"

    def __post_init__(self):
        dom = np.asarray(self.domain, dtype=float)
        if dom.shape != (self.n, 2) or np.any(dom[:, 1] <= dom[:, 0]):
            raise ArgumentError("domain must be n pairs (lo, hi) with lo < hi")
        object.__setattr__(self, "domain", dom)
        per = tuple(bool(p) for p in self.periodic) or (False,) * self.n
        if len(per) != self.n:
            raise ArgumentError("periodic flags must have length n")
        object.__setattr__(self, "periodic", per)

    @property
    def scale(self) -> float:
        return float(np.min(self.domain[:, 1] - self.domain[:, 0]))

    def wrap(self, x):
        x = np.array(x, dtype=float)
        lo, hi = self.domain[:, 0], self.domain[:, 1]
        for i, p in enumerate(self.periodic):
            if p:
                x[..., i] = lo[i] + np.mod(x[..., i] - lo[i], hi[i] - lo[i])
        return x

    def check_domain(self, x, margin=0.0):
        lo, hi = self.domain[:, 0], self.domain[:, 1]
        free = ~np.array(self.periodic)
        if not free.any():
            return
        xs = x[..., free]
        bad = (xs < lo[free] + margin) | (xs > hi[free] - margin)
        if bad.any():
            where = np.argwhere(bad.any(axis=-1))[0]
            raise DomainError(f"point outside chart {self.name!r} (margin {margin:g})",
                              point=x[tuple(where)].tolist())

    def metric(self, x):
        x = self.wrap(x)
        self.check_domain(x)
        g = np.asarray(self.metric_fn(x), dtype=float)
        try:
            np.linalg.cholesky(g)
        except np.linalg.LinAlgError:
            ev = np.linalg.eigvalsh(g)
            where = np.argwhere(ev[..., 0] <= 0)[0]
            raise GeometryError("metric is not positive definite",
                                point=x[tuple(where)].tolist()) from None
        return g

    def safe_margin(self, cfg: FDConfig, depth: int) -> float:
        """Distance from the boundary a stencil of the given depth reaches."""
        return float(np.max(cfg.steps(self.n))) * cfg.reach * depth * (2 if cfg.richardson else 1)


# ---------------------------------------------------------------------------
# the difference primitive

def _partial_once(field, x, h, offs, coef):
    n = x.shape[-1]
    eye = np.eye(n)
    disp = offs[:, None, None] * (h[:, None] * eye)[None, :, :]  # (m, n_dir, n)
    pts = x[..., None, None, :] + disp
    f = np.asarray(field(pts))
    b = x.ndim - 1
    f = np.moveaxis(f, (b, b + 1), (-2, -1))  # (..., *comps, m, n_dir)
    return np.einsum("...ma,m->...a", f, coef) / h


def partial(field, x, cfg: FDConfig):
    """Coordinate derivative of a field callback; derivative index last."""
    x = np.asarray(x, dtype=float)
    offs, coef = _STENCILS[cfg.order]
    h = cfg.steps(x.shape[-1])
    d = _partial_once(field, x, h, offs, coef)
    if cfg.richardson:
        p = 2 ** cfg.order
        d = (p * _partial_once(field, x, h / 2, offs, coef) - d) / (p - 1)
    return d


# ---------------------------------------------------------------------------
# derived field callbacks

def _inv(g):
    return np.linalg.inv(g)


def christoffel(chart: MetricChart, x, cfg: FDConfig):
    """Gamma^k_ij at x, shape (..., n, n, n) with the upper index first."""
    g = chart.metric(x)
    dg = partial(chart.metric, x, cfg)  # dg[..., i, j, a] = d_a g_ij
    low = 0.5 * (np.einsum("...jki->...kij", dg) + np.einsum("...ikj->...kij", dg)
                 - np.einsum("...ijk->...kij", dg))
    return np.einsum("...kl,...lij->...kij", _inv(g), low)


def riemann_with_gamma(chart, x, cfg):
    """(R_ijkl, Gamma) at x."""
    G = christoffel(chart, x, cfg)
    dG = partial(lambda y: christoffel(chart, y, cfg), x, cfg)  # [r, a, b, m] = d_m G^r_ab
    up = (np.einsum("...rnsm->...rsmn", dG) - np.einsum("...rmsn->...rsmn", dG)
          + np.einsum("...rml,...lns->...rsmn", G, G) - np.einsum("...rnl,...lms->...rsmn", G, G))
    g = chart.metric(x)
    return np.einsum("...ra,...asmn->...rsmn", g, up), G


def riemann(chart, x, cfg):
    return riemann_with_gamma(chart, x, cfg)[0]


def ricci(chart, x, cfg):
    rm = riemann(chart, x, cfg)
    return T.ricci_contract(rm, _inv(chart.metric(x)))


def scalar(chart, x, cfg):
    ric = ricci(chart, x, cfg)
    return T.trace(ric, _inv(chart.metric(x)))


_LET = "bcdefghijk"


def _connection_terms(G, t, rank):
    """sum over slots m of Gamma^z_{a i_m} t[.., z, ..], derivative a appended."""
    out = 0.0
    slots = _LET[:rank]
    for m in range(rank):
        tin = slots[:m] + "z" + slots[m + 1:]
        out = out + np.einsum(f"...za{slots[m]},...{tin}->...{slots}a", G, t)
    return out


def covariant_field(chart, field, rank, cfg):
    """Callback for the covariant derivative of a covariant rank-``rank`` field."""

    def nabla(y):
        d = partial(field, y, cfg)
        return d - _connection_terms(christoffel(chart, y, cfg), field(y), rank)

    return nabla


def covariant_derivative(field, chart, x, cfg, rank):
    return covariant_field(chart, field, rank, cfg)(x)


def second_covariant_derivative(field, chart, x, cfg, rank):
    """t_{i..,ab} = nabla_b nabla_a t; the two derivative slots are last."""
    inner = covariant_field(chart, field, rank, cfg)
    return covariant_field(chart, inner, rank + 1, cfg)(x)


def laplacian(field, chart, x, cfg, rank):
    """g^ab t_{..,ab}."""
    dd = second_covariant_derivative(field, chart, x, cfg, rank)
    return np.einsum("...ab,...ab->...", _bcast(_inv(chart.metric(x)), rank), dd)


def _bcast(ginv, rank):
    return ginv.reshape(ginv.shape[:-2] + (1,) * rank + ginv.shape[-2:])


def fields_for(chart: MetricChart, cfg: FDConfig) -> dict:
    """Named coordinate field callbacks sharing one configuration."""
    ginv = lambda y: _inv(chart.metric(y))
    rm = lambda y: riemann(chart, y, cfg)
    ric = lambda y: T.ricci_contract(rm(y), ginv(y))
    R = lambda y: T.trace(ric(y), ginv(y))

    def ric0(y):
        g = chart.metric(y)
        return T.traceless(ric(y), g, _inv(g))

    def weyl(y):
        g = chart.metric(y)
        return T.weyl_part(rm(y), g, _inv(g))

    d_ric = covariant_field(chart, ric, 2, cfg)
    return {"g": chart.metric, "ginv": ginv, "rm": rm, "ric": ric, "R": R,
            "ric0": ric0, "weyl": weyl, "d_ric": d_ric}


def chart_pack(chart: MetricChart, x, cfg: FDConfig | None = None, depth: int = 0) -> inv.CurvaturePack:
    """Curvature pack at coordinate points x (shape (k, n) or (n,))."""
    if depth not in (0, 1, 2):
        raise ArgumentError("depth must be 0, 1 or 2")
    x = chart.wrap(np.atleast_2d(np.asarray(x, dtype=float)))
    cfg = cfg or default_config(chart, depth + 2)
    chart.check_domain(x, chart.safe_margin(cfg, depth + 2))
    f = fields_for(chart, cfg)
    g = chart.metric(x)
    rm = f["rm"](x)
    d_ric = f["d_ric"](x) if depth >= 1 else None
    dd_ric = covariant_field(chart, f["d_ric"], 3, cfg)(x) if depth >= 2 else None
    return inv.pack_from_coordinates(g, rm, d_ric, dd_ric, point=x)


def cotton_from_chart(chart: MetricChart, x, cfg: FDConfig | None = None) -> dict:
    """Cotton tensor (frame components) from both defining forms.

    The traceless form differences R0 and R as separate fields.
    """
    x = chart.wrap(np.atleast_2d(np.asarray(x, dtype=float)))
    cfg = cfg or default_config(chart, 3)
    f = fields_for(chart, cfg)
    e = T.orthonormal_frame(chart.metric(x))
    d_ric = T.to_frame(f["d_ric"](x), e, 3)
    c1 = inv.cotton_from_dric(d_ric)
    d_ric0 = T.to_frame(covariant_field(chart, f["ric0"], 2, cfg)(x), e, 3)
    d_R = T.to_frame(partial(f["R"], x, cfg), e, 1)
    c2 = inv.cotton_from_dric0(d_ric0, d_R)
    return {"ricci_form": c1, "traceless_form": c2, "difference": inv._mx(c1 - c2)}


def cotton_field(chart, cfg):
    ric_d = fields_for(chart, cfg)["d_ric"]

    def c(y):
        d = ric_d(y)
        g = chart.metric(y)
        dR = np.einsum("...ij,...ija->...a", _inv(g), d)
        n = chart.n
        out = np.einsum("...kji->...ijk", d) - np.einsum("...kij->...ijk", d)
        out -= (np.einsum("...i,...jk->...ijk", dR, g) - np.einsum("...j,...ik->...ijk", dR, g)) / (2 * (n - 1))
        return out

    return c


def cotton_divergences(chart: MetricChart, x, cfg: FDConfig | None = None) -> dict:
    """C_ijk,k and C_ijk,i in frame components (nested differencing of C)."""
    x = chart.wrap(np.atleast_2d(np.asarray(x, dtype=float)))
    cfg = cfg or default_config(chart, 4)
    dc = covariant_field(chart, cotton_field(chart, cfg), 3, cfg)(x)
    e = T.orthonormal_frame(chart.metric(x))
    dc = T.to_frame(dc, e, 4)
    return {"third": np.einsum("...ijkk->...ij", dc), "first": np.einsum("...ijki->...jk", dc)}


def weyl_divergence_check(chart: MetricChart, x, cfg: FDConfig | None = None) -> dict:
    """max |W_ijkl,l + (n-3)/(n-2) C_ijk| over x, frame components."""
    n = chart.n
    if n < 4:
        raise UnsupportedDimensionError("the Weyl divergence relation needs n >= 4")
    x = chart.wrap(np.atleast_2d(np.asarray(x, dtype=float)))
    cfg = cfg or default_config(chart, 3)
    f = fields_for(chart, cfg)
    e = T.orthonormal_frame(chart.metric(x))
    dw = T.to_frame(covariant_field(chart, f["weyl"], 4, cfg)(x), e, 5)
    div_w = np.einsum("...ijkll->...ijk", dw)
    c = inv.cotton_from_dric(T.to_frame(f["d_ric"](x), e, 3))
    res = div_w + (n - 3) / (n - 2) * c
    return {"residual": inv._mx(res), "per_point": np.max(np.abs(res), axis=(-1, -2, -3)),
            "div_weyl": div_w, "cotton": c}


def bach(chart: MetricChart, x, cfg: FDConfig | None = None, form: str = "pre6") -> np.ndarray:
    """Bach tensor in frame components.

    ``form="pre6"`` uses one derivative of Cotton (n = 3 gives C_kij,k);
    ``form="pre5"`` uses two derivatives of Weyl and needs n >= 4.
    """
    x = chart.wrap(np.atleast_2d(np.asarray(x, dtype=float)))
    cfg = cfg or default_config(chart, 4)
    n = chart.n
    if form == "pre6":
        return chart_pack(chart, x, cfg, depth=2).bach
    if form != "pre5":
        raise ArgumentError(f"unknown Bach form {form!r}")
    if n < 4:
        raise UnsupportedDimensionError("the double-divergence form needs n >= 4")
    f = fields_for(chart, cfg)
    e = T.orthonormal_frame(chart.metric(x))
    ddw = second_covariant_derivative(f["weyl"], chart, x, cfg, 4)
    ddw = T.to_frame(ddw, e, 6)
    w = T.to_frame(f["weyl"](x), e, 4)
    ric = T.to_frame(f["ric"](x), e, 2)
    return np.einsum("...ikjllk->...ij", ddw) / (n - 3) + T.curv_sym(w, ric) / (n - 2)


def metric_compatibility(chart: MetricChart, x, cfg: FDConfig | None = None) -> float:
    """max |nabla g| (should vanish up to stencil error)."""
    x = chart.wrap(np.atleast_2d(np.asarray(x, dtype=float)))
    cfg = cfg or default_config(chart, 1)
    return inv._mx(covariant_field(chart, chart.metric, 2, cfg)(x))
