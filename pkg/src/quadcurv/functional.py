"""The quadratic functional F_{t,s}, its Euler-Lagrange system and the integral identities.

``F_{t,s}(g) = int |Ric|^2 + t int R^2 + s int |Rm|^2``.

Criticality is always measured, never assumed: identities that hold only on
critical metrics report the EL residuals alongside and are marked
inapplicable when the metric is not critical.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import tensors as T
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import ArgumentError, BoundaryError, CapabilityError, PreconditionError
from .invariants import CurvaturePack
from .models import ManifoldModel, make_berger_sphere, make_conformal_torus, make_product_spheres


@dataclass(frozen=True)
class FunctionalParams:
    t: float
    s: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and math.isfinite(self.s)):
            raise ArgumentError("t and s must be finite")


@dataclass(frozen=True)
class FunctionalReport:
    model: dict
    t: float
    s: float
    value: float
    components: dict
    volume: float
    normalized: bool

    def to_json(self):
        return {"model": self.model, "t": self.t, "s": self.s, "lambda": self.value,
                "components": self.components, "volume": self.volume, "normalized": self.normalized}


def functional_value(model: ManifoldModel, params: FunctionalParams) -> FunctionalReport:
    ints = model.integrals(0)
    comp = {"ric2": ints["norm_Ric2"], "R2": ints["R2"], "rm2": ints["norm_Rm2"]}
    value = comp["ric2"] + params.t * comp["R2"] + params.s * comp["rm2"]
    return FunctionalReport(model.descriptor(), params.t, params.s, value, comp, model.volume,
                            model.unit_volume)


def pointwise_integrand(pack: CurvaturePack, params: FunctionalParams):
    nm = pack.norms
    return nm["norm_Ric2"] + params.t * pack.R ** 2 + params.s * nm["norm_Rm2"]


# ---------------------------------------------------------------------------
# Euler-Lagrange residuals

def _require_depth(pack, d):
    if pack.depth < d:
        raise CapabilityError(f"pack depth {pack.depth} < {d} required")


def traceless_residuals(pack: CurvaturePack, params: FunctionalParams) -> dict:
    """LHS - RHS of the traceless EL equation in its curvature and Weyl forms.

    Returns per-point tensors ``first``/``second`` and a magnitude ``scale``.
    """
    _require_depth(pack, 2)
    n, t, s = pack.n, params.t, params.s
    eye = np.eye(n)
    r0, R, w = pack.ric0, pack.R[..., None, None], pack.weyl
    nm = pack.norms
    r0sq = np.einsum("...ik,...jk->...ij", r0, r0)
    n_r0 = nm["norm_Ric0_2"][..., None, None]
    lap_R = T.trace(pack.hess_R)[..., None, None]
    lhs = (1 + 4 * s) * pack.lap_ric0
    a = 1 + 2 * t + 2 * s
    terms1 = [
        a * pack.hess_R,
        -a / n * lap_R * eye,
        -2 * (1 + 2 * s) * T.curv_sym(pack.rm, r0),
        -(2 + 2 * n * t - 4 * s) / n * R * r0,
        2 / n * (n_r0 + s * nm["norm_Rm2"][..., None, None]) * eye,
        -2 * s * T.ww(pack.rm),
        4 * s * r0sq,
    ]
    k = 4 * s * (n * n - 3 * n + 4) + 4 * (n - 2)
    hess0 = pack.hess_R - lap_R / n * eye
    terms2 = [
        a * hess0,
        -(2 * (n - 2) + 4 * n * s) / (n - 2) * T.curv_sym(w, r0),
        -2 * s * T.ww(w),
        (-k / (n * (n - 2) ** 2) * n_r0 + 2 * s / n * nm["norm_W2"][..., None, None]) * eye,
        k / (n - 2) ** 2 * r0sq,
        (4 - 2 * n - 2 * n * (n - 1) * t + 4 * (n - 2) * s) / (n * (n - 1)) * R * r0,
    ]
    first = lhs - sum(terms1)
    second = lhs - sum(terms2)
    mags = [np.max(np.abs(x), axis=(-1, -2)) for x in [lhs] + terms1 + terms2]
    return {"first": first, "second": second, "scale": np.max(np.stack(mags), axis=0)}


def scalar_residuals(pack: CurvaturePack, params: FunctionalParams, lam: float) -> dict:
    """LHS - RHS of the trace EL equation in both printed forms (per point)."""
    _require_depth(pack, 2)
    n, t, s = pack.n, params.t, params.s
    nm = pack.norms
    lhs = (n + 4 * (n - 1) * t + 4 * s) * T.trace(pack.hess_R)
    rhs1 = (n - 4) * (nm["norm_Ric2"] + t * pack.R ** 2 + s * nm["norm_Rm2"] - lam)
    rhs2 = (n - 4) * (s * nm["norm_W2"] + (n - 2 + 4 * s) / (n - 2) * nm["norm_Ric0_2"]
                      + (n - 1 + n * (n - 1) * t + 2 * s) / (n * (n - 1)) * pack.R ** 2 - lam)
    scale = np.maximum.reduce([np.abs(lhs), np.abs(rhs1), np.abs(rhs2),
                               np.abs((n - 4) * lam) * np.ones_like(lhs)])
    return {"first": lhs - rhs1, "second": lhs - rhs2, "lhs": lhs, "scale": scale}


@dataclass
class ELResidualReport:
    model: dict
    t: float
    s: float
    kind: str
    points: np.ndarray
    sup_first: float
    sup_second: float
    form_gap: float
    scale: float
    closed_form: bool
    tolerance: float
    flags: list = field(default_factory=list)
    per_point: dict = field(default_factory=dict)

    @property
    def relative(self) -> float:
        return max(self.sup_first, self.sup_second) / max(self.scale, 1.0)

    @property
    def ok(self) -> bool:
        return self.relative <= self.tolerance

    def to_json(self):
        return {"model": self.model, "t": self.t, "s": self.s, "equation": self.kind,
                "sampled_points": len(self.points), "sup_first": self.sup_first,
                "sup_second": self.sup_second, "form_gap": self.form_gap, "scale": self.scale,
                "relative": self.relative, "closed_form": self.closed_form,
                "tolerance": self.tolerance, "ok": self.ok, "flags": self.flags}


def _el_points(model, points, k, seed):
    return model.sample_points(1 if model.homogeneous else k, seed) if points is None else points


def _el_tol(model, tol):
    return tol.el_closed_form if model.closed_form is not None else tol.el_fd_rel


def el_residual_traceless(model: ManifoldModel, params: FunctionalParams, points=None, k: int = 5,
                          seed: int = 0, tol: Tolerances = DEFAULT_TOLERANCES) -> ELResidualReport:
    pts = _el_points(model, points, k, seed)
    pack = model.pack_at(pts, depth=2)
    r = traceless_residuals(pack, params)
    mx = lambda a: float(np.max(np.abs(a)))
    return ELResidualReport(model.descriptor(), params.t, params.s, "traceless", pts,
                            mx(r["first"]), mx(r["second"]), mx(r["first"] - r["second"]),
                            float(np.max(r["scale"])), model.closed_form is not None,
                            _el_tol(model, tol),
                            per_point={"first": np.max(np.abs(r["first"]), axis=(-1, -2)),
                                       "second": np.max(np.abs(r["second"]), axis=(-1, -2))})


def el_residual_scalar(model: ManifoldModel, params: FunctionalParams, points=None, k: int = 5,
                       seed: int = 0, tol: Tolerances = DEFAULT_TOLERANCES) -> ELResidualReport:
    if not model.unit_volume:
        raise PreconditionError("scalar EL equation needs a unit-volume model; call "
                                "normalize_unit_volume first", gate="unit_volume")
    lam = functional_value(model, params).value
    pts = _el_points(model, points, k, seed)
    pack = model.pack_at(pts, depth=2)
    r = scalar_residuals(pack, params, lam)
    flags = ["n4-lhs-only"] if model.n == 4 else []
    return ELResidualReport(model.descriptor(), params.t, params.s, "scalar", pts,
                            float(np.max(np.abs(r["first"]))), float(np.max(np.abs(r["second"]))),
                            float(np.max(np.abs(r["first"] - r["second"]))), float(np.max(r["scale"])),
                            model.closed_form is not None, _el_tol(model, tol), flags,
                            per_point={"first": np.abs(r["first"]), "second": np.abs(r["second"])})


def criticality(model: ManifoldModel, params: FunctionalParams, k: int = 5, seed: int = 0,
                tol: Tolerances = DEFAULT_TOLERANCES) -> dict:
    """Both EL residuals on the unit-volume rescaling of the model."""
    unit, _ = model.normalize_unit_volume()
    a = el_residual_traceless(unit, params, k=k, seed=seed, tol=tol)
    b = el_residual_scalar(unit, params, k=k, seed=seed, tol=tol)
    return {"critical": a.ok and b.ok, "traceless": a.to_json(), "scalar": b.to_json()}


# ---------------------------------------------------------------------------
# integral identities

IDENTITIES = ("lemma21", "lemma22", "combined48", "combined49", "cotton_div", "lcf_1030", "n3_93")
_CRITICAL_ONLY = {"lemma21", "combined48", "combined49", "lcf_1030", "n3_93"}
_DEPTH = {"cotton_div": 2}


def _terms(identity, n, t, s, I):
    """(lhs terms, rhs terms) as lists of (name, coefficient * integral)."""
    k = 4 * s * (n * n - 3 * n + 4) + 4 * (n - 2)
    A = n + 4 * (n - 1) * t + 4 * s
    B = 3 * n - 4 + 2 * n * (n - 1) * t + 8 * s
    if identity == "lemma22":
        return ([("grad_r0", I["norm_dRic0_2"])],
                [("W_r0_r0", I["W_r0_r0"]), ("tr_r0_3", -n / (n - 2) * I["tr_r0_3"]),
                 ("R_r0_2", -I["R_r0_2"] / (n - 1)),
                 ("grad_R", (n - 2) ** 2 / (4 * n * (n - 1)) * I["norm_dR2"]),
                 ("cotton", 0.5 * I["norm_C2"])])
    if identity == "lemma21":
        return ([("grad_r0", (1 + 4 * s) * I["norm_dRic0_2"])],
                [("grad_R", (n - 2) * (1 + 2 * t + 2 * s) / (2 * n) * I["norm_dR2"]),
                 ("W_r0_r0", (2 * (n - 2) + 4 * n * s) / (n - 2) * I["W_r0_r0"]),
                 ("WW_r0", 2 * s * I["WW_r0"]),
                 ("tr_r0_3", -k / (n - 2) ** 2 * I["tr_r0_3"]),
                 ("R_r0_2", -(4 - 2 * n - 2 * n * (n - 1) * t + 4 * (n - 2) * s) / (n * (n - 1)) * I["R_r0_2"])])
    if identity == "combined48":
        return ([], [("W_r0_r0", (n - 2 + 8 * s) / (n - 2) * I["W_r0_r0"]),
                     ("tr_r0_3", (n - 4) * (4 * s + n - 2) / (n - 2) ** 2 * I["tr_r0_3"]),
                     ("WW_r0", 2 * s * I["WW_r0"]),
                     ("R_r0_2", B / (n * (n - 1)) * I["R_r0_2"]),
                     ("grad_R", (n - 2) * A / (4 * n * (n - 1)) * I["norm_dR2"]),
                     ("cotton", -(1 + 4 * s) / 2 * I["norm_C2"])])
    if identity == "combined49":
        d = 8 * s + n - 2
        return ([], [("W_r0_r0", -I["W_r0_r0"]),
                     ("tr_r0_3", -(n - 4) * (4 * s + n - 2) / ((n - 2) * d) * I["tr_r0_3"]),
                     ("WW_r0", -2 * (n - 2) * s / d * I["WW_r0"]),
                     ("R_r0_2", -(n - 2) * B / (n * (n - 1) * d) * I["R_r0_2"]),
                     ("grad_R", -(n - 2) ** 2 * A / (4 * n * (n - 1) * d) * I["norm_dR2"]),
                     ("cotton", (n - 2) * (1 + 4 * s) / (2 * d) * I["norm_C2"])])
    if identity == "cotton_div":
        return ([("divC_ric", I["divC_ric"])], [("cotton", -0.5 * I["norm_C2"])])
    if identity == "lcf_1030":
        return ([], [("grad_r0", (n - 4) * ((n - 2) + 4 * s) / (n - 2) * I["norm_dRic0_2"]),
                     ("R_r0_2", -2 * n * ((n - 1) * (n - 2) * t + 2 * s + (n - 2)) / ((n - 1) * (n - 2)) * I["R_r0_2"]),
                     ("grad_R", -(n - 2) * (2 * n * (n - 1) * t + 4 * (n - 2) * s + (n * n - 3 * n + 4))
                      / (2 * n * (n - 1)) * I["norm_dR2"]),
                     ("cotton", 2 * ((n - 2) + (n * n - 3 * n + 4) * s) / (n - 2) * I["norm_C2"])])
    if identity == "n3_93":
        return ([], [("grad_r0", (1 + 4 * s) * I["norm_dRic0_2"]),
                     ("R_r0_2", 3 * (2 * t + 2 * s + 1) * I["R_r0_2"]),
                     ("grad_R", (3 * t + s + 1) / 3 * I["norm_dR2"]),
                     ("cotton", -2 * (1 + 4 * s) * I["norm_C2"])])
    raise ArgumentError(f"unknown identity {identity!r}; expected one of {', '.join(IDENTITIES)}")


@dataclass
class IdentityReport:
    identity: str
    model: dict
    t: float | None
    s: float | None
    lhs: float
    rhs: float
    gap: float
    relative_gap: float
    terms: dict
    applicability: dict
    tolerance: float
    error_estimate: dict = field(default_factory=dict)

    @property
    def applicable(self) -> bool:
        return all(v is not False for v in self.applicability.values() if isinstance(v, bool))

    @property
    def ok(self) -> bool:
        return self.relative_gap <= self.tolerance

    @property
    def verdict(self) -> str:
        if not self.applicable:
            return "inapplicable"
        return "pass" if self.ok else "fail"

    def to_json(self):
        return {"identity": self.identity, "model": self.model, "t": self.t, "s": self.s,
                "lhs": self.lhs, "rhs": self.rhs, "gap": self.gap, "relative_gap": self.relative_gap,
                "terms": self.terms, "applicability": self.applicability, "tolerance": self.tolerance,
                "error_estimate": self.error_estimate, "verdict": self.verdict}


def identity_check(model: ManifoldModel, identity: str, params: FunctionalParams | None = None,
                   tol: Tolerances = DEFAULT_TOLERANCES, el_points: int = 5) -> IdentityReport:
    if identity not in IDENTITIES:
        raise ArgumentError(f"unknown identity {identity!r}; expected one of {', '.join(IDENTITIES)}")
    n = model.n
    needs_params = identity in _CRITICAL_ONLY
    if needs_params and params is None:
        raise PreconditionError(f"{identity} needs --t and --s", gate="params")
    t, s = (params.t, params.s) if params is not None else (0.0, 0.0)
    app = {}
    if identity == "n3_93" and n != 3:
        raise PreconditionError("n3_93 applies to n = 3 only", gate="dimension")
    if identity == "combined49" and abs(8 * s + n - 2) <= tol.boundary:
        raise PreconditionError("combined49 needs 8s + n - 2 != 0", gate="8s+n-2")
    depth = _DEPTH.get(identity, 1)
    if identity == "lcf_1030":
        w = model.max_over_nodes("norm_W", 0)
        scale = max(1.0, model.max_over_nodes("norm_Rm2", 0) ** 0.5)
        app["lcf"] = bool(w <= tol.lcf_rel * scale if model.closed_form else w <= tol.lcf_fd_rel * scale)
        app["max_abs_W"] = w
        if not app["lcf"]:
            raise PreconditionError(f"lcf_1030 needs W = 0 (max |W| = {w:.3g})", gate="lcf")
    if needs_params:
        crit = criticality(model, params, k=el_points, tol=tol)
        app["critical"] = crit["critical"]
        app["el_traceless_relative"] = crit["traceless"]["relative"]
        app["el_scalar_relative"] = crit["scalar"]["relative"]
    I = model.integrals(depth)
    lhs_t, rhs_t = _terms(identity, n, t, s, I)
    lhs = sum(v for _, v in lhs_t)
    rhs = sum(v for _, v in rhs_t)
    mags = [abs(v) for _, v in lhs_t + rhs_t]
    denom = max(abs(lhs), abs(rhs)) if lhs_t else max(mags) if mags else 0.0
    gap = abs(lhs - rhs)
    rel = gap / denom if denom > 0 else 0.0
    if model.closed_form is not None:
        tol_v = tol.homogeneous_identity_rel
    else:
        tol_v = tol.quadrature_identity_rel
    terms = {f"lhs:{k}": v for k, v in lhs_t}
    terms.update({f"rhs:{k}": v for k, v in rhs_t})
    err = {"quadrature": "single node (homogeneous)" if model.homogeneous else f"grid {model.grid}^{n}"}
    return IdentityReport(identity, model.descriptor(), None if params is None else t,
                          None if params is None else s, lhs, rhs, gap, rel, terms, app, tol_v, err)


# ---------------------------------------------------------------------------
# finite-dimensional families

FAMILIES = ("product-spheres", "berger", "conformal-torus")


@dataclass(frozen=True)
class Family:
    name: str
    build: callable
    lower: np.ndarray
    upper: np.ndarray
    x0: np.ndarray

    def valid(self, x) -> bool:
        return bool(np.all(x > self.lower) and np.all(x <= self.upper))

    def value(self, x, params: FunctionalParams) -> float:
        if not self.valid(x):
            raise BoundaryError(f"{self.name} family left its domain at {np.asarray(x).tolist()}")
        unit, _ = self.build(x).normalize_unit_volume()
        return functional_value(unit, params).value


def make_family(name: str, **opts) -> Family:
    inf = np.inf
    if name == "product-spheres":
        p, q = int(opts.get("p", 2)), int(opts.get("q", 2))
        # after unit-volume normalisation only the ratio r1 / r2 matters
        return Family(name, lambda x: make_product_spheres(p, x[0], q, 1.0),
                      np.zeros(1), np.full(1, inf), np.array([1.3]))
    if name == "berger":
        return Family(name, lambda x: make_berger_sphere(x[0]), np.zeros(1), np.full(1, 2.0),
                      np.array([0.7]))
    if name == "conformal-torus":
        n, m, grid = int(opts.get("n", 3)), int(opts.get("modes", 2)), int(opts.get("grid", 16))
        return Family(name, lambda x: make_conformal_torus(n, list(x), grid),
                      np.full(m, -inf), np.full(m, inf), np.full(m, 0.05))
    raise ArgumentError(f"unknown family {name!r}; expected one of {', '.join(FAMILIES)}")


def _steps(x):
    return 1e-3 * np.maximum(np.abs(x), 1.0)


def restricted_gradient(family: Family, params: FunctionalParams, x) -> np.ndarray:
    """Sixth-order central differences of the unit-volume functional."""
    x = np.asarray(x, dtype=float)
    h = _steps(x)
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h[i]
        f = np.array([family.value(x + m * e, params) for m in (-3, -2, -1, 1, 2, 3)])
        g[i] = f @ _D6 / h[i]
    return g


_D6 = np.array([-1, 9, -45, 45, -9, 1]) / 60.0


def restricted_hessian(family: Family, params: FunctionalParams, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    h = _steps(x) * 10
    m = x.size
    H = np.zeros((m, m))
    for i in range(m):
        e = np.zeros(m)
        e[i] = h[i]
        H[i] = (restricted_gradient(family, params, x + e) - restricted_gradient(family, params, x - e)) / (2 * h[i])
    return 0.5 * (H + H.T)


def restricted_critical_search(family: Family, params: FunctionalParams, x0=None,
                               gtol: float = 1e-8, max_iter: int = 60) -> dict:
    """Damped Newton on the FD gradient; golden section fallback in one dimension."""
    x = np.array(family.x0 if x0 is None else x0, dtype=float)
    if not family.valid(x):
        raise BoundaryError(f"start point {x.tolist()} outside the {family.name} family")
    history = []
    method = "newton"
    g = restricted_gradient(family, params, x)
    it = 0
    while it < max_iter and np.linalg.norm(g) >= gtol:
        it += 1
        H = restricted_hessian(family, params, x)
        step = -np.linalg.lstsq(H, g, rcond=1e-6)[0]
        lam = 1.0
        while not family.valid(x + lam * step) and lam > 1e-6:
            lam /= 2
        if not family.valid(x + lam * step):
            break
        x_new = x + lam * step
        g_new = restricted_gradient(family, params, x_new)
        history.append({"x": x_new.tolist(), "grad_norm": float(np.linalg.norm(g_new))})
        if np.linalg.norm(g_new) > 10 * np.linalg.norm(g) and x.size == 1:
            method = "golden"
            break
        x, g = x_new, g_new
    if method == "golden" or (x.size == 1 and np.linalg.norm(g) >= gtol):
        method = "golden"
        x = _golden_stationary(family, params, x)
        g = restricted_gradient(family, params, x)
    H = restricted_hessian(family, params, x)
    ev = np.linalg.eigvalsh(H)
    tiny = 1e-6 * max(1.0, float(np.max(np.abs(ev))))
    sig = {"positive": int(np.sum(ev > tiny)), "negative": int(np.sum(ev < -tiny)),
           "zero": int(np.sum(np.abs(ev) <= tiny))}
    return {"family": family.name, "t": params.t, "s": params.s, "x": x.tolist(),
            "value": family.value(x, params), "grad": g.tolist(), "grad_norm": float(np.linalg.norm(g)),
            "converged": bool(np.linalg.norm(g) < gtol), "iterations": it, "method": method,
            "hessian_eigenvalues": ev.tolist(), "signature": sig, "history": history}


def _golden_stationary(family, params, x):
    """Stationary point of a 1-D family via golden section on the gradient norm's minimiser."""
    from scipy.optimize import brentq, minimize_scalar

    lo = max(family.lower[0] + 1e-6, x[0] * 0.5)
    hi = min(family.upper[0], x[0] * 1.5 if np.isfinite(family.upper[0]) else x[0] * 1.5)
    d = lambda v: restricted_gradient(family, params, np.array([v]))[0]
    try:
        return np.array([brentq(d, lo, hi, xtol=1e-14, rtol=1e-14)])
    except ValueError:
        f = lambda v: family.value(np.array([v]), params)
        return np.array([minimize_scalar(f, bounds=(lo, hi), method="bounded",
                                         options={"xatol": 1e-12}).x])


# ---------------------------------------------------------------------------
# closed-form helpers for the Berger family

def berger_invariants(eps: float) -> dict:
    """|Ric|^2, R^2, |Rm|^2 and volume of the Berger sphere (closed form)."""
    ric2 = 4 * eps ** 4 + 2 * (4 - 2 * eps ** 2) ** 2
    R = 8 - 2 * eps ** 2
    return {"ric2": ric2, "R2": R * R, "rm2": 4 * ric2 - R * R, "volume": 2 * math.pi ** 2 * eps}


def berger_critical_t(eps: float, s: float) -> float:
    """The t making the unit-volume Berger metric of parameter eps critical for F_{t,s}.

    The unit-volume functional is vol^(4/3) (|Ric|^2 + t R^2 + s |Rm|^2), linear
    in t, so stationarity in eps fixes t; derivatives are analytic.
    """
    e = eps
    v = 2 * math.pi ** 2 * e
    dv = 2 * math.pi ** 2
    ric2 = 4 * e ** 4 + 2 * (4 - 2 * e ** 2) ** 2
    dric2 = 16 * e ** 3 + 2 * 2 * (4 - 2 * e ** 2) * (-4 * e)
    R2 = (8 - 2 * e ** 2) ** 2
    dR2 = 2 * (8 - 2 * e ** 2) * (-4 * e)
    a = ric2 + s * (4 * ric2 - R2)
    da = dric2 + s * (4 * dric2 - dR2)
    # d/de [v^(4/3) (a + t R2)] = 0
    w = v ** (4 / 3)
    dw = (4 / 3) * v ** (1 / 3) * dv
    num = dw * a + w * da
    den = dw * R2 + w * dR2
    if abs(den) < 1e-14:
        raise PreconditionError("no finite critical t for this eps", gate="berger-critical")
    return -num / den


def sweep_csv(rows: list[dict]) -> str:
    """CSV for parameter sweeps; columns follow the first row's keys."""
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(float(v)) if isinstance(v, (float, np.floating)) else v) for k, v in r.items()})
    return buf.getvalue()
