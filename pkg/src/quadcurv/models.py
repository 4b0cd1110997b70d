"""Catalog of closed model manifolds.

Each model carries one or more charts (for finite differences), a quadrature
rule and, for homogeneous models, closed-form curvature. Homogeneous models
integrate with a single node carrying the whole volume; tori use the full
periodic trapezoid grid through :mod:`quadcurv.grid`.

A model may be rescaled (``g -> c^2 g``) without recomputation: packs are
rescaled componentwise and cached node integrals by their curvature weight.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from math import pi
from typing import Callable

import numpy as np

from . import charts as C
from . import homogeneous as H
from . import invariants as inv
from .errors import ArgumentError, ConstructionError
from .grid import GridEngine, GridSpec

TORUS_GRID = {1: 64, 2: 64, 3: 64, 4: 24, 5: 12}

# curvature weight of each node scalar: integrals scale like c^(n - weight)
WEIGHT = {
    "one": 0, "R": 2, "norm_r0": 2, "norm_W": 2,
    "norm_Rm2": 4, "norm_W2": 4, "norm_Ric2": 4, "norm_Ric0_2": 4, "R2": 4,
    "W_r0_r0": 6, "tr_r0_3": 6, "WW_r0": 6, "R_r0_2": 6,
    "norm_dR2": 6, "norm_dRic0_2": 6, "norm_C2": 6, "divC_ric": 6,
}

# points per chart_pack call, bounded by the nested stencil fan-out
_FD_CHUNK = {0: 256, 1: 32, 2: 4}


@dataclass(frozen=True, eq=False)
class ManifoldModel:
    kind: str
    n: int
    params: dict
    charts: tuple
    base_volume: float
    homogeneous: bool
    closed_form: Callable | None = None
    grid: int | None = None
    c: float = 1.0
    sampler: Callable | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    # -- identity ----------------------------------------------------------
    @property
    def name(self) -> str:
        return self.params.get("name") or f"{self.kind}-{self.n}"

    @property
    def volume(self) -> float:
        return self.c ** self.n * self.base_volume

    @property
    def unit_volume(self) -> bool:
        return abs(self.volume - 1.0) < 1e-12

    def descriptor(self) -> dict:
        params = {k: v for k, v in self.params.items() if k != "name"}
        if self.c != 1.0:
            params["scale"] = self.c
        return {"type": self.kind, "n": self.n, "params": params, "grid": self.grid}

    def to_json(self):
        return self.descriptor()

    # -- scaling -----------------------------------------------------------
    def scaled(self, c: float) -> "ManifoldModel":
        if not c > 0:
            raise ArgumentError("scale factor must be positive")
        return replace(self, c=self.c * c)

    def normalize_unit_volume(self):
        """Return (model with volume 1, factor c with g -> c^2 g)."""
        c = self.volume ** (-1.0 / self.n)
        if abs(c - 1.0) < 1e-15:
            return self, 1.0
        return self.scaled(c), c

    def chart(self, i: int = 0) -> C.MetricChart:
        base = self.charts[i]
        if self.c == 1.0:
            return base
        c2 = self.c ** 2
        return C.MetricChart(base.n, base.domain, lambda x, f=base.metric_fn: c2 * f(x),
                             base.periodic, base.name)

    # -- pointwise -----------------------------------------------------------
    def sample_points(self, k: int, seed: int = 0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        return self.sampler(rng, k)

    def pack_at(self, points, depth: int = 2, cfg: C.FDConfig | None = None,
                closed_form: bool = True) -> inv.CurvaturePack:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if closed_form and self.closed_form is not None:
            return self.closed_form(points).scaled(self.c)
        return self.fd_pack(points, depth, cfg)

    def fd_pack(self, points, depth: int = 2, cfg: C.FDConfig | None = None) -> inv.CurvaturePack:
        """Chart finite-difference pack (always the first chart), chunked."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        chart = self.chart(0)
        cfg = cfg or C.default_config(chart, depth + 2)
        step = _FD_CHUNK[depth]
        parts = [C.chart_pack(chart, points[i:i + step], cfg, depth)
                 for i in range(0, len(points), step)]
        return parts[0] if len(parts) == 1 else inv.concat(parts)

    # -- quadrature ----------------------------------------------------------
    def quadrature(self, depth: int = 0):
        """Yield (pack, weights) blocks covering the manifold."""
        if self.homogeneous:
            p0 = self.sample_points(1, 0)
            yield self.pack_at(p0, depth), np.array([self.volume])
            return
        engine = self._engine()
        cn = self.c ** self.n
        for pack, w in engine.packs(depth):
            yield (pack if self.c == 1.0 else pack.scaled(self.c)), w * cn

    def _engine(self) -> GridEngine:
        key = ("engine", self.grid)
        eng = self._cache.get(key)
        if eng is None:
            # drop any previous engine before building a new one (memory)
            for k in [k for k in self._cache if k[0] == "engine"]:
                del self._cache[k]
            eng = GridEngine(self.charts[0], GridSpec(self.grid))
            self._cache[key] = eng
        return eng

    def release(self):
        """Free grid intermediates (node scalars stay cached)."""
        for k in [k for k in self._cache if k[0] == "engine"]:
            del self._cache[k]

    def integrate(self, f: Callable, depth: int = 0) -> float:
        """sum over nodes of f(pack) * weight."""
        total = 0.0
        for pack, w in self.quadrature(depth):
            total += float(np.sum(np.asarray(f(pack)) * w))
        return total

    def node_scalars(self, depth: int = 0) -> dict:
        """Per-node scalar invariants of the base metric, plus weights and points."""
        for d in range(depth, 3):
            hit = self._cache.get(("nodes", d))
            if hit is not None:
                return hit
        if self.homogeneous:
            base = replace(self, c=1.0)
            p0 = base.sample_points(1, 0)
            pack = base.pack_at(p0, 2)
            out = _scalars(pack, 2)
            out["weight"] = np.array([self.base_volume])
            out["point"] = p0
            self._cache[("nodes", 2)] = out
            return out
        blocks = []
        engine = self._engine()
        for pack, w in engine.packs(depth):
            s = _scalars(pack, depth)
            s["weight"] = w
            s["point"] = pack.point
            blocks.append(s)
        out = {k: np.concatenate([b[k] for b in blocks]) for k in blocks[0]}
        self._cache[("nodes", depth)] = out
        return out

    def integrals(self, depth: int = 0) -> dict:
        """Integrals of all node scalars, for the current scaling."""
        nodes = self.node_scalars(depth)
        w = nodes["weight"]
        out = {}
        for k, v in nodes.items():
            if k in ("weight", "point"):
                continue
            out[k] = float(np.sum(v * w)) * self.c ** (self.n - WEIGHT[k])
        return out

    def min_R(self):
        """(min scalar curvature over the nodes, witness point) for the current scaling."""
        nodes = self.node_scalars(0)
        i = int(np.argmin(nodes["R"]))
        return float(nodes["R"][i]) * self.c ** -2, nodes["point"][i]

    def max_over_nodes(self, key: str, depth: int = 0) -> float:
        nodes = self.node_scalars(depth)
        return float(np.max(np.abs(nodes[key]))) * self.c ** -WEIGHT[key]


def _scalars(pack: inv.CurvaturePack, depth: int) -> dict:
    st = inv.scalar_terms(pack)
    out = {"one": np.ones(pack.size), "R": pack.R, "R2": pack.R ** 2}
    for k in ("norm_Rm2", "norm_W2", "norm_Ric2", "norm_Ric0_2"):
        out[k] = pack.norms[k]
    for k in ("W_r0_r0", "tr_r0_3", "WW_r0", "R_r0_2", "norm_r0", "norm_W"):
        out[k] = st[k]
    if depth >= 1:
        for k in ("norm_dR2", "norm_dRic0_2", "norm_C2"):
            out[k] = st[k]
    if depth >= 2:
        out["divC_ric"] = st["divC_ric"]
    return {k: np.asarray(v, dtype=float).reshape(-1) for k, v in out.items()}


# ---------------------------------------------------------------------------
# constructors

def _stereo_metric(n, r):
    def metric(x):
        f = 4 * r * r / (1 + np.sum(x * x, axis=-1)) ** 2
        return f[..., None, None] * np.eye(n)
    return metric


def _box_sampler(lo, hi):
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    return lambda rng, k: lo + (hi - lo) * rng.random((k, lo.size))


def make_round_sphere(n: int, r: float = 1.0) -> ManifoldModel:
    if n < 2 or not r > 0:
        raise ArgumentError("round sphere needs n >= 2 and r > 0")
    box = [(-1.5, 1.5)] * n
    charts = (C.MetricChart(n, box, _stereo_metric(n, r), name="stereo-north"),
              C.MetricChart(n, box, _stereo_metric(n, r), name="stereo-south"))
    K = 1.0 / r ** 2
    return ManifoldModel("round-sphere", n, {"r": float(r)}, charts, H.sphere_volume(n, r), True,
                         closed_form=lambda pts: H.space_form_pack(n, K, pts),
                         sampler=_box_sampler([-0.7] * n, [0.7] * n))


def make_flat_torus(n: int, periods=None) -> ManifoldModel:
    periods = [2 * pi] * n if periods is None else [float(p) for p in periods]
    if len(periods) != n or min(periods) <= 0:
        raise ArgumentError("flat torus needs n positive periods")
    chart = C.MetricChart(n, [(0.0, L) for L in periods],
                          lambda x: np.broadcast_to(np.eye(n), x.shape[:-1] + (n, n)).copy(),
                          periodic=(True,) * n, name="flat")
    return ManifoldModel("flat-torus", n, {"periods": periods}, (chart,), float(np.prod(periods)), True,
                         closed_form=lambda pts: H.space_form_pack(n, 0.0, pts),
                         grid=TORUS_GRID.get(n, 8), sampler=_box_sampler([0] * n, periods))


def _random_modes(n, count, rng):
    modes = []
    while len(modes) < count:
        k = rng.integers(-1, 2, size=n)
        if np.any(k):
            modes.append(k)
    return modes


def perturbed_torus_coeffs(n: int, seed: int, modes: int = 3) -> list:
    """Deterministic trig coefficients: A symmetric with unit spectral norm."""
    rng = np.random.default_rng(seed)
    out = []
    for k in _random_modes(n, modes, rng):
        a = rng.standard_normal((n, n))
        a = a + a.T
        a /= np.max(np.abs(np.linalg.eigvalsh(a)))
        out.append({"A": a.tolist(), "k": k.tolist(), "phase": float(rng.uniform(0, 2 * pi))})
    return out


def make_perturbed_torus(n: int, eps: float = 0.05, h_coeffs=None, seed: int = 7,
                         grid: int | None = None) -> ManifoldModel:
    """g = I + eps * sum_m A_m cos(k_m . x + phase_m) on the 2 pi torus."""
    coeffs = h_coeffs if h_coeffs is not None else perturbed_torus_coeffs(n, seed)
    A = np.array([c["A"] for c in coeffs], dtype=float)
    K = np.array([c["k"] for c in coeffs], dtype=float)
    ph = np.array([c.get("phase", 0.0) for c in coeffs], dtype=float)
    if A.shape[1:] != (n, n) or K.shape[1] != n:
        raise ArgumentError("coefficient shapes do not match n")

    def metric(x):
        cosv = np.cos(x @ K.T + ph)
        return np.eye(n) + eps * np.einsum("...m,mij->...ij", cosv, A)

    grid = grid or TORUS_GRID.get(n, 8)
    _check_pd(metric, n, grid)
    chart = C.MetricChart(n, [(0.0, 2 * pi)] * n, metric, periodic=(True,) * n, name="torus")
    params = {"eps": float(eps), "seed": int(seed)}
    if h_coeffs is not None:
        params["h_coeffs"] = coeffs
    eng_vol = _grid_volume(metric, n, grid)
    return ManifoldModel("perturbed-torus", n, params, (chart,), eng_vol, False, grid=grid,
                         sampler=_box_sampler([0] * n, [2 * pi] * n))


CONFORMAL_MODES = lambda n: [np.eye(n, dtype=int)[i] for i in range(n)] + \
    [np.eye(n, dtype=int)[i] + np.eye(n, dtype=int)[(i + 1) % n] for i in range(n)]


def conformal_coeffs(n: int, phi_coeffs) -> list:
    """Normalise phi coefficients: plain numbers map onto the default modes."""
    phi_coeffs = list(phi_coeffs)
    if phi_coeffs and not isinstance(phi_coeffs[0], dict):
        modes = CONFORMAL_MODES(n)
        if len(phi_coeffs) > len(modes):
            raise ArgumentError(f"at most {len(modes)} plain coefficients for n = {n}")
        return [{"a": float(a), "k": modes[i].tolist(), "phase": 0.0} for i, a in enumerate(phi_coeffs)]
    return [{"a": float(c["a"]), "k": list(c["k"]), "phase": float(c.get("phase", 0.0))} for c in phi_coeffs]


def conformal_phi(n, coeffs):
    a = np.array([c["a"] for c in coeffs], dtype=float)
    K = np.array([c["k"] for c in coeffs], dtype=float).reshape(len(coeffs), n)
    ph = np.array([c["phase"] for c in coeffs], dtype=float)
    phi = lambda x: np.cos(x @ K.T + ph) @ a
    dphi = lambda x: -(np.sin(x @ K.T + ph) * a) @ K
    return phi, dphi


def make_conformal_torus(n: int, phi_coeffs=(0.1,), grid: int | None = None) -> ManifoldModel:
    """g = exp(2 phi) delta with phi a trig polynomial on the 2 pi torus."""
    coeffs = conformal_coeffs(n, phi_coeffs)
    phi, _ = conformal_phi(n, coeffs)

    def metric(x):
        return np.exp(2 * phi(x))[..., None, None] * np.eye(n)

    grid = grid or TORUS_GRID.get(n, 8)
    chart = C.MetricChart(n, [(0.0, 2 * pi)] * n, metric, periodic=(True,) * n, name="torus")
    return ManifoldModel("conformal-torus", n, {"phi_coeffs": coeffs}, (chart,),
                         _grid_volume(metric, n, grid), False, grid=grid,
                         sampler=_box_sampler([0] * n, [2 * pi] * n))


def make_product_spheres(p: int, r1: float, q: int, r2: float) -> ManifoldModel:
    n = p + q
    if p < 1 or q < 1 or n < 3 or not (r1 > 0 and r2 > 0):
        raise ArgumentError("product spheres need p, q >= 1, p + q >= 3 and positive radii")
    m1, m2 = _stereo_metric(p, r1), _stereo_metric(q, r2)

    def metric(x):
        g = np.zeros(x.shape[:-1] + (n, n))
        g[..., :p, :p] = m1(x[..., :p])
        g[..., p:, p:] = m2(x[..., p:])
        return g

    chart = C.MetricChart(n, [(-1.5, 1.5)] * n, metric, name="stereo-product")
    vol = H.sphere_volume(p, r1) * H.sphere_volume(q, r2)
    return ManifoldModel("product-spheres", n, {"p": p, "r1": float(r1), "q": q, "r2": float(r2)},
                         (chart,), vol, True,
                         closed_form=lambda pts: H.product_pack(p, r1 ** -2, q, r2 ** -2, pts),
                         sampler=_box_sampler([-0.7] * n, [0.7] * n))


def make_berger_sphere(eps: float) -> ManifoldModel:
    if not (0 < eps <= 2):
        raise ArgumentError("Berger parameter must lie in (0, 2]")
    chart = C.MetricChart(3, [(0.3, pi - 0.3), (0.0, 2 * pi), (0.0, 4 * pi)], H.berger_euler_metric(eps),
                          periodic=(False, True, True), name="euler")
    structure = H.berger_structure(eps)
    return ManifoldModel("berger", 3, {"eps": float(eps)}, (chart,), 2 * pi ** 2 * eps, True,
                         closed_form=lambda pts: H.left_invariant_pack(structure, pts),
                         sampler=_box_sampler([0.6, 0, 0], [pi - 0.6, 2 * pi, 4 * pi]))


def _grid_points(n, N):
    axes = [2 * pi * np.arange(N) / N] * n
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)


def _check_pd(metric, n, N):
    x = _grid_points(n, N)
    ev = np.linalg.eigvalsh(metric(x))[:, 0]
    if np.min(ev) <= 0:
        i = int(np.argmin(ev))
        raise ConstructionError("perturbed metric is not positive definite", point=x[i].tolist())


def _grid_volume(metric, n, N):
    x = _grid_points(n, N)
    return float(np.sum(np.sqrt(np.linalg.det(metric(x)))) * (2 * pi / N) ** n)


# ---------------------------------------------------------------------------
# sphere partition-of-unity quadrature (FD validation only)

def _bump(rho, A=2.0):
    out = np.zeros_like(rho)
    inside = rho < A
    out[inside] = np.exp(-1.0 / (A - rho[inside]))
    return out


def sphere_partition_nodes(model: ManifoldModel, M: int = 48):
    """Nodes and weights for both stereographic charts of a round sphere.

    The partition is chi(x) = b(|x|^2) / (b(|x|^2) + b(1/|x|^2)) with the bump
    b(rho) = exp(-1/(2 - rho)); both charts use the same formula, so the nodes
    of the second chart reuse those of the first.
    """
    if model.kind != "round-sphere":
        raise ArgumentError("partition quadrature is defined for round spheres only")
    n = model.n
    lo, hi = -1.5, 1.5
    xs = lo + (hi - lo) * (np.arange(M) + 0.5) / M
    X = np.stack(np.meshgrid(*[xs] * n, indexing="ij"), axis=-1).reshape(-1, n)
    rho = np.sum(X * X, axis=-1)
    with np.errstate(divide="ignore"):
        chi = _bump(rho) / (_bump(rho) + _bump(np.where(rho > 0, 1 / rho, np.inf)))
    keep = chi > 0
    X, chi = X[keep], chi[keep]
    g = model.chart(0).metric(X)
    w = chi * np.sqrt(np.linalg.det(g)) * ((hi - lo) / M) ** n
    return X, w


def integrate_partition(model: ManifoldModel, f: Callable, M: int = 16, depth: int = 0,
                        cfg: C.FDConfig | None = None) -> float:
    """FD integral over the two-chart partition (both charts share nodes)."""
    X, w = sphere_partition_nodes(model, M)
    pack = model.fd_pack(X, depth, cfg)
    return 2.0 * float(np.sum(np.asarray(f(pack)) * w))


# ---------------------------------------------------------------------------
# descriptors and catalog

ALIASES = {
    "sphere-3": {"type": "round-sphere", "n": 3},
    "sphere-4": {"type": "round-sphere", "n": 4},
    "sphere-5": {"type": "round-sphere", "n": 5},
    "flat-torus-3": {"type": "flat-torus", "n": 3},
    "flat-torus-4": {"type": "flat-torus", "n": 4},
    "perturbed-torus-3": {"type": "perturbed-torus", "n": 3, "params": {"eps": 0.05, "seed": 7}, "grid": 32},
    "perturbed-torus-4": {"type": "perturbed-torus", "n": 4, "params": {"eps": 0.05, "seed": 7}},
    "conformal-torus-3": {"type": "conformal-torus", "n": 3, "params": {"phi_coeffs": [0.1, -0.05]}, "grid": 32},
    "conformal-torus-4": {"type": "conformal-torus", "n": 4, "params": {"phi_coeffs": [0.1]}, "grid": 16},
    "s2xs2": {"type": "product-spheres", "params": {"p": 2, "r1": 1.0, "q": 2, "r2": 1.0}},
    "s2xs2-unequal": {"type": "product-spheres", "params": {"p": 2, "r1": 1.0, "q": 2, "r2": 2.0}},
    "s2xs3": {"type": "product-spheres", "params": {"p": 2, "r1": 1.0, "q": 3, "r2": 1.0}},
    "berger-0.5": {"type": "berger", "params": {"eps": 0.5}},
    "berger-0.8": {"type": "berger", "params": {"eps": 0.8}},
    "berger-1.5": {"type": "berger", "params": {"eps": 1.5}},
}

CATALOG = list(ALIASES)

_TYPE_ALIASES = {"sphere": "round-sphere", "torus": "flat-torus", "product": "product-spheres"}


def from_descriptor(desc: dict) -> ManifoldModel:
    """Build a model from {type, n, params, grid}; params may also sit at top level."""
    if not isinstance(desc, dict) or "type" not in desc:
        raise ArgumentError("model descriptor needs a 'type' field")
    kind = _TYPE_ALIASES.get(desc["type"], desc["type"])
    params = dict(desc.get("params") or {})
    for k, v in desc.items():
        if k not in ("type", "n", "params", "grid"):
            params.setdefault(k, v)
    scale = float(params.pop("scale", 1.0))
    n = desc.get("n")
    grid = desc.get("grid")
    try:
        if kind == "round-sphere":
            m = make_round_sphere(int(n or 3), float(params.get("r", 1.0)))
        elif kind == "flat-torus":
            periods = params.get("periods")
            m = make_flat_torus(int(n or len(periods or [0, 0, 0])), periods)
        elif kind == "perturbed-torus":
            m = make_perturbed_torus(int(n or 4), float(params.get("eps", 0.05)), params.get("h_coeffs"),
                                     int(params.get("seed", 7)), grid)
        elif kind == "conformal-torus":
            m = make_conformal_torus(int(n or 3), params.get("phi_coeffs", [0.1]), grid)
        elif kind == "product-spheres":
            m = make_product_spheres(int(params.get("p", 2)), float(params.get("r1", 1.0)),
                                     int(params.get("q", 2)), float(params.get("r2", 1.0)))
        elif kind == "berger":
            m = make_berger_sphere(float(params.get("eps", 0.5)))
        else:
            raise ArgumentError(f"unknown model type {desc['type']!r}")
    except (TypeError, ValueError, KeyError) as exc:
        if isinstance(exc, ArgumentError):
            raise
        raise ArgumentError(f"bad model parameters: {exc}") from None
    if n is not None and int(n) != m.n:
        raise ArgumentError(f"descriptor n = {n} does not match model dimension {m.n}")
    if grid is not None and m.grid is not None and not m.homogeneous:
        m = replace(m, grid=int(grid))
    return m.scaled(scale) if scale != 1.0 else m


def load_model(spec: str) -> ManifoldModel:
    """Alias, inline JSON, or path to a JSON file."""
    if spec in ALIASES:
        return from_descriptor(ALIASES[spec])
    text = spec.strip()
    if text.startswith("{"):
        try:
            return from_descriptor(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ArgumentError(f"invalid model JSON: {exc}") from None
    if os.path.isfile(spec):
        with open(spec) as fh:
            return from_descriptor(json.load(fh))
    raise ArgumentError(f"unknown model {spec!r} (alias, JSON or file path expected)")
