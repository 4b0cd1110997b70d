"""Parameter-region systems, pointwise curvature margins and theorem hypothesis checks.

System identifiers (``4th-Form-1``, ``thm1.9-line``, ...) are the labels used
in reports and CSV scans. Inequalities are evaluated with plain IEEE
comparisons, strict or non-strict exactly as each system states them; only the
equality constraints (the line ``1 + 2t + 2s = 0`` and ``s = -1/4``) use the
``line_constraint`` tolerance.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import tensors as T
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import ArgumentError, PreconditionError
from .functional import FunctionalParams, functional_value, scalar_residuals, traceless_residuals
from .invariants import CurvaturePack
from .models import ManifoldModel

THEOREMS = tuple(f"thm1.{i}" for i in range(1, 10))


@dataclass(frozen=True)
class TheoremInfo:
    margin: str | None      # "ws" (8s+n-2 family), "line" (1+2t+2s=0 family) or None
    sign: int = 1           # sign in front of the right-hand side
    strict: bool = True
    needs: tuple = ()       # extra gates beyond positive_R and critical
    conclusion: str = "einstein"


INFO = {
    "thm1.1": TheoremInfo("ws", -1),
    "thm1.2": TheoremInfo("ws", +1),
    "thm1.3": TheoremInfo("line", +1, strict=False),
    "thm1.4": TheoremInfo("line", -1, strict=False),
    "thm1.5": TheoremInfo("ws", -1, needs=("cotton_div_zero",)),
    "thm1.6": TheoremInfo("ws", +1, needs=("cotton_div_zero",)),
    "thm1.7": TheoremInfo(None, needs=("lcf",), conclusion="constant-curvature"),
    "thm1.8": TheoremInfo(None, needs=("cotton_div_zero",), conclusion="constant-curvature"),
    "thm1.9": TheoremInfo(None, conclusion="constant-curvature"),
}


def theorem_id(name: str) -> str:
    key = str(name).lower().replace("theorem", "thm").replace(" ", "")
    if not key.startswith("thm"):
        key = "thm" + key
    if key not in INFO:
        raise ArgumentError(f"unknown theorem {name!r}; expected one of {', '.join(THEOREMS)}")
    return key


def linear_forms(n, t, s) -> dict:
    t, s = np.asarray(t, dtype=float), np.asarray(s, dtype=float)
    return {
        "A": n + 4 * (n - 1) * t + 4 * s,
        "B": 3 * n - 4 + 2 * n * (n - 1) * t + 8 * s,
        "D": 2 - n - n * (n - 1) * t + 2 * (n - 2) * s,
        "D_alt": 2 - n - n * (n - 1) * t + 2 * n * (n - 2) * s,
        "P": (n - 1) * (n - 2) * t + 2 * s + (n - 2),
        "Q": 2 * n * (n - 1) * t + 4 * (n - 2) * s + (n * n - 3 * n + 4),
        "line": 1 + 2 * t + 2 * s,
        "ws": 8 * s + n - 2,
        "wl": (n - 2) + 2 * n * s,
        "L8": 2 * t + 2 * s + 1,
        "K": 3 * t + s + 1,
    }


def systems(n: int, t, s, line_tol: float = DEFAULT_TOLERANCES.line_constraint) -> dict:
    """{system id: (theorem id, boolean array)} for the systems stated at dimension n."""
    if int(n) != n or n < 3:
        raise ArgumentError("n must be an integer >= 3")
    t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
    f = linear_forms(n, t, s)
    A, B, D, P, Q = f["A"], f["B"], f["D"], f["P"], f["Q"]
    on_line = np.abs(f["line"]) <= line_tol
    out = {}
    if n in (3, 4):
        out["4th-Form-1"] = ("thm1.1", (s > -(n - 2) / 8) & (A <= 0) & (B < 0))
        s2 = (s <= -0.25) if n == 3 else (s < -0.25)
        out["4th-Form-2"] = ("thm1.1", s2 & (A >= 0) & (B > 0))
    else:
        out["44th-Form-1"] = ("thm1.1", (s >= -0.25) & (A <= 0) & (B < 0))
        out["44th-Form-2"] = ("thm1.1", (s < -(n - 2) / 8) & (A >= 0) & (B > 0))
    if n == 3:
        out["3th-Form-1"] = ("thm1.2", (s >= -0.25) & (s < -(n - 4) / 8) & (A <= 0) & (B < 0))
    elif n >= 5:
        out["33th-Form-1"] = ("thm1.2", (s > -(n - 4) / 8) & (s <= -0.25) & (A >= 0) & (B > 0))
    if n == 3:
        out["5th-Form-1"] = ("thm1.3", on_line & (s > -1 / 6) & (D > 0))
        out["5th-Form-2"] = ("thm1.3", on_line & (s < -0.25) & (D < 0))
    else:
        out["55th-Form-1"] = ("thm1.3", on_line & (s > -0.25) & (D > 0))
        out["55th-Form-2"] = ("thm1.3", on_line & (s < -(n - 2) / (2 * n)) & (D < 0))
    if n == 3:
        out["6th-Form-1"] = ("thm1.4", on_line & (s > -0.25) & (s < -(n - 2) / (2 * n)) & (D > 0))
    elif n >= 5:
        out["6th-Form-2"] = ("thm1.4", on_line & (s > -(n - 2) / (2 * n)) & (s < -0.25) & (D < 0))
    out["7th-Form-1"] = ("thm1.5", (s > -(n - 2) / 8) & (A <= 0) & (B < 0))
    out["7th-Form-2"] = ("thm1.5", (s < -(n - 2) / 8) & (A >= 0) & (B > 0))
    out["8th-Form-1"] = ("thm1.6", (s < -(n - 4) / 8) & (A <= 0) & (B < 0))
    out["8th-Form-2"] = ("thm1.6", (s > -(n - 4) / 8) & (A >= 0) & (B > 0))
    if n == 4:
        out["thm1.7-n4"] = ("thm1.7", f["K"] != 0)
    elif n >= 5:
        out["11th-Form-1"] = ("thm1.7", (s >= -(n - 2) / 4) & (P < 0) & (Q <= 0))
        out["11th-Form-2"] = ("thm1.7", (s <= -(n - 2) / 4) & (P > 0) & (Q >= 0))
    if n == 3:
        out["9th-Form-1"] = ("thm1.8", (s >= -0.25) & (f["L8"] > 0) & (f["K"] >= 0))
        out["9th-Form-2"] = ("thm1.8", (s <= -0.25) & (f["L8"] < 0) & (f["K"] <= 0))
        out["thm1.9-line"] = ("thm1.9", (np.abs(s + 0.25) <= line_tol) & (t != -0.25))
    return out


def theorem_systems(n: int) -> dict:
    """{theorem: [system ids]} available at dimension n (empty list when none)."""
    out = {k: [] for k in THEOREMS}
    for sid, (thm, _) in systems(n, 0.0, 0.0).items():
        out[thm].append(sid)
    return out


def _boundary_values(n, t, s):
    f = linear_forms(n, t, s)
    vals = [f[k] for k in ("A", "B", "D", "P", "Q", "line", "ws", "wl", "L8", "K")]
    for c in (-(n - 2) / 8, -0.25, -(n - 4) / 8, -1 / 6, -(n - 2) / (2 * n), -(n - 2) / 4):
        vals.append(np.asarray(s, dtype=float) - c)
    vals.append(np.asarray(t, dtype=float) + 0.25)
    return np.stack(np.broadcast_arrays(*vals))


def degeneracies(n: int, t, s, tol: Tolerances = DEFAULT_TOLERANCES) -> dict:
    """{flag: boolean array}."""
    t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
    f = linear_forms(n, t, s)
    z = np.zeros(t.shape, dtype=bool)
    out = {
        "8s+n-2=0": np.abs(f["ws"]) <= tol.boundary,
        "(n-2)+2ns=0": np.abs(f["wl"]) <= tol.boundary,
        "n+4(n-1)t+4s=0": np.abs(f["A"]) <= tol.boundary,
        "1+2t+2s!=0": np.abs(f["line"]) > tol.line_constraint,
    }
    out["paper-silent:thm1.2"] = z | (n == 4)
    out["paper-silent:thm1.4"] = z | (n == 4)
    if n == 3:
        out["thm1.9-excluded:t=-1/4"] = (np.abs(s + 0.25) <= tol.line_constraint) & (t == -0.25)
    return out


@dataclass(frozen=True)
class ParamPoint:
    n: int
    t: float
    s: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise ArgumentError("n must be an integer >= 3")
        if not (math.isfinite(self.t) and math.isfinite(self.s)):
            raise ArgumentError("t and s must be finite")


@dataclass(frozen=True)
class RegionVerdict:
    point: ParamPoint
    satisfied_systems: tuple
    theorems: dict
    degeneracies: tuple
    boundary: bool

    def to_json(self):
        return {"n": self.point.n, "t": self.point.t, "s": self.point.s,
                "systems": list(self.satisfied_systems), "theorems": self.theorems,
                "flags": list(self.degeneracies), "boundary": self.boundary}


def classify(p: ParamPoint, tol: Tolerances = DEFAULT_TOLERANCES) -> RegionVerdict:
    sy = systems(p.n, p.t, p.s, tol.line_constraint)
    sat = tuple(k for k, (_, ok) in sy.items() if bool(ok))
    thms = {k: [] for k in THEOREMS}
    for k in sat:
        thms[sy[k][0]].append(k)
    flags = tuple(k for k, v in degeneracies(p.n, p.t, p.s, tol).items() if bool(v))
    near = bool(np.any(np.abs(_boundary_values(p.n, p.t, p.s)) <= tol.boundary))
    return RegionVerdict(p, sat, {k: v for k, v in thms.items() if v}, flags, near)


def classify_grid(n: int, t, s, tol: Tolerances = DEFAULT_TOLERANCES) -> dict:
    """Vectorised classification: systems, flags and boundary masks as arrays."""
    sy = {k: v for k, (_, v) in systems(n, t, s, tol.line_constraint).items()}
    fl = degeneracies(n, t, s, tol)
    fl["boundary"] = np.any(np.abs(_boundary_values(n, t, s)) <= tol.boundary, axis=0)
    return {"systems": sy, "flags": fl}


# ---------------------------------------------------------------------------
# pointwise margins

@dataclass
class MarginReport:
    theorem: str
    mode: str
    lhs: np.ndarray
    rhs: np.ndarray
    combined_rel_diff: float
    points: int

    @property
    def margin(self) -> np.ndarray:
        return self.rhs - self.lhs

    @property
    def min_margin(self) -> float:
        return float(np.min(self.margin))

    @property
    def max_margin(self) -> float:
        return float(np.max(self.margin))

    @property
    def holds(self) -> bool:
        m = self.margin
        if self.mode.startswith("strict"):
            return bool(np.all(m > 0))
        return bool(np.all(m >= 0) and np.any(m > 0))

    def to_json(self):
        return {"theorem": self.theorem, "mode": self.mode, "sampled": True, "points": self.points,
                "margin": self.margin.tolist(), "min_margin": self.min_margin,
                "max_margin": self.max_margin, "holds": self.holds,
                "combined_norm_rel_diff": self.combined_rel_diff}


LINE_FORMS = ("printed", "factor")


def pointwise_margin(theorem: str, pack: CurvaturePack, params: FunctionalParams,
                     tol: Tolerances = DEFAULT_TOLERANCES, line_form: str = "printed") -> MarginReport:
    """RHS - LHS of the theorem's pointwise inequality at every point of the pack.

    For the 1+2t+2s = 0 theorems the stated first term has no |Ric0| factor
    (``line_form="printed"``); ``"factor"`` multiplies it by |Ric0| as in the
    ``8s+n-2`` family, which makes both sides scale alike.
    """
    if line_form not in LINE_FORMS:
        raise ArgumentError(f"line_form must be one of {LINE_FORMS}")
    thm = theorem_id(theorem)
    info = INFO[thm]
    if info.margin is None:
        raise PreconditionError(f"{thm} has no pointwise inequality", gate="margin")
    n, t, s = pack.n, params.t, params.s
    f = linear_forms(n, t, s)
    r0, w, R = pack.ric0, pack.weyl, pack.R
    nr0 = np.sqrt(pack.norms["norm_Ric0_2"])
    nW2 = pack.norms["norm_W2"]
    kn = T.kn(r0, np.broadcast_to(np.eye(n), r0.shape))
    k1 = math.sqrt(2 * (n - 1) ** 2 / (n * (n - 2)))
    k2 = math.sqrt(2 * (n - 2) / (n - 1))
    if info.margin == "ws":
        d = float(f["ws"])
        if abs(d) <= tol.boundary:
            raise PreconditionError(f"{thm} margin undefined: 8s+n-2 = 0", gate="8s+n-2")
        c = -(n - 4) * (4 * s + n - 2) / (math.sqrt(2 * n) * (n - 2) * d)
        comb = w + c * kn
        ncomb = np.sqrt(T.norm2(comb, rank=4))
        lhs = ncomb * nr0 + k1 * abs(2 * (n - 2) * s / d) * nW2
        rhs = info.sign * k2 * float(f["B"]) / (n * d) * R * nr0
    else:
        if abs(float(f["line"])) > tol.line_constraint:
            raise PreconditionError(f"{thm} needs 1+2t+2s = 0 (got {float(f['line']):.3g})", gate="1+2t+2s")
        e = float(f["wl"])
        if abs(e) <= tol.boundary:
            raise PreconditionError(f"{thm} margin undefined: (n-2)+2ns = 0", gate="(n-2)+2ns")
        c = (2 * s * (n * n - 3 * n + 4) + 2 * (n - 2)) / (math.sqrt(2 * n) * (n - 2) * e)
        comb = w + c * kn
        ncomb = np.sqrt(T.norm2(comb, rank=4))
        lhs = (ncomb if line_form == "printed" else ncomb * nr0) + k1 * abs((n - 2) * s / e) * nW2
        rhs = info.sign * k2 * float(f["D"]) / (n * e) * R * nr0
    split = np.sqrt(nW2 + 4 * (n - 2) * c * c * nr0 ** 2)
    rel = float(np.max(np.abs(ncomb - split) / np.maximum(split, 1e-300))) if np.any(split > 0) else 0.0
    mode = "strict-everywhere" if info.strict else "nonstrict-with-strict-somewhere"
    if info.margin == "line":
        mode += f" ({line_form})"
    return MarginReport(thm, mode, np.atleast_1d(lhs), np.atleast_1d(rhs), rel, int(np.size(R)))


# ---------------------------------------------------------------------------
# manifold checks

def _sample_pack(model: ManifoldModel, samples: int, seed: int) -> CurvaturePack:
    k = 1 if model.homogeneous else samples
    key = ("hyp-pack", k, seed, model.c)
    pack = model._cache.get(key)
    if pack is None:
        pack = model.pack_at(model.sample_points(k, seed), depth=2)
        model._cache[key] = pack
    return pack


def _rel(model, tol, closed, fd):
    return closed if model.closed_form is not None else fd


def measure_gates(model: ManifoldModel, params: FunctionalParams, samples: int = 20, seed: int = 0,
                  tol: Tolerances = DEFAULT_TOLERANCES) -> dict:
    """Gate measurements on the unit-volume model (sampled points, grid for R)."""
    pack = _sample_pack(model, samples, seed)
    rm_scale = max(float(np.max(pack.norms["norm_Rm2"])), 1e-300)
    out = {}
    i = int(np.argmin(pack.R))
    minR, where = float(pack.R[i]), pack.point[i]
    if minR > tol.positive_R and not model.homogeneous:
        gR, gwhere = model.min_R()
        if gR < minR:
            minR, where = gR, gwhere
    out["positive_R"] = {"ok": bool(minR > tol.positive_R), "min_R": minR,
                         "witness": np.asarray(where).tolist()}
    lam = functional_value(model, params).value
    tr = traceless_residuals(pack, params)
    sc = scalar_residuals(pack, params, lam)
    el_tol = _rel(model, tol, tol.el_closed_form, tol.el_fd_rel)
    r1 = max(float(np.max(np.abs(tr["first"]))), float(np.max(np.abs(tr["second"])))) / max(float(np.max(tr["scale"])), 1.0)
    r2 = max(float(np.max(np.abs(sc["first"]))), float(np.max(np.abs(sc["second"])))) / max(float(np.max(sc["scale"])), 1.0)
    out["critical"] = {"ok": bool(max(r1, r2) <= el_tol), "el_traceless_relative": r1,
                       "el_scalar_relative": r2, "tolerance": el_tol}
    dc = float(np.max(np.abs(pack.div_cotton))) / math.sqrt(rm_scale) ** 2 if rm_scale > 0 else 0.0
    out["cotton_div_zero"] = {"ok": bool(dc <= _rel(model, tol, tol.cotton_div_rel, tol.cotton_div_fd_rel)),
                              "relative": dc}
    wr = float(np.max(np.sqrt(pack.norms["norm_W2"]))) / math.sqrt(rm_scale)
    out["lcf"] = {"ok": bool(wr <= _rel(model, tol, tol.lcf_rel, tol.lcf_fd_rel)), "relative": wr}
    e = float(np.max(np.sqrt(pack.norms["norm_Ric0_2"]))) / max(float(np.max(np.sqrt(pack.norms["norm_Ric2"]))), 1e-300)
    out["einstein"] = {"ok": bool(e <= _rel(model, tol, tol.einstein_rel, tol.einstein_fd_rel)), "relative": e}
    return out


@dataclass
class HypothesisReport:
    theorem: str
    model: dict
    params: dict
    gates: dict
    gate_details: dict
    reasons: list
    margin: MarginReport | None
    verdict: str
    conclusion: dict
    tolerances: dict = field(default_factory=dict)

    def to_json(self):
        return {"theorem": self.theorem, "model": self.model, "params": self.params, "gates": self.gates,
                "gate_details": self.gate_details, "reasons": self.reasons,
                "margin": None if self.margin is None else self.margin.to_json(),
                "min_margin": None if self.margin is None else self.margin.min_margin,
                "verdict": self.verdict, "conclusion": self.conclusion, "sampled": True,
                "tolerances": self.tolerances}


def manifold_hypothesis_check(model: ManifoldModel, theorem: str, params: FunctionalParams,
                              samples: int = 20, seed: int = 0,
                              tol: Tolerances = DEFAULT_TOLERANCES,
                              line_form: str = "printed") -> HypothesisReport:
    thm = theorem_id(theorem)
    info = INFO[thm]
    unit, _ = model.normalize_unit_volume()
    n = unit.n
    verdict = classify(ParamPoint(n, params.t, params.s), tol)
    reasons = []
    param_ok = thm in verdict.theorems
    if not param_ok:
        silent = f"paper-silent:{thm}" in verdict.degeneracies
        reasons.append("param_system: paper-silent at this n" if silent else "param_system: no case satisfied")
    if "n+4(n-1)t+4s=0" in verdict.degeneracies:
        param_ok = False
        reasons.append("param_system: n+4(n-1)t+4s = 0 excluded throughout")
    if info.margin == "ws" and "8s+n-2=0" in verdict.degeneracies:
        param_ok = False
        reasons.append("param_system: 8s+n-2 = 0")
    if info.margin == "line" and "(n-2)+2ns=0" in verdict.degeneracies:
        param_ok = False
        reasons.append("param_system: (n-2)+2ns = 0")
    details = measure_gates(unit, params, samples, seed, tol)
    required = ("positive_R", "critical") + info.needs
    gates = {"param_system": param_ok}
    for g in ("positive_R", "critical", "cotton_div_zero", "lcf"):
        gates[g] = details[g]["ok"] if g in required else None
        if g in required and not details[g]["ok"]:
            reasons.append(g)
    conc = {"kind": info.conclusion, "einstein_relative": details["einstein"]["relative"],
            "holds": details["einstein"]["ok"] and (info.conclusion == "einstein" or n == 3
                                                      or details["lcf"]["ok"])}
    margin = None
    if reasons:
        v = "inapplicable"
    else:
        if info.margin is not None:
            margin = pointwise_margin(thm, _sample_pack(unit, samples, seed), params, tol, line_form)
            v = "hypotheses-hold" if margin.holds else "hypotheses-fail"
        else:
            v = "hypotheses-hold"
        if v == "hypotheses-hold" and not conc["holds"]:
            v = "CONTRADICTION"
    return HypothesisReport(thm, unit.descriptor(), {"n": n, "t": params.t, "s": params.s}, gates,
                            details, reasons, margin, v, conc, tol.as_dict())


# ---------------------------------------------------------------------------
# scans and region sampling

CSV_HEADER = ["n", "t", "s", "systems", "flags"]


def _parse_range(r):
    if isinstance(r, str):
        try:
            a, b = (float(x) for x in r.split(":"))
        except ValueError:
            raise ArgumentError(f"range must look like a:b, got {r!r}") from None
        return a, b
    a, b = r
    return float(a), float(b)


def scan_region(n: int, t_range, s_range, resolution, tol: Tolerances = DEFAULT_TOLERANCES) -> str:
    """CSV raster, rows ordered by t then s."""
    (ta, tb), (sa, sb) = _parse_range(t_range), _parse_range(s_range)
    if not all(math.isfinite(v) for v in (ta, tb, sa, sb)):
        raise ArgumentError("ranges must be finite")
    nt, ns = (resolution, resolution) if np.isscalar(resolution) else resolution
    nt, ns = int(nt), int(ns)
    if nt > 2000 or ns > 2000 or nt < 0 or ns < 0:
        raise ArgumentError("resolution must be between 0 and 2000 per axis")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    if nt == 0 or ns == 0 or ta > tb or sa > sb:
        return buf.getvalue()
    tv = np.linspace(ta, tb, nt)
    sv = np.linspace(sa, sb, ns)
    tt, ss = np.meshgrid(tv, sv, indexing="ij")
    res = classify_grid(n, tt, ss, tol)
    sys_names, flag_names = list(res["systems"]), list(res["flags"])
    S = np.stack([res["systems"][k] for k in sys_names], -1)
    F = np.stack([res["flags"][k] for k in flag_names], -1)
    for i in range(nt):
        for j in range(ns):
            w.writerow([n, repr(float(tv[i])), repr(float(sv[j])),
                        ";".join(k for k, on in zip(sys_names, S[i, j]) if on),
                        ";".join(k for k, on in zip(flag_names, F[i, j]) if on)])
    return buf.getvalue()


_LINE_SYSTEMS = {"5th-Form-1", "5th-Form-2", "55th-Form-1", "55th-Form-2", "6th-Form-1", "6th-Form-2"}


def sample_region(system: str, n: int, size: int, rng: np.random.Generator, box: float = 4.0,
                  max_rounds: int = 200):
    """Rejection sample (t, s) inside a system; may return fewer points if the region is thin or empty."""
    if system not in systems(n, 0.0, 0.0):
        raise ArgumentError(f"system {system!r} is not stated at n = {n}")
    ts, ss = [], []
    got = 0
    for _ in range(max_rounds):
        m = max(4 * (size - got), 1024)
        s = rng.uniform(-box, box, m)
        if system in _LINE_SYSTEMS:
            t = -(1 + 2 * s) / 2
        elif system == "thm1.9-line":
            s = np.full(m, -0.25)
            t = rng.uniform(-box, box, m)
        else:
            t = rng.uniform(-box, box, m)
        ok = systems(n, t, s)[system][1]
        ts.append(t[ok])
        ss.append(s[ok])
        got += int(ok.sum())
        if got >= size:
            break
    t, s = np.concatenate(ts)[:size], np.concatenate(ss)[:size]
    return t, s


# derived sign patterns claimed to follow from each system
def _sign_pattern(label, n, t, s):
    f = linear_forms(n, t, s)
    a4 = 1 + 4 * s
    if label == "4th-Form-13":
        return (a4 >= 0) & (f["ws"] > 0) & (f["A"] <= 0) & (f["B"] < 0)
    if label == "4th-Form-14":
        return (a4 <= 0) & (f["ws"] < 0) & (f["A"] >= 0) & (f["B"] > 0)
    if label == "3th-Proof-2":
        return (a4 >= 0) & (f["ws"] < 0) & (f["A"] <= 0) & (f["B"] < 0)
    if label == "3-Proof-4":
        return (a4 <= 0) & (f["ws"] > 0) & (f["A"] >= 0) & (f["B"] > 0)
    if label == "5-Proof-4":
        return (a4 > 0) & (f["wl"] > 0) & (f["D_alt"] > 0)
    if label == "5-Proof-5":
        return (a4 < 0) & (f["wl"] < 0) & (f["D_alt"] < 0)
    if label == "6-Proof-3":
        return (a4 > 0) & (f["wl"] < 0) & (f["D"] > 0)
    if label == "6-Proof-5":
        return (a4 < 0) & (f["wl"] > 0) & (f["D"] < 0)
    raise ArgumentError(f"unknown consequence {label!r}")


CONSEQUENCES = {
    "4th-Form-13": ("4th-Form-1", "44th-Form-1"),
    "4th-Form-14": ("4th-Form-2", "44th-Form-2"),
    "3th-Proof-2": ("3th-Form-1",),
    "3-Proof-4": ("33th-Form-1",),
    "5-Proof-4": ("5th-Form-1", "55th-Form-1"),
    "5-Proof-5": ("5th-Form-2", "55th-Form-2"),
    "6-Proof-3": ("6th-Form-1",),
    "6-Proof-5": ("6th-Form-2",),
}


def check_consequence(label: str, dims=(3, 4, 5, 6), size: int = 100_000, seed: int = 0) -> dict:
    """Sample each source system and test the derived sign pattern at every sample."""
    if label not in CONSEQUENCES:
        raise ArgumentError(f"unknown consequence {label!r}")
    parts = []
    for n in dims:
        stated = systems(n, 0.0, 0.0)
        for src in CONSEQUENCES[label]:
            if src not in stated:
                continue
            ss = np.random.SeedSequence([seed, n, sum(map(ord, src))])
            t, s = sample_region(src, n, size, np.random.default_rng(ss))
            ok = _sign_pattern(label, n, t, s)
            bad = np.flatnonzero(~ok)
            parts.append({"n": n, "system": src, "samples": int(t.size), "violations": int(bad.size),
                          "counterexample": None if bad.size == 0 else
                          {"n": n, "t": float(t[bad[0]]), "s": float(s[bad[0]])}})
    return {"consequence": label, "parts": parts,
            "samples": sum(p["samples"] for p in parts),
            "violations": sum(p["violations"] for p in parts),
            "ok": all(p["violations"] == 0 for p in parts)}


def admissible_params(theorem: str, n: int, k: int, seed: int = 0):
    """k random (t, s) satisfying one of the theorem's systems at dimension n (round-robin)."""
    thm = theorem_id(theorem)
    ids = theorem_systems(n)[thm]
    if not ids or k <= 0:
        return []
    rng = np.random.default_rng(np.random.SeedSequence([seed, n, int(thm[-1])]))
    pools = {sid: sample_region(sid, n, k, rng) for sid in ids}
    out = []
    i = 0
    while len(out) < k and any(len(p[0]) for p in pools.values()):
        sid = ids[i % len(ids)]
        t, s = pools[sid]
        j = i // len(ids)
        if j < len(t):
            out.append((sid, float(t[j]), float(s[j])))
        elif all(i // len(ids) >= len(p[0]) for p in pools.values()):
            break
        i += 1
    return out


def consistency_sweep(models: dict, k: int = 100, seed: int = 0, samples: int = 20,
                      tol: Tolerances = DEFAULT_TOLERANCES, line_form: str = "printed") -> dict:
    """Every model x theorem x k admissible parameter points; collects CONTRADICTION reports."""
    counts, contradictions = {}, []
    for name, model in models.items():
        for thm in THEOREMS:
            for sid, t, s in admissible_params(thm, model.n, k, seed):
                rep = manifold_hypothesis_check(model, thm, FunctionalParams(t, s), samples, seed, tol,
                                                line_form)
                counts[rep.verdict] = counts.get(rep.verdict, 0) + 1
                if rep.verdict == "CONTRADICTION":
                    contradictions.append({"model": name, "theorem": thm, "system": sid, "t": t, "s": s,
                                           "min_margin": rep.margin.min_margin if rep.margin else None,
                                           "einstein_relative": rep.conclusion["einstein_relative"]})
    return {"counts": counts, "contradictions": contradictions, "ok": not contradictions}
