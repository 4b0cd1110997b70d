"""Pointwise multilinear algebra for small dimensions.

Array kernels (lower-case helpers) work on stacked tensors: any leading batch
axes are carried through, the trailing axes are tensor slots. All slots are
covariant. Contractions take an optional inverse metric ``ginv``; ``None``
means an orthonormal frame.

Sign convention: ``R_{ijij} > 0`` on the round sphere and the Ricci tensor is
the contraction of the first and third slots, ``R_jl = g^{ik} R_ijkl``.

The typed wrappers (:class:`SymTensor2`, :class:`AlgebraicCurvatureTensor`,
:class:`CottonTensor3`, :class:`MetricFrame`) hold a single point and validate
their symmetry class on construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError

N_MIN, N_MAX = 3, 8


# ---------------------------------------------------------------------------
# array kernels

def sym(a):
    return 0.5 * (a + np.swapaxes(a, -1, -2))


def trace(a, ginv=None):
    if ginv is None:
        return np.trace(a, axis1=-2, axis2=-1)
    return np.einsum("...ij,...ij->...", ginv, a)


def traceless(a, g=None, ginv=None):
    n = a.shape[-1]
    if g is None:
        g = np.eye(n)
    return a - (trace(a, ginv) / n)[..., None, None] * g


def kn(a, b):
    """Kulkarni-Nomizu product a_ik b_jl + a_jl b_ik - a_il b_jk - a_jk b_il."""
    t = np.einsum("...ik,...jl->...ijkl", a, b)
    # a_ik b_jl + a_jl b_ik is t + its (ij)(kl) swap; the other two are the k<->l swap
    t = t + np.einsum("...ijkl->...jilk", t)
    return t - np.swapaxes(t, -1, -2)


def raise_all(t, ginv, rank):
    """Raise the trailing ``rank`` slots of ``t`` with ``ginv``."""
    for slot in range(rank):
        t = _raise_slot(t, ginv, t.ndim - rank + slot, rank)
    return t


def _raise_slot(t, ginv, ax, rank):
    t = np.moveaxis(t, ax, -1)
    gb = ginv.reshape(ginv.shape[:-2] + (1,) * (rank - 1) + ginv.shape[-2:])
    t = np.matmul(t[..., None, :], gb)[..., 0, :]  # ginv symmetric
    return np.moveaxis(t, -1, ax)


def inner(s, t, ginv=None, rank=None):
    rank = t.ndim if rank is None else rank
    axes = tuple(range(-rank, 0))
    if ginv is not None:
        t = raise_all(t, ginv, rank)
    return np.sum(s * t, axis=axes)


def norm2(t, ginv=None, rank=None):
    return inner(t, t, ginv, rank)


def ricci_contract(rm, ginv=None):
    if ginv is None:
        return np.einsum("...ijil->...jl", rm)
    return np.einsum("...ik,...ijkl->...jl", ginv, rm)


def ww(w, ginv=None):
    """(W o W)_ij = W_ikpq W_j^kpq."""
    n = w.shape[-1]
    a = w.reshape(w.shape[:-4] + (n, n ** 3))
    b = a if ginv is None else raise_all(w, ginv, 3).reshape(a.shape)
    return np.matmul(a, np.swapaxes(b, -1, -2))


def curv_sym(rm, s, ginv=None):
    """T_ij = s^kl rm_ikjl."""
    if ginv is not None:
        s = raise_all(s, ginv, 2)
    return np.einsum("...kl,...ikjl->...ij", s, rm)


def weyl_part(rm, g=None, ginv=None):
    """Totally trace-free part of an algebraic curvature tensor (Ricci form)."""
    n = rm.shape[-1]
    if n < 3:
        raise ArgumentError("Weyl part needs n >= 3")
    if g is None:
        g = np.broadcast_to(np.eye(n), rm.shape[:-4] + (n, n))
    ric = ricci_contract(rm, ginv)
    r = trace(ric, ginv)
    return (rm - kn(ric, g) / (n - 2)
            + (r / (2 * (n - 1) * (n - 2)))[..., None, None, None, None] * kn(g, g))


def curvature_symmetry_residual(t):
    """Max deviation from T_ijkl = -T_jikl = -T_ijlk = T_klij."""
    r1 = t + np.swapaxes(t, -3, -4)
    r2 = t + np.swapaxes(t, -1, -2)
    r3 = t - np.einsum("...ijkl->...klij", t)
    return max(np.max(np.abs(r)) if r.size else 0.0 for r in (r1, r2, r3))


def bianchi_sum(t):
    """T_ijkl + T_jkil + T_kijl."""
    return t + np.einsum("...jkil->...ijkl", t) + np.einsum("...kijl->...ijkl", t)


def project_curvature(t):
    """Project an arbitrary 4-tensor onto algebraic curvature tensors."""
    t = 0.5 * (t - np.swapaxes(t, -3, -4))
    t = 0.5 * (t - np.swapaxes(t, -1, -2))
    t = 0.5 * (t + np.einsum("...ijkl->...klij", t))
    return t - bianchi_sum(t) / 3.0


def single_traces(t, ginv=None):
    """All six single g-traces of a rank-4 tensor, as a stacked array."""
    pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    n = t.shape[-1]
    if ginv is None:
        ginv = np.eye(n)
    letters = "ijkl"
    out = []
    for a, b in pairs:
        sub = list(letters)
        sub[b] = sub[a].upper()
        spec = f"...{sub[a]}{sub[a].upper()},...{''.join(sub)}->..." + "".join(
            c for i, c in enumerate(letters) if i not in (a, b))
        out.append(np.einsum(spec, ginv, t))
    return np.stack(out, axis=-3)


def cube_trace(a):
    """a_ij a_jk a_ki in an orthonormal frame."""
    return np.einsum("...ij,...jk,...ki->...", a, a, a)


def orthonormal_frame(g):
    """E with E^T g E = I (columns are g-orthonormal vectors)."""
    chol = np.linalg.cholesky(g)
    n = g.shape[-1]
    eye = np.broadcast_to(np.eye(n), g.shape)
    return np.swapaxes(np.linalg.solve(chol, eye), -1, -2)


def to_frame(t, e, rank):
    """Components of the covariant tensor ``t`` on the frame columns of ``e``."""
    for slot in range(rank):
        ax = t.ndim - rank + slot
        t = np.moveaxis(t, ax, -1)
        eb = e.reshape(e.shape[:-2] + (1,) * (rank - 1) + e.shape[-2:])
        t = np.moveaxis(np.matmul(t[..., None, :], eb)[..., 0, :], -1, ax)
    return t


# ---------------------------------------------------------------------------
# random generators

def _check_n(n):
    if not (N_MIN <= int(n) <= N_MAX):
        raise ArgumentError(f"n must lie in [{N_MIN}, {N_MAX}], got {n}")


def _draw(rng, shape, dist):
    if dist == "normal":
        return rng.standard_normal(shape)
    if dist == "cauchy":
        return rng.standard_cauchy(shape)
    raise ArgumentError(f"unknown distribution {dist!r}")


def random_sym_batch(rng, size, n, dist="normal"):
    return sym(_draw(rng, (size, n, n), dist))


def random_traceless_batch(rng, size, n, dist="normal"):
    return traceless(random_sym_batch(rng, size, n, dist))


def random_curvature_batch(rng, size, n, dist="normal"):
    return project_curvature(_draw(rng, (size, n, n, n, n), dist))


def random_weyl_batch(rng, size, n, dist="normal"):
    if n == 3:
        return np.zeros((size, 3, 3, 3, 3))
    return weyl_part(random_curvature_batch(rng, size, n, dist))


def random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


# ---------------------------------------------------------------------------
# typed single-point wrappers

def _as_float_array(x):
    return np.array(getattr(x, "entries", x), dtype=float)


@dataclass(frozen=True, eq=False)
class SymTensor2:
    entries: np.ndarray

    def __post_init__(self):
        a = _as_float_array(self.entries)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ArgumentError(f"SymTensor2 needs a square matrix, got shape {a.shape}")
        scale = max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
        if np.max(np.abs(a - a.T)) > 1e-10 * scale:
            raise ArgumentError("SymTensor2 entries are not symmetric")
        a = sym(a)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class AlgebraicCurvatureTensor:
    entries: np.ndarray
    geometric: bool = True

    def __post_init__(self):
        t = _as_float_array(self.entries)
        n = t.shape[0]
        if t.shape != (n, n, n, n):
            raise ArgumentError(f"curvature tensor needs shape (n,n,n,n), got {t.shape}")
        scale = max(1.0, float(np.max(np.abs(t))))
        if curvature_symmetry_residual(t) > 1e-10 * scale:
            raise ArgumentError("tensor lacks the pair/exchange symmetries")
        if self.geometric and np.max(np.abs(bianchi_sum(t))) > 1e-10 * scale:
            raise ArgumentError("tensor tagged geometric violates the first Bianchi identity")
        t.setflags(write=False)
        object.__setattr__(self, "entries", t)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class CottonTensor3:
    entries: np.ndarray

    def __post_init__(self):
        c = _as_float_array(self.entries)
        n = c.shape[0]
        if c.shape != (n, n, n):
            raise ArgumentError(f"Cotton tensor needs shape (n,n,n), got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "entries", c)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def residuals(self, ginv=None) -> dict:
        """Antisymmetry, trace and cyclic residuals (max norms)."""
        c = self.entries
        if ginv is None:
            ginv = np.eye(self.n)
        return {
            "antisym": float(np.max(np.abs(c + np.swapaxes(c, 0, 1)))),
            "trace_ij": float(np.max(np.abs(np.einsum("ij,ijk->k", ginv, c)))),
            "trace_ik": float(np.max(np.abs(np.einsum("ik,ijk->j", ginv, c)))),
            "trace_jk": float(np.max(np.abs(np.einsum("jk,ijk->i", ginv, c)))),
            "cyclic": float(np.max(np.abs(c + np.einsum("jki->ijk", c) + np.einsum("kij->ijk", c)))),
        }


@dataclass(frozen=True, eq=False)
class MetricFrame:
    g: np.ndarray
    g_inv: np.ndarray

    def __post_init__(self):
        g = sym(_as_float_array(self.g))
        gi = sym(_as_float_array(self.g_inv))
        n = g.shape[0]
        if g.shape != (n, n) or gi.shape != (n, n):
            raise ArgumentError("metric and inverse must be n x n")
        if np.min(np.linalg.eigvalsh(g)) <= 0:
            raise ArgumentError("metric is not positive definite")
        if np.max(np.abs(g @ gi - np.eye(n))) > 1e-12 * max(1.0, np.linalg.cond(g)):
            raise ArgumentError("g_inv is not the inverse of g")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "g_inv", gi)

    @classmethod
    def from_metric(cls, g) -> "MetricFrame":
        g = sym(_as_float_array(g))
        return cls(g, np.linalg.inv(g))

    @classmethod
    def identity(cls, n: int) -> "MetricFrame":
        return cls(np.eye(n), np.eye(n))

    @property
    def n(self) -> int:
        return self.g.shape[0]

    @property
    def orthonormal(self) -> bool:
        return bool(np.array_equal(self.g, np.eye(self.n)))


def _same_n(*objs):
    ns = {o.n for o in objs}
    if len(ns) != 1:
        raise ArgumentError(f"dimension mismatch: {sorted(ns)}")
    return ns.pop()


def _ginv(frame):
    return None if frame is None or frame.orthonormal else frame.g_inv


# ---------------------------------------------------------------------------
# public operations

def traceless_part(a: SymTensor2, frame: MetricFrame | None = None) -> SymTensor2:
    frame = frame or MetricFrame.identity(a.n)
    _same_n(a, frame)
    return SymTensor2(traceless(a.entries, frame.g, frame.g_inv))


def kulkarni_nomizu(a: SymTensor2, b: SymTensor2) -> AlgebraicCurvatureTensor:
    _same_n(a, b)
    return AlgebraicCurvatureTensor(kn(a.entries, b.entries))


def contract_ww(w: AlgebraicCurvatureTensor, frame: MetricFrame | None = None) -> SymTensor2:
    if frame is not None:
        _same_n(w, frame)
    return SymTensor2(sym(ww(w.entries, _ginv(frame))))


def contract_curv_sym(rm: AlgebraicCurvatureTensor, s: SymTensor2,
                      frame: MetricFrame | None = None) -> SymTensor2:
    _same_n(rm, s) if frame is None else _same_n(rm, s, frame)
    return SymTensor2(sym(curv_sym(rm.entries, s.entries, _ginv(frame))))


def tensor_norm2(t, frame: MetricFrame | None = None) -> float:
    """Squared norm of any wrapped tensor, contracting slots with g^-1."""
    arr = t.entries
    ginv = None if frame is None else frame.g_inv
    return float(norm2(arr, ginv, arr.ndim))


def random_traceless_sym(n: int, seed: int) -> SymTensor2:
    _check_n(n)
    rng = np.random.default_rng(seed)
    return SymTensor2(random_traceless_batch(rng, 1, n)[0])


def random_weyl_like(n: int, seed: int) -> AlgebraicCurvatureTensor:
    _check_n(n)
    rng = np.random.default_rng(seed)
    return AlgebraicCurvatureTensor(random_weyl_batch(rng, 1, n)[0])
