"""Closed-form curvature on homogeneous models.

Left-invariant metrics are described by the structure constants of an
orthonormal left-invariant frame, ``[e_a, e_b] = c[a, b, d] e_d``. All
curvature tensors then have constant frame components and covariant
derivatives are purely algebraic:

    (nabla_a T)(e_i, ...) = - sum_slots Gamma[a, i, d] T(.., e_d, ..)

with ``nabla_{e_a} e_b = Gamma[a, b, d] e_d`` from the Koszul formula.
"""

from __future__ import annotations

import numpy as np

from . import invariants as inv
from . import tensors as T


def berger_structure(eps: float) -> np.ndarray:
    """Structure constants for the Berger sphere; e_0 spans the Hopf fibre.

    At eps = 1 this is the unit round 3-sphere.
    """
    c = np.zeros((3, 3, 3))
    for (a, b, d), v in {(1, 2, 0): 2 * eps, (2, 0, 1): 2 / eps, (0, 1, 2): 2 / eps}.items():
        c[a, b, d] = v
        c[b, a, d] = -v
    return c


def levi_civita(c: np.ndarray) -> np.ndarray:
    """Gamma[a, b, d] = <nabla_{e_a} e_b, e_d>."""
    return 0.5 * (c - np.einsum("bda->abd", c) + np.einsum("dab->abd", c))


def riemann_left_invariant(c: np.ndarray) -> np.ndarray:
    """R_ijkl = <R(e_i, e_j) e_l, e_k> with R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]."""
    G = levi_civita(c)
    # vec[a, b, z, e] = <R(e_a, e_b) e_z, e_e>
    vec = (np.einsum("bzd,ade->abze", G, G) - np.einsum("azd,bde->abze", G, G)
           - np.einsum("abf,fze->abze", c, G))
    return np.einsum("ijlk->ijkl", vec)


def covariant_left_invariant(G: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Covariant derivative of a left-invariant tensor, derivative slot last."""
    rank = t.ndim
    out = np.zeros(t.shape + (G.shape[0],))
    letters = "bcdefgh"[:rank]
    for m in range(rank):
        tin = letters[:m] + "z" + letters[m + 1:]
        out -= np.einsum(f"a{letters[m]}z,{tin}->{letters}a", G, t)
    return out


def left_invariant_pack(c: np.ndarray, points=None) -> inv.CurvaturePack:
    """Depth-2 pack for the left-invariant metric with structure constants c."""
    G = levi_civita(c)
    rm = riemann_left_invariant(c)
    ric = T.ricci_contract(rm)
    d_ric = covariant_left_invariant(G, ric)
    dd_ric = covariant_left_invariant(G, d_ric)
    return _broadcast(inv.pack_from_frame(rm, d_ric, dd_ric), points)


def space_form_pack(n: int, K: float, points=None) -> inv.CurvaturePack:
    g = np.eye(n)
    rm = 0.5 * K * T.kn(g, g)
    z3, z4 = np.zeros((n,) * 3), np.zeros((n,) * 4)
    return _broadcast(inv.pack_from_frame(rm, z3, z4), points)


def product_pack(p: int, K1: float, q: int, K2: float, points=None) -> inv.CurvaturePack:
    """Riemannian product of constant-curvature factors (parallel curvature)."""
    n = p + q
    rm = np.zeros((n,) * 4)
    for lo, hi, K in ((0, p, K1), (p, n, K2)):
        m = hi - lo
        e = np.eye(m)
        rm[lo:hi, lo:hi, lo:hi, lo:hi] = 0.5 * K * T.kn(e, e)
    z3, z4 = np.zeros((n,) * 3), np.zeros((n,) * 4)
    return _broadcast(inv.pack_from_frame(rm, z3, z4), points)


def _broadcast(pack: inv.CurvaturePack, points) -> inv.CurvaturePack:
    """Repeat a single-point pack over the given points (homogeneity)."""
    one = pack.take([0]) if pack.shape else _as_batch(pack)
    if points is None:
        return one
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    k = pts.shape[0]
    idx = np.zeros(k, dtype=int)
    out = one.take(idx)
    return inv.CurvaturePack(**{**_kw(out), "point": pts})


def _as_batch(pack):
    kw = _kw(pack)
    for key, v in kw.items():
        if isinstance(v, np.ndarray) and key != "point":
            kw[key] = v[None]
    kw["R"] = np.atleast_1d(pack.R)
    return inv.CurvaturePack(**kw)


def _kw(pack):
    from dataclasses import fields
    kw = {f.name: getattr(pack, f.name) for f in fields(pack)}
    kw["norms"] = {}
    return kw


def sphere_volume(n: int, r: float = 1.0) -> float:
    """Volume of the round n-sphere of radius r."""
    from math import gamma, pi
    return 2 * pi ** ((n + 1) / 2) / gamma((n + 1) / 2) * r ** n


def berger_euler_metric(eps: float):
    """Euler-angle chart (theta, phi, psi) of the Berger metric.

    g = (d theta^2 + sin^2 theta d phi^2 + eps^2 (d psi + cos theta d phi)^2) / 4,
    phi has period 2 pi and psi period 4 pi.
    """

    def metric(x):
        th = x[..., 0]
        st, ct = np.sin(th), np.cos(th)
        g = np.zeros(x.shape[:-1] + (3, 3))
        e2 = eps * eps
        g[..., 0, 0] = 1.0
        g[..., 1, 1] = st ** 2 + e2 * ct ** 2
        g[..., 2, 2] = e2
        g[..., 1, 2] = g[..., 2, 1] = e2 * ct
        return 0.25 * g

    return metric
