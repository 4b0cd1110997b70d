"""Periodic-grid curvature engine for tori.

Pointwise nested differencing costs (order * n)^4 metric calls per point at
depth 2, which is hopeless on a full quadrature grid. On a periodic chart the
same stencils can be applied to whole grids of intermediate fields instead:
the metric is sampled once, and Christoffel symbols, Ricci and its covariant
derivative are stored on the grid and differenced with wrapped shifts. The
Riemann tensor and second derivatives are only ever formed one slab (a block
of planes along the first axis) at a time, which bounds memory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import invariants as inv
from .charts import _STENCILS, MetricChart, _connection_terms
from .errors import ArgumentError

# floats allowed in one slab-sized temporary
_SLAB_BUDGET = 4_000_000


@dataclass(frozen=True)
class GridSpec:
    N: int
    order: int = 4

    def __post_init__(self):
        if self.N < 2 * self.order:
            raise ArgumentError(f"grid too coarse for order {self.order}: N = {self.N}")
        if self.order not in _STENCILS:
            raise ArgumentError("order must be 2, 4 or 6")


def grid_points(chart: MetricChart, N: int):
    """Node coordinates, shape (N,)*n + (n,), and the cell volume."""
    axes = [lo + (hi - lo) * np.arange(N) / N for lo, hi in chart.domain]
    X = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    cell = float(np.prod((chart.domain[:, 1] - chart.domain[:, 0]) / N))
    return X, cell


class GridEngine:
    def __init__(self, chart: MetricChart, spec: GridSpec):
        if not all(chart.periodic):
            raise ArgumentError("grid engine needs a fully periodic chart")
        self.chart, self.spec, self.n = chart, spec, chart.n
        self.X, self.cell = grid_points(chart, spec.N)
        self.h = (chart.domain[:, 1] - chart.domain[:, 0]) / spec.N
        self.offs, self.coef = _STENCILS[spec.order]
        self.offs = self.offs.astype(int)
        self.g = chart.metric(self.X)
        self.ginv = np.linalg.inv(self.g)
        self.sqrt_det = np.sqrt(np.linalg.det(self.g))
        self._gamma = None
        self._ric = None
        self._d_ric = None

    # -- differencing ------------------------------------------------------
    def rows_per_slab(self, comps: int) -> int:
        plane = self.spec.N ** (self.n - 1)
        return int(max(1, min(self.spec.N, _SLAB_BUDGET // max(1, plane * comps))))

    def slabs(self, comps: int):
        step = self.rows_per_slab(comps)
        for r0 in range(0, self.spec.N, step):
            yield np.arange(r0, min(self.spec.N, r0 + step))

    def grad(self, F, rows):
        """All coordinate derivatives of grid field F on the given rows of axis 0."""
        N, n = self.spec.N, self.n
        out = np.empty(F[rows].shape + (n,))
        acc = 0.0
        for o, c in zip(self.offs, self.coef):
            acc = acc + c * np.take(F, (rows + o) % N, axis=0)
        out[..., 0] = acc / self.h[0]
        block = F[rows]
        for a in range(1, n):
            acc = 0.0
            for o, c in zip(self.offs, self.coef):
                acc = acc + c * np.roll(block, -o, axis=a)
            out[..., a] = acc / self.h[a]
        return out

    # -- stored fields -----------------------------------------------------
    @property
    def gamma(self):
        if self._gamma is None:
            n = self.n
            G = np.empty(self.g.shape[:-2] + (n, n, n))
            for rows in self.slabs(n ** 3):
                dg = self.grad(self.g, rows)
                low = 0.5 * (np.einsum("...jki->...kij", dg) + np.einsum("...ikj->...kij", dg)
                             - np.einsum("...ijk->...kij", dg))
                G[rows] = np.einsum("...kl,...lij->...kij", self.ginv[rows], low)
            self._gamma = G
        return self._gamma

    def riemann(self, rows):
        G = self.gamma
        dG = self.grad(G, rows)
        Gr = G[rows]
        up = (np.einsum("...rnsm->...rsmn", dG) - np.einsum("...rmsn->...rsmn", dG)
              + np.einsum("...rml,...lns->...rsmn", Gr, Gr)
              - np.einsum("...rnl,...lms->...rsmn", Gr, Gr))
        return np.einsum("...ra,...asmn->...rsmn", self.g[rows], up)

    @property
    def ric(self):
        if self._ric is None:
            n = self.n
            out = np.empty(self.g.shape[:-2] + (n, n))
            for rows in self.slabs(n ** 4):
                out[rows] = np.einsum("...ik,...ijkl->...jl", self.ginv[rows], self.riemann(rows))
            self._ric = out
        return self._ric

    def covariant(self, F, rows, rank):
        return self.grad(F, rows) - _connection_terms(self.gamma[rows], F[rows], rank)

    @property
    def d_ric(self):
        if self._d_ric is None:
            n = self.n
            out = np.empty(self.g.shape[:-2] + (n, n, n))
            for rows in self.slabs(n ** 3):
                out[rows] = self.covariant(self.ric, rows, 2)
            self._d_ric = out
        return self._d_ric

    # -- output ------------------------------------------------------------
    def packs(self, depth: int = 0):
        """Yield (pack, weights) per slab; weights are sqrt(det g) * cell volume."""
        if depth not in (0, 1, 2):
            raise ArgumentError("depth must be 0, 1 or 2")
        n = self.n
        for rows in self.slabs(n ** 5 if depth == 2 else n ** 4):
            m = len(rows) * self.spec.N ** (n - 1)
            rm = self.riemann(rows).reshape((m,) + (n,) * 4)
            d_ric = dd_ric = None
            if depth >= 1:
                d_ric = self.d_ric[rows].reshape((m,) + (n,) * 3)
            if depth == 2:
                dd_ric = self.covariant(self.d_ric, rows, 3).reshape((m,) + (n,) * 4)
            g = self.g[rows].reshape((m, n, n))
            pts = self.X[rows].reshape((m, n))
            pack = inv.pack_from_coordinates(g, rm, d_ric, dd_ric, point=pts)
            yield pack, (self.sqrt_det[rows] * self.cell).reshape(m)

    def volume(self) -> float:
        return float(np.sum(self.sqrt_det) * self.cell)
