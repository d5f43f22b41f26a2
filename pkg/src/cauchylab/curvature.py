"""Menger curvature of discrete planar measures.

The curvature of an ordered triple is the squared reciprocal circumradius
1/R(x, y, z)^2. Summing it against the weight products over all ordered
triples of pairwise-distinct atoms gives the total curvature of the
measure; restricting that sum to dyadic cubes and dividing by the cube
mass yields the multiscale decay diagnostic.

Triples with a repeated atom are excluded everywhere: the continuous
integrals run over a diagonal-free product, and for atomic measures the
diagonal would inject spurious mass. Ordered-triple convention: each
geometric triangle is counted 3! times, matching the iterated integrals;
``triple_count`` records the number summed so unordered totals are a
division away.

The cubic kernel is JIT-compiled and parallel over the outer atom index;
each atom's row value is accumulated in index order and written to its
own slot, and the final weighting is a fixed-order dot product, so totals
are bit-identical for every thread count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numba
import numpy as np
from numba import njit, prange

# workqueue needs no TBB/OMP probing (quiet import) and is plenty for desk scale
numba.config.THREADING_LAYER = "workqueue"

from .errors import (
    BudgetExceeded,
    DegenerateTriple,
    DimensionMismatch,
    EmptyMeasure,
    InvalidScales,
)
from .measure import DiscreteMeasure

__all__ = [
    "CurvatureResult",
    "circumradius",
    "menger_c2_point",
    "menger_c2",
    "curvature_ratio_scan",
]

# Area below COLLINEAR_TOL * (max pairwise distance)^3 counts as collinear,
# i.e. the triple contributes zero curvature.
COLLINEAR_TOL = 1e-14

_COLL_SQ = (2.0 * COLLINEAR_TOL) ** 2  # squared-cross threshold vs (scale^2)^3


@dataclass(frozen=True)
class CurvatureResult:
    """Total curvature, per-atom values, and the number of ordered triples."""

    total: float
    pointwise: np.ndarray
    triple_count: int


def _require_planar(mu: DiscreteMeasure) -> None:
    if mu.dim != 2:
        raise DimensionMismatch(f"curvature requires planar measures, got d = {mu.dim}")


def circumradius(a, b, c) -> float:
    """Circumradius of the triangle abc; +inf when the points are collinear.

    Uses R = |ab| |bc| |ac| / (4 Area). Collinearity is decided by the
    scale-relative area threshold above, so the inverse curvature 1/R is
    exactly zero on numerically flat triples. Vertices are put in a
    canonical order first, which makes the rounding identical for all six
    argument orderings.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    if a.shape != (2,) or b.shape != (2,) or c.shape != (2,):
        raise DimensionMismatch("circumradius requires three planar points")
    a, b, c = sorted((tuple(a), tuple(b), tuple(c)))
    a, b, c = np.asarray(a), np.asarray(b), np.asarray(c)
    ab = b - a
    ac = c - a
    bc = c - b
    d_ab = float(np.hypot(*ab))
    d_ac = float(np.hypot(*ac))
    d_bc = float(np.hypot(*bc))
    if d_ab == 0.0 or d_ac == 0.0 or d_bc == 0.0:
        raise DegenerateTriple("two of the three points coincide")
    cross = ab[0] * ac[1] - ab[1] * ac[0]
    area = 0.5 * abs(cross)
    scale = max(d_ab, d_ac, d_bc)
    if area <= COLLINEAR_TOL * scale ** 3:
        return float("inf")
    return d_ab * d_ac * d_bc / (4.0 * area)


@njit(cache=True, parallel=True)
def _pointwise_kernel(x, y, w, coll_sq):  # pragma: no cover - compiled
    n = x.shape[0]
    out = np.zeros(n)
    for i in prange(n):
        acc_i = 0.0
        xi = x[i]
        yi = y[i]
        for j in range(n):
            if j == i:
                continue
            dxj = x[j] - xi
            dyj = y[j] - yi
            r2j = dxj * dxj + dyj * dyj
            acc_j = 0.0
            for k in range(n):
                if k == i or k == j:
                    continue
                dxk = x[k] - xi
                dyk = y[k] - yi
                r2k = dxk * dxk + dyk * dyk
                djk_x = x[k] - x[j]
                djk_y = y[k] - y[j]
                d2jk = djk_x * djk_x + djk_y * djk_y
                cr = dxj * dyk - dyj * dxk
                num = 4.0 * cr * cr
                m2 = max(r2j, max(r2k, d2jk))
                if num <= coll_sq * m2 * m2 * m2:
                    continue
                acc_j += w[k] * num / (r2j * r2k * d2jk)
            acc_i += w[j] * acc_j
        out[i] = acc_i
    return out


@njit(cache=True)
def _point_kernel(x, y, w, zx, zy, coll_sq):  # pragma: no cover - compiled
    n = x.shape[0]
    total = 0.0
    for j in range(n):
        dxj = x[j] - zx
        dyj = y[j] - zy
        r2j = dxj * dxj + dyj * dyj
        if r2j == 0.0:
            continue
        acc_j = 0.0
        for k in range(n):
            if k == j:
                continue
            dxk = x[k] - zx
            dyk = y[k] - zy
            r2k = dxk * dxk + dyk * dyk
            if r2k == 0.0:
                continue
            djk_x = x[k] - x[j]
            djk_y = y[k] - y[j]
            d2jk = djk_x * djk_x + djk_y * djk_y
            cr = dxj * dyk - dyj * dxk
            num = 4.0 * cr * cr
            m2 = max(r2j, max(r2k, d2jk))
            if num <= coll_sq * m2 * m2 * m2:
                continue
            acc_j += w[k] * num / (r2j * r2k * d2jk)
        total += w[j] * acc_j
    return total


class _thread_cap:
    """Temporarily cap the parallel worker count (output is unaffected)."""

    def __init__(self, threads: Optional[int]):
        self.threads = threads
        self.saved = None

    def __enter__(self):
        if self.threads is not None:
            self.saved = numba.get_num_threads()
            numba.set_num_threads(max(1, min(int(self.threads), self.saved)))

    def __exit__(self, *exc):
        if self.saved is not None:
            numba.set_num_threads(self.saved)


def menger_c2_point(mu: DiscreteMeasure, z) -> float:
    """Curvature density at z: double sum over atom pairs distinct from z."""
    _require_planar(mu)
    z = np.asarray(z, dtype=float)
    if z.shape != (2,):
        raise DimensionMismatch("evaluation point must be planar")
    if len(mu) < 2:
        return 0.0
    return float(
        _point_kernel(
            np.ascontiguousarray(mu.points[:, 0]),
            np.ascontiguousarray(mu.points[:, 1]),
            mu.weights,
            float(z[0]),
            float(z[1]),
            _COLL_SQ,
        )
    )


def _check_budget(n: int, budget: Optional[float]) -> None:
    triples = n * (n - 1) * (n - 2) if n >= 3 else 0
    if budget is not None and triples > budget:
        raise BudgetExceeded(
            f"{triples} ordered triples exceed the configured budget of {budget:g}"
        )


def menger_c2(
    mu: DiscreteMeasure,
    threads: Optional[int] = None,
    budget: Optional[float] = None,
) -> CurvatureResult:
    """Total Menger curvature over ordered triples of distinct atoms.

    ``pointwise[i]`` is the curvature density at atom i over the remaining
    atoms; the total is the weight-dot of the pointwise vector, evaluated
    in index order regardless of thread count.
    """
    _require_planar(mu)
    n = len(mu)
    triple_count = n * (n - 1) * (n - 2) if n >= 3 else 0
    if n < 3:
        return CurvatureResult(0.0, np.zeros(n), triple_count)
    _check_budget(n, budget)
    with _thread_cap(threads):
        pointwise = _pointwise_kernel(
            np.ascontiguousarray(mu.points[:, 0]),
            np.ascontiguousarray(mu.points[:, 1]),
            mu.weights,
            _COLL_SQ,
        )
    total = float(pointwise @ mu.weights)
    return CurvatureResult(total, pointwise, triple_count)


def curvature_ratio_scan(
    mu: DiscreteMeasure,
    scales: Sequence[float],
    threads: Optional[int] = None,
    budget: Optional[float] = None,
) -> list:
    """Max of c2(mu restricted to Q) / mu(Q) over occupied dyadic cubes per scale.

    Cubes come from the origin-anchored lattice of the given side; only
    cubes holding at least one atom are visited, and per-cube work is cubic
    in the number of retained atoms.
    """
    _require_planar(mu)
    if len(mu) == 0:
        raise EmptyMeasure("cannot scan an empty measure")
    scales = [float(s) for s in scales]
    _check_scales(scales)
    pts = mu.points
    w = mu.weights
    out = []
    for delta in scales:
        cells = _bin_by_cell(pts, delta)
        if budget is not None:
            est = sum(len(m) ** 3 for m in cells.values())
            if est > budget:
                raise BudgetExceeded(
                    f"scale {delta}: ~{est} ordered triples exceed the budget of {budget:g}"
                )
        best = 0.0
        for key in sorted(cells):
            members = cells[key]
            if len(members) < 3:
                continue
            sub = DiscreteMeasure(pts[members], w[members], _validated=True)
            ratio = menger_c2(sub, threads=threads).total / sub.total_mass
            if ratio > best:
                best = ratio
        out.append((delta, best))
    return out


def _bin_by_cell(points: np.ndarray, delta: float, shift: float = 0.0) -> dict:
    idx = np.floor((points - shift) / delta).astype(np.int64)
    cells: dict = {}
    for row, key in enumerate(map(tuple, idx)):
        cells.setdefault(key, []).append(row)
    return cells


def _check_scales(scales) -> None:
    if any(not (s > 0) for s in scales):
        raise InvalidScales(f"scales must be positive, got {scales}")
    if any(a <= b for a, b in zip(scales, scales[1:])):
        raise InvalidScales(f"scales must be strictly decreasing, got {scales}")
