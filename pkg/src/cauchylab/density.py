"""Cube densities, multiscale density profiles, and cube splitting.

The n-dimensional density of a cube is its mass divided by side^n; for
planar Cauchy diagnostics n = 1. The profile takes, per scale, the
supremum over two origin-anchored lattices (plain and half-shifted), so
every atom-centered cube of half the scale is covered by an enumerated
cube. ``find_separated_pair`` realizes the grid-splitting argument that
extracts two massive, non-touching subcubes from a dense cube.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .curvature import _check_scales
from .errors import DimensionMismatch, InvalidParameter
from .measure import Cube, DiscreteMeasure, restrict

__all__ = [
    "DensityProfile",
    "theta",
    "density_profile",
    "growth_constant",
    "find_separated_pair",
]


@dataclass(frozen=True)
class DensityProfile:
    """Per-scale suprema of the n-dimensional cube density."""

    exponent: int
    entries: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        scales = [s for s, _ in self.entries]
        _check_scales(scales)
        if any(v < 0 for _, v in self.entries):
            raise InvalidParameter("density suprema cannot be negative")

    def scales(self):
        return [s for s, _ in self.entries]

    def values(self):
        return [v for _, v in self.entries]


def theta(mu: DiscreteMeasure, cube: Cube, n: int = 1) -> float:
    """n-dimensional density of the cube: restricted mass over side^n."""
    n = int(n)
    if n < 1:
        raise InvalidParameter(f"density exponent must be >= 1, got {n}")
    return restrict(mu, cube).total_mass / cube.side ** n


def density_profile(mu: DiscreteMeasure, scales: Sequence[float], n: int = 1) -> DensityProfile:
    """Sup of theta over occupied lattice cubes (plain + half-shifted) per scale."""
    n = int(n)
    if n < 1:
        raise InvalidParameter(f"density exponent must be >= 1, got {n}")
    scales = [float(s) for s in scales]
    _check_scales(scales)
    entries = []
    for delta in scales:
        sup = 0.0
        if len(mu) > 0:
            for shift in (0.0, delta / 2.0):
                masses = _cell_masses(mu.points, mu.weights, delta, shift)
                if masses.size:
                    sup = max(sup, float(masses.max()) / delta ** n)
        entries.append((delta, sup))
    return DensityProfile(n, tuple(entries))


def _cell_masses(points: np.ndarray, weights: np.ndarray, delta: float, shift: float) -> np.ndarray:
    idx = np.floor((points - shift) / delta).astype(np.int64)
    _, inverse = np.unique(idx, axis=0, return_inverse=True)
    return np.bincount(inverse.ravel(), weights=weights)


def growth_constant(mu: DiscreteMeasure, scales: Sequence[float]) -> float:
    """Empirical linear-growth constant: max density over the scales probed.

    Includes the whole-support bounding cube, so the constant dominates the
    coarsest scale as well.
    """
    profile = density_profile(mu, scales, n=1)
    support = mu.bounding_cube()
    c0 = mu.total_mass / support.side
    return max([c0] + profile.values())


def find_separated_pair(
    mu: DiscreteMeasure,
    cube: Cube,
    c1: int,
    c1p: float,
) -> Optional[Tuple[Cube, Cube]]:
    """First non-touching pair of grid subcubes that both carry enough mass.

    The cube splits into a c1 x c1 (per-axis) grid of half-open subcubes.
    A pair qualifies when min(mass', mass'') >= side(Q)/c1p and the two
    cells do not touch, i.e. their set distance is at least one cell side.
    Cells and pairs are scanned in lexicographic index order; returns None
    when no pair qualifies.
    """
    c1 = int(c1)
    if c1 < 3:
        raise InvalidParameter(f"grid split needs c1 >= 3, got {c1}")
    c1p = float(c1p)
    if c1p <= 0:
        raise InvalidParameter(f"mass divisor must be positive, got {c1p}")
    if cube.dim != mu.dim:
        raise DimensionMismatch(
            f"measure has dimension {mu.dim}, cube has dimension {cube.dim}"
        )
    inside = restrict(mu, cube)
    threshold = cube.side / c1p
    side = cube.side / c1
    lower = cube.lower()
    masses: dict = {}
    if len(inside) > 0:
        idx = np.floor((inside.points - lower) / side).astype(np.int64)
        # atoms on the far closed boundary of a closed parent land in the last cell
        idx = np.minimum(idx, c1 - 1)
        for row, key in enumerate(map(tuple, idx)):
            masses[key] = masses.get(key, 0.0) + float(inside.weights[row])
    rich = [key for key in sorted(masses) if masses[key] >= threshold]
    for a, b in itertools.combinations(rich, 2):
        if max(abs(i - j) for i, j in zip(a, b)) >= 2:
            return _grid_cell(lower, side, a), _grid_cell(lower, side, b)
    return None


def _grid_cell(lower: np.ndarray, side: float, index) -> Cube:
    center = lower + side * (np.asarray(index, dtype=float) + 0.5)
    return Cube(center, side, half_open=True)
