"""Discrete measures, cube geometry, generators, and measure file I/O.

A measure is a finite set of distinct atoms in R^d with strictly positive
weights; d = 2 is the planar case with coordinates read as (Re z, Im z).
This one type feeds every downstream computation. Generators produce the
standard test geometries: midpoint-sampled segments, equally spaced
circles, grid-sampled discs, and corner Cantor sets with per-generation
scaling factors.

File formats:
  * CSV: one row per atom, ``x1,...,xd,weight``, optional header.
  * JSON: ``{"dim": d, "points": [[...], ...], "weights": [...]}``.
Both serialize floats with 17 significant digits, so a save/load round
trip reproduces every coordinate and weight bit-exactly.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicatePoint,
    InvalidParameter,
    InvalidRange,
    InvalidSpec,
    NonpositiveWeight,
    ParseError,
    ValidationError,
)

__all__ = [
    "Cube",
    "CantorSpec",
    "DiscreteMeasure",
    "new_measure",
    "restrict",
    "generate_cantor",
    "cantor_squares",
    "generate_segment",
    "generate_circle",
    "generate_disc",
    "save_measure",
    "load_measure",
]

_FLOAT_FMT = ".17g"


def _fmt(x: float) -> str:
    return format(float(x), _FLOAT_FMT)


def _as_point(p, name: str = "point") -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionMismatch(f"{name} must be a 1-d coordinate vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite coordinates: {arr}")
    return arr


class Cube:
    """Axis-aligned cube with center, side length, and membership convention.

    ``half_open`` cubes contain coordinates in [c - l/2, c + l/2) per axis,
    so a dyadic subdivision counts every atom exactly once. Closed cubes
    use [c - l/2, c + l/2] and suit symmetric windows around a point.
    """

    __slots__ = ("center", "side", "half_open")

    def __init__(self, center, side: float, half_open: bool = True):
        center = _as_point(center, "cube center")
        side = float(side)
        if not (side > 0 and math.isfinite(side)):
            raise InvalidParameter(f"cube side must be positive and finite, got {side}")
        center.setflags(write=False)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "side", side)
        object.__setattr__(self, "half_open", bool(half_open))

    def __setattr__(self, name, value):
        raise AttributeError("Cube is immutable")

    @property
    def dim(self) -> int:
        return self.center.size

    def lower(self) -> np.ndarray:
        return self.center - self.side / 2.0

    def upper(self) -> np.ndarray:
        return self.center + self.side / 2.0

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean membership mask for an (N, d) array of coordinates."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        if pts.shape[1] != self.dim:
            raise DimensionMismatch(
                f"points have dimension {pts.shape[1]}, cube has dimension {self.dim}"
            )
        lo, hi = self.lower(), self.upper()
        if self.half_open:
            return np.all((pts >= lo) & (pts < hi), axis=1)
        return np.all((pts >= lo) & (pts <= hi), axis=1)

    def distance(self, other: "Cube") -> float:
        """Euclidean distance between the two cubes as point sets."""
        if other.dim != self.dim:
            raise DimensionMismatch("cubes of different dimension")
        gap = np.abs(self.center - other.center) - (self.side + other.side) / 2.0
        return float(np.linalg.norm(np.maximum(gap, 0.0)))

    def __repr__(self) -> str:
        kind = "half-open" if self.half_open else "closed"
        return f"Cube(center={tuple(self.center)}, side={self.side}, {kind})"


@dataclass(frozen=True)
class CantorSpec:
    """Scaling sequence and depth for the four-corner Cantor construction.

    Each scaling factor must lie in (0, 1/2]; at 1/2 the generation squares
    tile their parent exactly, below 1/2 they leave gaps. ``depth`` may not
    exceed the number of supplied factors.
    """

    lambdas: tuple
    depth: int

    def __post_init__(self):
        lambdas = tuple(float(v) for v in self.lambdas)
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "depth", int(self.depth))
        if self.depth < 0:
            raise InvalidSpec(f"depth must be >= 0, got {self.depth}")
        if self.depth > len(lambdas):
            raise InvalidSpec(
                f"depth {self.depth} exceeds the {len(lambdas)} supplied scaling factors"
            )
        for i, v in enumerate(lambdas):
            if not (0.0 < v <= 0.5):
                raise InvalidSpec(f"scaling factor {i + 1} must be in (0, 1/2], got {v}")

    def side_at(self, generation: int) -> float:
        """Side length of a generation-k square (product of the first k factors)."""
        side = 1.0
        for v in self.lambdas[:generation]:
            side *= v
        return side


class DiscreteMeasure:
    """Finite weighted point set: distinct atoms plus positive weights.

    Instances are immutable; arrays are stored read-only so they can be
    shared across threads without copies.
    """

    __slots__ = ("points", "weights", "total_mass")

    def __init__(self, points: np.ndarray, weights: np.ndarray, _validated: bool = False):
        points = np.array(points, dtype=float, copy=True)
        weights = np.array(weights, dtype=float, copy=True)
        if not _validated:
            _validate_atoms(points, weights)
        points.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "total_mass", float(weights.sum()))

    def __setattr__(self, name, value):
        raise AttributeError("DiscreteMeasure is immutable")

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def as_complex(self) -> np.ndarray:
        """Atoms as complex numbers (planar measures only)."""
        if self.dim != 2:
            raise DimensionMismatch(f"complex view requires d = 2, measure has d = {self.dim}")
        return self.points[:, 0] + 1j * self.points[:, 1]

    def bounding_cube(self, half_open: bool = False, pad: float = 0.0) -> Cube:
        """Smallest axis-aligned cube (equal sides) covering all atoms."""
        if len(self) == 0:
            raise ValidationError("empty measure has no bounding cube")
        lo = self.points.min(axis=0)
        hi = self.points.max(axis=0)
        side = float((hi - lo).max()) + pad
        if side <= 0:
            raise InvalidParameter("bounding cube is degenerate (single atom)")
        return Cube((lo + hi) / 2.0, side, half_open=half_open)

    def __repr__(self) -> str:
        return f"DiscreteMeasure(atoms={len(self)}, dim={self.dim}, mass={self.total_mass})"


def _validate_atoms(points: np.ndarray, weights: np.ndarray) -> None:
    if points.dtype == object or points.ndim != 2:
        raise DimensionMismatch("points must form an (N, d) array of equal-length coordinates")
    if weights.ndim != 1 or weights.shape[0] != points.shape[0]:
        raise ValidationError(
            f"{points.shape[0]} points but {weights.shape[0] if weights.ndim == 1 else '?'} weights"
        )
    if points.shape[0] > 0 and points.shape[1] == 0:
        raise DimensionMismatch("points must have dimension d >= 1")
    if not np.all(np.isfinite(points)):
        raise ValidationError("points contain non-finite coordinates")
    if not np.all(np.isfinite(weights)):
        raise ValidationError("weights contain non-finite values")
    if np.any(weights <= 0):
        bad = int(np.argmax(weights <= 0))
        raise NonpositiveWeight(f"weight {bad} is {weights[bad]}, must be > 0")
    if points.shape[0] > 1:
        uniq = np.unique(points, axis=0)
        if uniq.shape[0] != points.shape[0]:
            raise DuplicatePoint("two atoms coincide exactly")


def new_measure(points, weights) -> DiscreteMeasure:
    """Validate atoms and weights and return the measure.

    Raises DimensionMismatch for ragged coordinates, DuplicatePoint for
    exactly coincident atoms, NonpositiveWeight for weights <= 0.
    """
    try:
        pts = np.asarray(points, dtype=float)
    except (ValueError, TypeError) as exc:
        raise DimensionMismatch(f"points are not a rectangular coordinate array: {exc}") from None
    if pts.ndim == 1 and pts.size == 0:
        pts = pts.reshape(0, 1)
    return DiscreteMeasure(pts, np.asarray(weights, dtype=float))


def restrict(mu: DiscreteMeasure, cube: Cube) -> DiscreteMeasure:
    """Sub-measure of the atoms inside the cube (membership per its convention).

    The result may be empty; restriction never rescales weights.
    """
    if cube.dim != mu.dim:
        raise DimensionMismatch(
            f"measure has dimension {mu.dim}, cube has dimension {cube.dim}"
        )
    if len(mu) == 0:
        return mu
    keep = cube.contains(mu.points)
    return DiscreteMeasure(mu.points[keep], mu.weights[keep], _validated=True)


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def _cantor_corners(spec: CantorSpec, generation: int):
    """Lower-left corners and side of the generation-k squares.

    Children are anchored at the four parent corners (each child contains a
    distinct parent vertex) and enumerated by quadrant: lower-left,
    lower-right, upper-left, upper-right. Recursion order is depth-first
    over this fixed ordering, which makes output bit-reproducible.
    """
    corners = np.zeros((1, 2))
    side = 1.0
    for k in range(generation):
        new_side = side * spec.lambdas[k]
        off = side - new_side
        shifts = np.array([[0.0, 0.0], [off, 0.0], [0.0, off], [off, off]])
        corners = (corners[:, None, :] + shifts[None, :, :]).reshape(-1, 2)
        side = new_side
    return corners, side


def generate_cantor(spec: CantorSpec) -> DiscreteMeasure:
    """Depth-n Cantor approximation: one atom per generation-n square.

    Atoms sit at square centers with weight 4^(-n), so the total mass is
    exactly 1. The square list itself is available via cantor_squares.
    """
    n = spec.depth
    if n > 12:
        raise InvalidSpec(f"depth {n} would generate 4^{n} atoms; the supported maximum is 12")
    corners, side = _cantor_corners(spec, n)
    points = corners + side / 2.0
    weights = np.full(len(points), 4.0 ** (-n))
    return DiscreteMeasure(points, weights, _validated=True)


def cantor_squares(spec: CantorSpec, generation: int) -> list:
    """Generation-k squares of the construction as half-open cubes."""
    if not (0 <= generation <= spec.depth):
        raise InvalidSpec(f"generation must be in [0, {spec.depth}], got {generation}")
    corners, side = _cantor_corners(spec, generation)
    return [Cube(c + side / 2.0, side, half_open=True) for c in corners]


def generate_segment(a: float, b: float, n_atoms: int) -> DiscreteMeasure:
    """Midpoint discretization of arclength measure on [a, b] x {0}."""
    a, b = float(a), float(b)
    n_atoms = int(n_atoms)
    if not a < b:
        raise InvalidRange(f"segment requires a < b, got [{a}, {b}]")
    if n_atoms < 1:
        raise InvalidRange(f"need at least one atom, got {n_atoms}")
    h = (b - a) / n_atoms
    x = a + h / 2.0 + h * np.arange(n_atoms)
    points = np.column_stack([x, np.zeros(n_atoms)])
    return DiscreteMeasure(points, np.full(n_atoms, h), _validated=True)


def generate_circle(radius: float, n_atoms: int) -> DiscreteMeasure:
    """Equally spaced arclength quadrature of the circle of given radius."""
    radius = float(radius)
    n_atoms = int(n_atoms)
    if radius <= 0:
        raise InvalidParameter(f"radius must be positive, got {radius}")
    if n_atoms < 3:
        raise InvalidParameter(f"circle needs at least 3 atoms, got {n_atoms}")
    angles = 2.0 * np.pi * np.arange(n_atoms) / n_atoms
    points = radius * np.column_stack([np.cos(angles), np.sin(angles)])
    weights = np.full(n_atoms, 2.0 * np.pi * radius / n_atoms)
    return DiscreteMeasure(points, weights, _validated=True)


def generate_disc(radius: float, grid: int) -> DiscreteMeasure:
    """Cell-center area quadrature of the open disc on an M x M grid of [-r, r]^2."""
    radius = float(radius)
    grid = int(grid)
    if radius <= 0:
        raise InvalidParameter(f"radius must be positive, got {radius}")
    if grid < 1:
        raise InvalidParameter(f"grid must be >= 1, got {grid}")
    h = 2.0 * radius / grid
    centers = -radius + h / 2.0 + h * np.arange(grid)
    xx, yy = np.meshgrid(centers, centers, indexing="ij")
    points = np.column_stack([xx.ravel(), yy.ravel()])
    keep = (points ** 2).sum(axis=1) < radius * radius
    points = points[keep]
    if len(points) == 0:
        raise InvalidParameter("no grid cell center falls inside the disc; increase grid")
    return DiscreteMeasure(points, np.full(len(points), h * h), _validated=True)


# ---------------------------------------------------------------------------
# file I/O
# ---------------------------------------------------------------------------

def save_measure(mu: DiscreteMeasure, path) -> None:
    """Write CSV or JSON depending on the file extension."""
    path = Path(path)
    ext = path.suffix.lower()
    if ext == ".csv":
        text = _to_csv(mu)
    elif ext == ".json":
        text = _to_json(mu)
    else:
        raise ParseError(f"unsupported measure format {ext!r} (use .csv or .json)")
    path.write_text(text, encoding="utf-8")


def load_measure(path) -> DiscreteMeasure:
    """Read a measure file written by save_measure (or hand-authored)."""
    path = Path(path)
    ext = path.suffix.lower()
    text = path.read_text(encoding="utf-8")
    if ext == ".csv":
        return _from_csv(text)
    if ext == ".json":
        return _from_json(text)
    raise ParseError(f"unsupported measure format {ext!r} (use .csv or .json)")


def measure_to_text(mu: DiscreteMeasure, fmt: str) -> str:
    """Serialize to 'csv' or 'json' text without touching the filesystem."""
    if fmt == "csv":
        return _to_csv(mu)
    if fmt == "json":
        return _to_json(mu)
    raise ParseError(f"unsupported measure format {fmt!r}")


def _to_csv(mu: DiscreteMeasure) -> str:
    header = ",".join([f"x{i + 1}" for i in range(mu.dim)] + ["weight"])
    lines = [header]
    for p, w in zip(mu.points, mu.weights):
        lines.append(",".join([_fmt(c) for c in p] + [_fmt(w)]))
    return "\n".join(lines) + "\n"


def _from_csv(text: str) -> DiscreteMeasure:
    rows = [row for row in csv.reader(text.splitlines()) if row and any(c.strip() for c in row)]
    if rows and not _is_numeric_row(rows[0]):
        rows = rows[1:]
    if not rows:
        raise ParseError("CSV measure file holds no data rows")
    width = len(rows[0])
    if width < 2:
        raise ParseError("CSV rows need at least one coordinate and a weight")
    points, weights = [], []
    for lineno, row in enumerate(rows, start=1):
        if len(row) != width:
            raise ParseError(
                f"row {lineno} has {len(row)} fields, expected {width} (mixed dimensions)"
            )
        try:
            vals = [float(c) for c in row]
        except ValueError as exc:
            raise ParseError(f"row {lineno} is malformed: {exc}") from None
        points.append(vals[:-1])
        weights.append(vals[-1])
    return new_measure(points, weights)


def _is_numeric_row(row) -> bool:
    try:
        for c in row:
            float(c)
    except ValueError:
        return False
    return True


def _to_json(mu: DiscreteMeasure) -> str:
    point_rows = ",\n    ".join(
        "[" + ", ".join(_fmt(c) for c in p) + "]" for p in mu.points
    )
    weight_row = ", ".join(_fmt(w) for w in mu.weights)
    return (
        "{\n"
        f'  "dim": {mu.dim},\n'
        f'  "points": [\n    {point_rows}\n  ],\n'
        f'  "weights": [{weight_row}]\n'
        "}\n"
    )


def _from_json(text: str) -> DiscreteMeasure:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ParseError("JSON measure must be an object")
    for key in ("dim", "points", "weights"):
        if key not in obj:
            raise ParseError(f"JSON measure is missing the {key!r} field")
    dim, points, weights = obj["dim"], obj["points"], obj["weights"]
    if not isinstance(dim, int) or dim < 1:
        raise ParseError(f"'dim' must be a positive integer, got {dim!r}")
    if not isinstance(points, list) or not isinstance(weights, list):
        raise ParseError("'points' and 'weights' must be arrays")
    if len(points) != len(weights):
        raise ParseError(f"{len(points)} points but {len(weights)} weights")
    for i, p in enumerate(points):
        if not isinstance(p, list) or len(p) != dim:
            raise ParseError(f"point {i} does not have dimension {dim}")
    try:
        pts = np.asarray(points, dtype=float).reshape(len(points), dim)
        ws = np.asarray(weights, dtype=float)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"non-numeric entry in measure file: {exc}") from None
    return DiscreteMeasure(pts, ws)
