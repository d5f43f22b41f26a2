"""Compactness verdicts, the Tolsa-Verdera identity check, Cantor series.

The verdict composes three decay diagnostics: the linear-density profile,
the per-cube curvature ratio scan, and the truncation-gap ladder. Each
condition compares its finest-scale value against the coarsest one; a
trend is "decayed" when the ratio drops below the configured threshold.
Any condition that fails to decay flags the measure as not compact; all
three decaying is consistent with compactness. Desk-scale discretizations
cannot take true limits, so the report records every number and threshold
it used.

For generalized Cantor measures the per-generation density parameters are
exposed in two conventions (see ``cantor_theta_series``), and the total
curvature per unit mass can be compared against their partial square sums.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .curvature import curvature_ratio_scan, menger_c2
from .density import DensityProfile, density_profile
from .errors import EmptyCube, InvalidParameter, InvalidScales
from .measure import CantorSpec, Cube, DiscreteMeasure, generate_cantor, restrict
from .operator import CAUCHY, indicator_image_norm, truncation_gap

__all__ = [
    "VerdictThresholds",
    "ConditionTrend",
    "DiagnosticsReport",
    "compactness_verdict",
    "TvIdentityResult",
    "MissingDensityWarning",
    "tv_identity_residual",
    "cantor_theta_series",
    "CantorCurvatureCheck",
    "cantor_curvature_check",
    "report_to_json",
    "report_to_csv",
]

_FMT = ".17g"


def _f(x: float) -> str:
    return format(float(x), _FMT)


@dataclass(frozen=True)
class VerdictThresholds:
    """Decay thresholds: finest-scale value must drop below threshold x coarsest."""

    density: float = 0.2
    curvature: float = 0.2
    gap: float = 0.2

    def __post_init__(self):
        for name in ("density", "curvature", "gap"):
            if not getattr(self, name) > 0:
                raise InvalidParameter(f"{name} threshold must be positive")


@dataclass(frozen=True)
class ConditionTrend:
    """Decay evidence for one condition across the probed scales.

    ``status`` is "decayed" when fine <= threshold * coarse (an all-zero
    sequence counts as decayed), "exceeded" when it is not, and
    "indeterminate" when fewer than two values are available.
    """

    name: str
    values: Tuple[float, ...]
    threshold: float
    status: str
    trend_ratio: Optional[float]

    @classmethod
    def evaluate(cls, name: str, values: Sequence[float], threshold: float) -> "ConditionTrend":
        values = tuple(float(v) for v in values)
        if len(values) < 2:
            return cls(name, values, threshold, "indeterminate", None)
        coarse, fine = values[0], values[-1]
        if coarse == 0.0:
            if fine == 0.0:
                return cls(name, values, threshold, "decayed", 0.0)
            return cls(name, values, threshold, "exceeded", None)
        ratio = fine / coarse
        status = "decayed" if ratio <= threshold else "exceeded"
        return cls(name, values, threshold, status, ratio)


@dataclass(frozen=True)
class DiagnosticsReport:
    """Everything the verdict looked at, plus the verdict itself."""

    density: DensityProfile
    curvature_ratios: Tuple[Tuple[float, float], ...]
    truncation_gaps: Tuple[Tuple[float, float, float], ...]
    conditions: Tuple[ConditionTrend, ...]
    verdict: str
    theta_series: Optional[Tuple[Tuple[int, float, float], ...]] = None
    unconverged: bool = False

    def condition(self, name: str) -> ConditionTrend:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)


def _verdict(conditions: Sequence[ConditionTrend]) -> str:
    statuses = [c.status for c in conditions]
    if any(s == "exceeded" for s in statuses):
        return "not_compact"
    if statuses and all(s == "decayed" for s in statuses):
        return "compact_consistent"
    return "inconclusive"


def compactness_verdict(
    mu: DiscreteMeasure,
    scales: Sequence[float],
    eps_ladder: Sequence[float],
    thresholds: Optional[VerdictThresholds] = None,
    threads: Optional[int] = None,
    budget: Optional[float] = None,
    norm_tol: float = 1e-8,
    norm_max_iter: int = 5000,
) -> DiagnosticsReport:
    """Run the three decay diagnostics and compose their verdict.

    ``scales`` drives the density profile and the curvature scan;
    ``eps_ladder`` (strictly decreasing) is consumed as consecutive
    truncation pairs. Every computed number lands in the report.
    """
    thresholds = thresholds or VerdictThresholds()
    eps_ladder = [float(e) for e in eps_ladder]
    if any(e < 0 for e in eps_ladder):
        raise InvalidScales("epsilon ladder must be nonnegative")
    if any(a <= b for a, b in zip(eps_ladder, eps_ladder[1:])):
        raise InvalidScales(f"epsilon ladder must be strictly decreasing, got {eps_ladder}")

    profile = density_profile(mu, scales, n=1)
    ratios = tuple(curvature_ratio_scan(mu, scales, threads=threads, budget=budget))
    gaps = []
    unconverged = False
    for eps2, eps1 in zip(eps_ladder, eps_ladder[1:]):
        est = truncation_gap(mu, CAUCHY, eps1, eps2, tol=norm_tol, max_iter=norm_max_iter)
        unconverged = unconverged or not est.converged
        gaps.append((eps1, eps2, est.value))

    conditions = (
        ConditionTrend.evaluate("density", profile.values(), thresholds.density),
        ConditionTrend.evaluate("curvature", [r for _, r in ratios], thresholds.curvature),
        ConditionTrend.evaluate("gap", [g for _, _, g in gaps], thresholds.gap),
    )
    return DiagnosticsReport(
        density=profile,
        curvature_ratios=ratios,
        truncation_gaps=tuple(gaps),
        conditions=conditions,
        verdict=_verdict(conditions),
        unconverged=unconverged,
    )


class MissingDensityWarning(UserWarning):
    """Raised when the identity check runs without a pointwise density."""


class TvIdentityResult(NamedTuple):
    lhs: float
    rhs: float
    residual: float


def tv_identity_residual(
    mu: DiscreteMeasure,
    cube: Cube,
    pointwise_density: Optional[Callable] = None,
    threads: Optional[int] = None,
    budget: Optional[float] = None,
) -> TvIdentityResult:
    """Check the exact identity for the squared norm of the cube indicator image.

    lhs is the squared L2(mu restricted to Q) norm of the Cauchy image of
    the indicator of Q; rhs is (pi^2/3) times the integral of the squared
    pointwise density over Q plus one sixth of the restricted curvature.
    Atomic approximations have no intrinsic pointwise density, so the
    caller supplies the density of the continuum measure being modeled
    (e.g. the constant 1 for arclength); omitting it zeroes that term and
    warns.
    """
    sub = restrict(mu, cube)
    if len(sub) == 0:
        raise EmptyCube("cube holds no atoms")
    lhs = indicator_image_norm(mu, cube, CAUCHY) ** 2
    if pointwise_density is None:
        warnings.warn(
            "no pointwise density supplied; the density term of the identity is taken as 0",
            MissingDensityWarning,
            stacklevel=2,
        )
        density_term = 0.0
    else:
        theta_vals = np.asarray([float(pointwise_density(p)) for p in sub.points])
        density_term = float((theta_vals ** 2 * sub.weights).sum())
    curv = menger_c2(sub, threads=threads, budget=budget).total
    rhs = (np.pi ** 2 / 3.0) * density_term + curv / 6.0
    scale = max(lhs, rhs)
    residual = abs(lhs - rhs) / scale if scale > 0 else 0.0
    return TvIdentityResult(lhs, rhs, residual)


def cantor_theta_series(spec: CantorSpec, convention: str = "density") -> list:
    """Per-generation density parameters and partial sums of their squares.

    convention "density": theta_k = 4^-k / sigma_k, the linear density of a
    generation-k square. Convention "factor": theta_k = 2^-k / sigma_k.
    Both are evaluated in exact rational arithmetic before conversion to
    float. Returns [(k, theta_k, sum of theta_j^2 for j <= k)].
    """
    if convention not in ("density", "factor"):
        raise InvalidParameter(f"convention must be 'density' or 'factor', got {convention!r}")
    base = Fraction(1, 4) if convention == "density" else Fraction(1, 2)
    sigma = Fraction(1)
    numer = Fraction(1)
    out = []
    partial = Fraction(0)
    for k in range(spec.depth + 1):
        if k > 0:
            sigma *= Fraction(spec.lambdas[k - 1])
            numer *= base
        theta_k = numer / sigma
        partial += theta_k * theta_k
        out.append((k, float(theta_k), float(partial)))
    return out


class CantorCurvatureCheck(NamedTuple):
    c2_per_mass: float
    theta_partial_sum: float
    ratio: float


def cantor_curvature_check(
    spec: CantorSpec,
    depth: int,
    convention: str = "density",
    threads: Optional[int] = None,
    budget: Optional[float] = 1e10,
) -> CantorCurvatureCheck:
    """Compare total curvature per unit mass against the theta square sums.

    The ratio of the two is the empirical proportionality constant of the
    comparison; it is 0 at depth 0 where a single atom has no triples.
    """
    depth = int(depth)
    if not (0 <= depth <= spec.depth):
        raise InvalidParameter(f"depth must be in [0, {spec.depth}], got {depth}")
    sub_spec = CantorSpec(spec.lambdas, depth)
    mu = generate_cantor(sub_spec)
    result = menger_c2(mu, threads=threads, budget=budget)
    c2_per_mass = result.total / mu.total_mass
    partial = cantor_theta_series(sub_spec, convention)[-1][2]
    ratio = c2_per_mass / partial if partial > 0 else 0.0
    return CantorCurvatureCheck(c2_per_mass, partial, ratio)


# ---------------------------------------------------------------------------
# report serialization (all floats as 17-significant-digit decimal strings)
# ---------------------------------------------------------------------------

def report_to_dict(report: DiagnosticsReport) -> dict:
    doc = {
        "density_profile": {
            "exponent": report.density.exponent,
            "entries": [[_f(s), _f(v)] for s, v in report.density.entries],
        },
        "curvature_ratios": [[_f(s), _f(r)] for s, r in report.curvature_ratios],
        "truncation_gaps": [
            [_f(e1), _f(e2), _f(g)] for e1, e2, g in report.truncation_gaps
        ],
        "conditions": [
            {
                "name": c.name,
                "values": [_f(v) for v in c.values],
                "threshold": _f(c.threshold),
                "trend_ratio": None if c.trend_ratio is None else _f(c.trend_ratio),
                "status": c.status,
            }
            for c in report.conditions
        ],
        "verdict": report.verdict,
        "unconverged": report.unconverged,
    }
    if report.theta_series is not None:
        doc["theta_series"] = [[k, _f(t), _f(p)] for k, t, p in report.theta_series]
    return doc


def report_to_json(report: DiagnosticsReport) -> str:
    return json.dumps(report_to_dict(report), indent=2) + "\n"


def report_to_csv(report: DiagnosticsReport) -> str:
    """Flat summary: one record kind per row group."""
    rows = ["kind,key1,key2,value"]
    for s, v in report.density.entries:
        rows.append(f"density,{_f(s)},,{_f(v)}")
    for s, r in report.curvature_ratios:
        rows.append(f"curvature,{_f(s)},,{_f(r)}")
    for e1, e2, g in report.truncation_gaps:
        rows.append(f"gap,{_f(e1)},{_f(e2)},{_f(g)}")
    for c in report.conditions:
        rows.append(f"condition,{c.name},threshold,{_f(c.threshold)}")
        ratio = "" if c.trend_ratio is None else _f(c.trend_ratio)
        rows.append(f"condition,{c.name},trend_ratio,{ratio}")
        rows.append(f"condition,{c.name},status,{c.status}")
    if report.theta_series is not None:
        for k, t, p in report.theta_series:
            rows.append(f"theta,{k},,{_f(t)}")
            rows.append(f"theta_partial,{k},,{_f(p)}")
    rows.append(f"verdict,,,{report.verdict}")
    return "\n".join(rows) + "\n"
