"""Truncated kernel operators on L2(mu): matrices, norms, shells, pairings.

Kernels: the planar Cauchy kernel 1/(z - w), its imaginary part
Im(z - w)/|z - w|^2, and the vector Riesz kernel (z - w)/|z - w|^(n + 1)
in d dimensions. A truncated operator keeps interactions strictly farther
apart than epsilon; the diagonal is always excluded, which is the discrete
principal value for atom-free continuum measures.

The L2(mu) operator norm is the top singular value of the symmetrized
matrix sqrt(w_i) K_ij sqrt(w_j), estimated by power iteration with a fixed
all-ones seed so runs are reproducible. Shell operators restrict each row
to a dyadic annulus around its evaluation point; their partial sums
converge to the untruncated matrix once the shells outrun the minimum
atom gap, exactly and bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import (
    CoincidentPoints,
    DimensionMismatch,
    EmptyCube,
    EmptyMeasure,
    InvalidLevel,
    InvalidParameter,
    InvalidRange,
    KernelDimensionMismatch,
    LengthMismatch,
    OverlappingCubes,
    ValidationError,
)
from .measure import Cube, DiscreteMeasure, restrict

__all__ = [
    "KernelId",
    "CAUCHY",
    "IM_CAUCHY",
    "riesz",
    "kernel_eval",
    "OperatorMatrix",
    "build_truncated",
    "apply_operator",
    "NormEstimate",
    "operator_norm",
    "truncation_gap",
    "shell_operator",
    "partial_sum_operator",
    "indicator_image_norm",
    "pair_correlation",
    "t1_quantities",
]


@dataclass(frozen=True)
class KernelId:
    """Identifies one of the supported singular kernels."""

    tag: str
    n: Optional[int] = None
    d: int = 2

    def __post_init__(self):
        if self.tag in ("cauchy", "im_cauchy"):
            if self.d != 2:
                raise KernelDimensionMismatch(f"{self.tag} kernel requires d = 2")
            if self.n is not None:
                raise InvalidParameter(f"{self.tag} kernel takes no order parameter")
        elif self.tag == "riesz":
            if self.n is None or not (1 <= self.n <= self.d):
                raise KernelDimensionMismatch(
                    f"riesz kernel requires 1 <= n <= d, got n={self.n}, d={self.d}"
                )
        else:
            raise InvalidParameter(f"unknown kernel tag {self.tag!r}")


CAUCHY = KernelId("cauchy")
IM_CAUCHY = KernelId("im_cauchy")


def riesz(n: int, d: int) -> KernelId:
    """Vector Riesz kernel of order n in R^d."""
    return KernelId("riesz", n=int(n), d=int(d))


def kernel_eval(kernel: KernelId, z, w):
    """Kernel value at a single pair of points.

    Returns a complex scalar for the Cauchy kernel, a float for its
    imaginary part, and a length-d vector for the Riesz kernel.
    """
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    if z.shape != (kernel.d,) or w.shape != (kernel.d,):
        raise KernelDimensionMismatch(
            f"kernel expects points of dimension {kernel.d}, got {z.shape} and {w.shape}"
        )
    diff = z - w
    dist2 = float((diff * diff).sum())
    if dist2 == 0.0:
        raise CoincidentPoints("kernel undefined at z = w")
    if kernel.tag == "cauchy":
        return 1.0 / complex(diff[0], diff[1])
    if kernel.tag == "im_cauchy":
        return float(diff[1] / dist2)
    return diff / dist2 ** ((kernel.n + 1) / 2.0)


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense truncated kernel matrix plus the weights of its measure.

    ``entries[i, j]`` is K(x_i, x_j) masked to zero on the diagonal and
    wherever |x_i - x_j| <= epsilon. Shape (N, N) for scalar kernels,
    (N, N, d) for the Riesz kernel. The weights stay attached because the
    operator acts on L2(mu): (Tf)_i = sum_j entries[i, j] f_j w_j.
    """

    kernel: KernelId
    epsilon: float
    entries: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def apply(self, f) -> np.ndarray:
        return apply_operator(self, f)


def _check_kernel_measure(kernel: KernelId, mu: DiscreteMeasure) -> None:
    if mu.dim != kernel.d:
        raise KernelDimensionMismatch(
            f"kernel dimension {kernel.d} vs measure dimension {mu.dim}"
        )


def _pair_diffs(points: np.ndarray):
    diff = points[:, None, :] - points[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    return diff, dist


def _kernel_matrix(kernel: KernelId, points: np.ndarray, keep: np.ndarray) -> np.ndarray:
    """Masked kernel table; sign symmetry of the arithmetic makes it
    exactly antisymmetric without mirroring."""
    diff, dist = _pair_diffs(points)
    if kernel.tag == "cauchy":
        dz = diff[:, :, 0] + 1j * diff[:, :, 1]
        out = np.zeros_like(dz)
        np.divide(1.0, dz, out=out, where=keep)
        return out
    if kernel.tag == "im_cauchy":
        d2 = dist * dist
        out = np.zeros_like(d2)
        np.divide(diff[:, :, 1], d2, out=out, where=keep)
        return out
    denom = dist ** (kernel.n + 1)
    out = np.zeros_like(diff)
    np.divide(diff, denom[:, :, None], out=out, where=keep[:, :, None])
    return out


def build_truncated(mu: DiscreteMeasure, kernel: KernelId, eps: float) -> OperatorMatrix:
    """Kernel matrix keeping interactions with |x_i - x_j| > eps, diagonal off."""
    _check_kernel_measure(kernel, mu)
    if len(mu) == 0:
        raise EmptyMeasure("cannot build an operator on an empty measure")
    eps = float(eps)
    if eps < 0:
        raise InvalidParameter(f"truncation radius must be >= 0, got {eps}")
    _, dist = _pair_diffs(mu.points)
    keep = dist > eps
    np.fill_diagonal(keep, False)
    entries = _kernel_matrix(kernel, mu.points, keep)
    return OperatorMatrix(kernel, eps, entries, mu.weights)


def apply_operator(T: OperatorMatrix, f) -> np.ndarray:
    """Weighted action (Tf)_i = sum_j entries[i, j] f_j w_j."""
    f = np.asarray(f)
    if f.shape != (T.size,):
        raise LengthMismatch(f"operator of size {T.size} applied to vector of shape {f.shape}")
    fw = f * T.weights
    if T.entries.ndim == 3:
        return np.einsum("ijc,j->ic", T.entries, fw)
    return T.entries @ fw


@dataclass(frozen=True)
class NormEstimate:
    """Operator norm estimate from power iteration, with convergence flag."""

    value: float
    converged: bool
    iterations: int

    def __float__(self) -> float:
        return self.value


def _symmetrized(T: OperatorMatrix) -> np.ndarray:
    s = np.sqrt(T.weights)
    if T.entries.ndim == 3:
        blocks = [s[:, None] * T.entries[:, :, c] * s[None, :] for c in range(T.entries.shape[2])]
        return np.vstack(blocks)
    return s[:, None] * T.entries * s[None, :]


def operator_norm(T: OperatorMatrix, tol: float = 1e-12, max_iter: int = 20000) -> NormEstimate:
    """L2(mu) -> L2(mu) operator norm via power iteration on B* B.

    B is the weight-symmetrized matrix (for the Riesz kernel, its d
    components stacked as a block column). The seed is the normalized
    all-ones vector; iteration stops when successive Rayleigh estimates of
    the top squared singular value agree to ``tol`` relatively. On hitting
    ``max_iter`` the best estimate is returned flagged unconverged.
    """
    if not tol > 0:
        raise InvalidParameter(f"tolerance must be positive, got {tol}")
    B = _symmetrized(T)
    return _top_singular_value(B, tol, max_iter)


_SPARSE_CUTOFF = 0.25  # nonzero density below which the iteration goes sparse
_SPARSE_MIN_SIZE = 512


def _top_singular_value(B: np.ndarray, tol: float, max_iter: int) -> NormEstimate:
    n = B.shape[1]
    if B.shape[0] >= _SPARSE_MIN_SIZE and np.count_nonzero(B) < _SPARSE_CUTOFF * B.size:
        # band truncations are mostly zeros; CSR matvecs cut the cost by the density
        from scipy.sparse import csr_matrix

        B = csr_matrix(B)
        BH = B.conj().T.tocsr()
    else:
        BH = np.ascontiguousarray(B.conj().T)
    v = np.ones(n, dtype=B.dtype) / math.sqrt(n)
    lam_prev = None
    lam = 0.0
    for it in range(1, max_iter + 1):
        u = B @ v
        lam = float(np.vdot(u, u).real)
        if lam == 0.0:
            return NormEstimate(0.0, True, it)
        if lam_prev is not None and abs(lam - lam_prev) <= tol * lam:
            return NormEstimate(math.sqrt(lam), True, it)
        lam_prev = lam
        bv = BH @ u
        v = bv / np.linalg.norm(bv)
    return NormEstimate(math.sqrt(lam), False, max_iter)


def truncation_gap(
    mu: DiscreteMeasure,
    kernel: KernelId,
    eps1: float,
    eps2: float,
    tol: float = 1e-12,
    max_iter: int = 20000,
) -> NormEstimate:
    """Norm of the difference between the eps1 and eps2 truncations.

    The difference matrix holds exactly the interactions with
    eps1 < |x_i - x_j| <= eps2; its norm witnesses whether the truncations
    form a Cauchy sequence in operator norm.
    """
    eps1, eps2 = float(eps1), float(eps2)
    if eps1 < 0 or eps1 > eps2:
        raise InvalidRange(f"need 0 <= eps1 <= eps2, got ({eps1}, {eps2})")
    if eps1 == eps2:
        return NormEstimate(0.0, True, 0)
    near = build_truncated(mu, kernel, eps1)
    far = build_truncated(mu, kernel, eps2)
    band = OperatorMatrix(kernel, eps1, near.entries - far.entries, mu.weights)
    return operator_norm(band, tol=tol, max_iter=max_iter)


def _require_support(mu: DiscreteMeasure, base: Cube) -> None:
    if base.dim != mu.dim:
        raise DimensionMismatch("base square and measure dimensions differ")
    if len(mu) == 0:
        raise EmptyMeasure("shell operators need a nonempty measure")
    if not bool(np.all(base.contains(mu.points))):
        raise ValidationError("base square does not contain the support of the measure")


def shell_operator(mu: DiscreteMeasure, base: Cube, level: int) -> OperatorMatrix:
    """Cauchy matrix restricted, per row, to the dyadic annulus of one level.

    Row i keeps column j when x_j lies in the half-open square centered at
    x_i of side 2^-level * side(base) but outside the next, twice smaller
    one. Masks move with the row, so the matrix is not symmetric; the
    levels partition all off-diagonal pairs that fall inside the level-0
    square of their row. For the partition to be exhaustive the base side
    must be at least twice the support extent.
    """
    level = int(level)
    if level < 0:
        raise InvalidLevel(f"shell level must be >= 0, got {level}")
    _require_support(mu, base)
    inner = _centered_mask(mu.points, base.side * 2.0 ** (-(level + 1)))
    outer = _centered_mask(mu.points, base.side * 2.0 ** (-level))
    keep = outer & ~inner
    np.fill_diagonal(keep, False)
    entries = _kernel_matrix(CAUCHY, mu.points, keep)
    return OperatorMatrix(CAUCHY, 0.0, entries, mu.weights)


def _centered_mask(points: np.ndarray, side: float) -> np.ndarray:
    """mask[i, j]: is x_j in the half-open square of given side centered at x_i."""
    diff = points[None, :, :] - points[:, None, :]
    half = side / 2.0
    return np.all((diff >= -half) & (diff < half), axis=2)


def partial_sum_operator(mu: DiscreteMeasure, base: Cube, levels: int) -> OperatorMatrix:
    """Sum of the shell operators for levels 0 .. levels-1."""
    levels = int(levels)
    if levels < 0:
        raise InvalidLevel(f"level count must be >= 0, got {levels}")
    _require_support(mu, base)
    n = len(mu)
    entries = np.zeros((n, n), dtype=complex)
    for j in range(levels):
        entries += shell_operator(mu, base, j).entries
    return OperatorMatrix(CAUCHY, 0.0, entries, mu.weights)


def indicator_image_norm(mu: DiscreteMeasure, cube: Cube, kernel: KernelId = CAUCHY) -> float:
    """L2(mu restricted to Q) norm of the operator applied to the indicator of Q."""
    sub = restrict(mu, cube)
    if len(sub) == 0:
        raise EmptyCube("cube holds no atoms")
    if len(sub) == 1:
        return 0.0
    T = build_truncated(sub, kernel, 0.0)
    image = T.apply(np.ones(len(sub)))
    if image.ndim == 2:
        sq = (image * image).sum(axis=1)
    else:
        sq = np.abs(image) ** 2
    return float(np.sqrt((sq * sub.weights).sum()))


def pair_correlation(mu: DiscreteMeasure, cube_a: Cube, cube_b: Cube) -> float:
    """|<C phi_a, phi_b>| for the unit-mass indicator profiles of two cubes.

    phi_Q is the indicator of Q normalized by mass(Q)^(1/2); the pairing
    uses the untruncated Cauchy kernel and the L2(mu) inner product. The
    cubes must be geometrically disjoint and both occupied.
    """
    if cube_a.dim != mu.dim or cube_b.dim != mu.dim:
        raise DimensionMismatch("cube and measure dimensions differ")
    if cube_a.distance(cube_b) == 0.0 and _boxes_overlap(cube_a, cube_b):
        raise OverlappingCubes("cubes overlap")
    sub_a = restrict(mu, cube_a)
    sub_b = restrict(mu, cube_b)
    if len(sub_a) == 0 or len(sub_b) == 0:
        raise EmptyCube("both cubes must hold at least one atom")
    za = sub_a.as_complex()
    zb = sub_b.as_complex()
    kernel = 1.0 / (zb[:, None] - za[None, :])
    pairing = complex(sub_b.weights @ kernel @ sub_a.weights)
    return abs(pairing) / math.sqrt(sub_a.total_mass * sub_b.total_mass)


def _boxes_overlap(a: Cube, b: Cube) -> bool:
    lo = np.maximum(a.lower(), b.lower())
    hi = np.minimum(a.upper(), b.upper())
    return bool(np.all(lo < hi))


def t1_quantities(
    mu: DiscreteMeasure,
    base: Cube,
    level: int,
    min_atoms: int = 2,
) -> Tuple[float, float]:
    """Suprema feeding the tail estimate of the shell decomposition.

    Over origin-anchored dyadic cubes of side at most 2^-level * side(base)
    holding at least ``min_atoms`` atoms (each such cube meets the level
    square of its own atoms), returns the max linear density and the max of
    ||C chi_Q|| over L2(mu restricted to Q) divided by mass(Q)^(1/2).
    ``min_atoms`` >= 2 is the discretization floor: single-atom cubes have
    zero image but unbounded density as the side shrinks.
    """
    level = int(level)
    if level < 0:
        raise InvalidLevel(f"level must be >= 0, got {level}")
    if int(min_atoms) < 2:
        raise InvalidParameter("min_atoms must be >= 2 for atomic measures")
    _require_support(mu, base)
    min_atoms = int(min_atoms)
    pts = mu.points
    w = mu.weights
    if len(mu) > 1:
        diff = np.abs(pts[:, None, :] - pts[None, :, :]).max(axis=2)
        np.fill_diagonal(diff, np.inf)
        min_gap = float(diff.min())
    else:
        min_gap = 0.0
    sup_theta = 0.0
    sup_image = 0.0
    m = level
    while len(mu) > 1:
        side = base.side * 2.0 ** (-m)
        if side < min_gap:
            # no half-open cube this small can hold two atoms
            break
        idx = np.floor(pts / side).astype(np.int64)
        _, inverse, counts = np.unique(idx, axis=0, return_inverse=True, return_counts=True)
        inverse = inverse.ravel()
        hit = np.nonzero(counts >= min_atoms)[0]
        for cell in hit:
            members = np.nonzero(inverse == cell)[0]
            mass = float(w[members].sum())
            sup_theta = max(sup_theta, mass / side)
            sub = DiscreteMeasure(pts[members], w[members], _validated=True)
            T = build_truncated(sub, CAUCHY, 0.0)
            image = T.apply(np.ones(len(sub)))
            norm = math.sqrt(float((np.abs(image) ** 2 * sub.weights).sum()))
            sup_image = max(sup_image, norm / math.sqrt(mass))
        m += 1
    return sup_theta, sup_image
