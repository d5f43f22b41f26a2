import math

import numpy as np
import pytest

import cauchylab as cl
from conftest import random_planar_measure


def random_operator(rng, n, complex_entries=True):
    """Random weighted matrix wrapped as an operator (norm-machinery test rig)."""
    if complex_entries:
        entries = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    else:
        entries = rng.normal(size=(n, n))
    np.fill_diagonal(entries, 0.0)
    w = rng.uniform(0.1, 2.0, size=n)
    return cl.OperatorMatrix(cl.CAUCHY, 0.0, entries, w)


def svd_norm(T):
    """Independent oracle: full singular decomposition of the weighted matrix."""
    s = np.sqrt(T.weights)
    if T.entries.ndim == 3:
        B = np.vstack([s[:, None] * T.entries[:, :, c] * s[None, :]
                       for c in range(T.entries.shape[2])])
    else:
        B = s[:, None] * T.entries * s[None, :]
    return float(np.linalg.svd(B, compute_uv=False)[0])


class TestKernels:
    def test_cauchy_eval(self):
        v = cl.kernel_eval(cl.CAUCHY, (1, 0), (0, 0))
        assert v == 1 + 0j
        v = cl.kernel_eval(cl.CAUCHY, (0, 1), (0, 0))
        assert v == pytest.approx(-1j)

    def test_im_cauchy_vanishes_on_real_axis(self):
        assert cl.kernel_eval(cl.IM_CAUCHY, (3, 0), (1, 0)) == 0.0

    def test_riesz_eval(self):
        v = cl.kernel_eval(cl.riesz(1, 2), (2, 0), (0, 0))
        assert np.allclose(v, [0.5, 0.0])

    def test_coincident_points(self):
        with pytest.raises(cl.CoincidentPoints):
            cl.kernel_eval(cl.CAUCHY, (1, 1), (1, 1))

    def test_kernel_validation(self):
        with pytest.raises(cl.KernelDimensionMismatch):
            cl.KernelId("cauchy", d=3)
        with pytest.raises(cl.KernelDimensionMismatch):
            cl.riesz(3, 2)
        with pytest.raises(cl.InvalidParameter):
            cl.KernelId("weird")

    def test_dimension_check_on_eval(self):
        with pytest.raises(cl.KernelDimensionMismatch):
            cl.kernel_eval(cl.riesz(2, 3), (1, 0), (0, 0))


class TestBuildTruncated:
    def test_full_truncation_gives_zero_matrix(self, two_atoms):
        T = cl.build_truncated(two_atoms, cl.CAUCHY, 2.0)
        assert np.all(T.entries == 0)

    def test_two_atom_entries(self, two_atoms):
        T = cl.build_truncated(two_atoms, cl.CAUCHY, 0.0)
        assert T.entries[0, 1] == -1 + 0j
        assert T.entries[1, 0] == 1 + 0j
        assert T.entries[0, 0] == 0

    def test_im_cauchy_zero_on_horizontal_segment(self):
        mu = cl.generate_segment(0, 1, 32)
        T = cl.build_truncated(mu, cl.IM_CAUCHY, 0.0)
        assert np.all(T.entries == 0.0)

    def test_mask_strict_inequality(self):
        mu = cl.new_measure([(0, 0), (1, 0), (3, 0)], [1, 1, 1])
        T = cl.build_truncated(mu, cl.CAUCHY, 1.0)
        assert T.entries[0, 1] == 0  # distance exactly 1 is truncated away
        assert T.entries[0, 2] != 0

    def test_exact_antisymmetry_cauchy(self, rng):
        mu = random_planar_measure(rng, 60)
        T = cl.build_truncated(mu, cl.CAUCHY, 0.1)
        assert np.array_equal(T.entries, -T.entries.T)
        assert np.all(np.diag(T.entries) == 0)

    def test_exact_antisymmetry_riesz_and_im(self, rng):
        mu = random_planar_measure(rng, 40)
        R = cl.build_truncated(mu, cl.riesz(1, 2), 0.0)
        for c in range(2):
            assert np.array_equal(R.entries[:, :, c], -R.entries[:, :, c].T)
        M = cl.build_truncated(mu, cl.IM_CAUCHY, 0.0)
        assert np.array_equal(M.entries, -M.entries.T)

    def test_riesz_dimension_guard(self, rng):
        mu = random_planar_measure(rng, 10)
        with pytest.raises(cl.KernelDimensionMismatch):
            cl.build_truncated(mu, cl.riesz(2, 3), 0.0)

    def test_skew_pairing_vanishes(self, rng):
        mu = random_planar_measure(rng, 50)
        T = cl.build_truncated(mu, cl.CAUCHY, 0.0)
        chi = np.ones(50)
        image = T.apply(chi)
        pairing = complex((image * chi * mu.weights).sum())
        assert abs(pairing.real) <= 1e-12


class TestApply:
    def test_zero_matrix(self, two_atoms):
        T = cl.build_truncated(two_atoms, cl.CAUCHY, 5.0)
        assert np.all(T.apply(np.array([1.0, 2.0])) == 0)

    def test_two_atom_action(self, two_atoms):
        T = cl.build_truncated(two_atoms, cl.CAUCHY, 0.0)
        out = T.apply(np.array([0.0, 1.0]))
        assert out.tolist() == [(-0.5 + 0j), 0j]

    def test_linearity(self, rng):
        mu = random_planar_measure(rng, 25)
        T = cl.build_truncated(mu, cl.CAUCHY, 0.0)
        f = rng.normal(size=25)
        g = rng.normal(size=25)
        lhs = T.apply(2.5 * f - 1.5 * g)
        rhs = 2.5 * T.apply(f) - 1.5 * T.apply(g)
        assert np.allclose(lhs, rhs, atol=1e-12)

    def test_length_mismatch(self, two_atoms):
        T = cl.build_truncated(two_atoms, cl.CAUCHY, 0.0)
        with pytest.raises(cl.LengthMismatch):
            T.apply(np.ones(3))


class TestOperatorNorm:
    def test_zero_matrix_norm(self, two_atoms):
        T = cl.build_truncated(two_atoms, cl.CAUCHY, 5.0)
        est = cl.operator_norm(T)
        assert est.value == 0.0
        assert est.converged

    def test_two_atom_norm(self, two_atoms):
        T = cl.build_truncated(two_atoms, cl.CAUCHY, 0.0)
        assert cl.operator_norm(T).value == pytest.approx(0.5, rel=1e-12)

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_svd_oracle(self, seed):
        rng = np.random.default_rng(1000 + seed)
        n = int(rng.integers(2, 51))
        T = random_operator(rng, n, complex_entries=bool(seed % 2))
        est = cl.operator_norm(T, tol=1e-13, max_iter=200000)
        assert est.converged
        assert est.value == pytest.approx(svd_norm(T), rel=1e-8)

    def test_riesz_stacked_norm_matches_svd(self, rng):
        mu = random_planar_measure(rng, 30)
        T = cl.build_truncated(mu, cl.riesz(1, 2), 0.0)
        est = cl.operator_norm(T, tol=1e-13, max_iter=100000)
        assert est.value == pytest.approx(svd_norm(T), rel=1e-8)

    def test_unconverged_flag(self, rng):
        T = random_operator(rng, 30)
        est = cl.operator_norm(T, tol=1e-16, max_iter=2)
        assert not est.converged
        assert est.iterations == 2
        assert est.value > 0

    def test_random_probes_never_exceed_norm(self, rng):
        mu = random_planar_measure(rng, 40)
        T = cl.build_truncated(mu, cl.CAUCHY, 0.0)
        norm = cl.operator_norm(T, tol=1e-13, max_iter=100000).value
        w = mu.weights
        for _ in range(200):
            f = rng.normal(size=40) + 1j * rng.normal(size=40)
            ratio = math.sqrt(
                float((np.abs(T.apply(f)) ** 2 * w).sum())
                / float((np.abs(f) ** 2 * w).sum())
            )
            assert ratio <= norm + 1e-8


class TestTruncationGap:
    def test_equal_radii_gap_zero(self, two_atoms):
        est = cl.truncation_gap(two_atoms, cl.CAUCHY, 0.5, 0.5)
        assert est.value == 0.0

    def test_gap_beyond_diameter_equals_norm(self, rng):
        mu = random_planar_measure(rng, 20)
        full = cl.operator_norm(cl.build_truncated(mu, cl.CAUCHY, 0.1), tol=1e-12)
        gap = cl.truncation_gap(mu, cl.CAUCHY, 0.1, 100.0, tol=1e-12)
        assert gap.value == full.value

    def test_invalid_ranges(self, two_atoms):
        with pytest.raises(cl.InvalidRange):
            cl.truncation_gap(two_atoms, cl.CAUCHY, 0.5, 0.1)
        with pytest.raises(cl.InvalidRange):
            cl.truncation_gap(two_atoms, cl.CAUCHY, -0.1, 0.5)

    def test_band_is_difference_of_builds(self, rng):
        mu = random_planar_measure(rng, 30)
        near = cl.build_truncated(mu, cl.CAUCHY, 0.2)
        far = cl.build_truncated(mu, cl.CAUCHY, 0.8)
        band = near.entries - far.entries
        dist = np.abs(mu.as_complex()[:, None] - mu.as_complex()[None, :])
        inside = (dist > 0.2) & (dist <= 0.8)
        np.fill_diagonal(inside, False)
        assert np.all((band != 0) == ((near.entries != 0) & inside))

    def test_triangle_inequality_between_truncations(self, rng):
        mu = random_planar_measure(rng, 35)
        n1 = cl.operator_norm(cl.build_truncated(mu, cl.CAUCHY, 0.1), tol=1e-11).value
        n2 = cl.operator_norm(cl.build_truncated(mu, cl.CAUCHY, 0.4), tol=1e-11).value
        gap = cl.truncation_gap(mu, cl.CAUCHY, 0.1, 0.4, tol=1e-11).value
        assert n2 <= n1 + gap + 1e-9
        assert n1 <= n2 + gap + 1e-9


class TestShells:
    def base(self, mu, pad=1.0):
        bb = mu.bounding_cube()
        return cl.Cube(bb.center, 2 * bb.side + pad)

    def test_fine_shells_are_empty(self, rng):
        mu = random_planar_measure(rng, 12)
        base = self.base(mu)
        T = cl.shell_operator(mu, base, 40)
        assert np.all(T.entries == 0)

    def test_each_pair_in_exactly_one_shell(self, rng):
        mu = random_planar_measure(rng, 25)
        base = self.base(mu)
        counts = np.zeros((25, 25))
        for j in range(30):
            T = cl.shell_operator(mu, base, j)
            counts += (T.entries != 0).astype(float)
        off_diag = ~np.eye(25, dtype=bool)
        assert np.all(counts[off_diag] == 1)
        assert np.all(counts[~off_diag] == 0)

    def test_shell_sum_reconstructs_full_matrix_bitexact(self, rng):
        mu = random_planar_measure(rng, 30)
        base = self.base(mu)
        full = cl.build_truncated(mu, cl.CAUCHY, 0.0)
        total = cl.partial_sum_operator(mu, base, 40)
        assert np.array_equal(total.entries, full.entries)

    def test_zero_levels_is_zero_operator(self, rng):
        mu = random_planar_measure(rng, 10)
        T = cl.partial_sum_operator(mu, self.base(mu), 0)
        assert np.all(T.entries == 0)

    def test_partial_sum_gap_decreasing_for_half_cantor(self):
        mu = cl.generate_cantor(cl.CantorSpec((0.5,) * 5, 5))
        base = cl.Cube((0.5, 0.5), 2.0)
        full = cl.build_truncated(mu, cl.CAUCHY, 0.0)
        prev = math.inf
        for levels in range(0, 8):
            part = cl.partial_sum_operator(mu, base, levels)
            diff = cl.OperatorMatrix(cl.CAUCHY, 0.0, full.entries - part.entries, mu.weights)
            gap = cl.operator_norm(diff, tol=1e-9, max_iter=5000).value
            assert gap <= prev + 1e-10
            prev = gap
        assert prev == 0.0  # shells finer than the atom pitch: exact reconstruction

    def test_invalid_level(self, rng):
        mu = random_planar_measure(rng, 5)
        with pytest.raises(cl.InvalidLevel):
            cl.shell_operator(mu, self.base(mu), -1)

    def test_support_containment_required(self, rng):
        mu = random_planar_measure(rng, 5)
        with pytest.raises(cl.ValidationError):
            cl.shell_operator(mu, cl.Cube((100, 100), 0.5), 0)


class TestIndicatorImage:
    def test_single_atom_cube(self):
        mu = cl.new_measure([(0, 0), (10, 10)], [1, 1])
        assert cl.indicator_image_norm(mu, cl.Cube((0, 0), 1.0)) == 0.0

    def test_symmetric_three_atoms_middle_cancels(self):
        mu = cl.new_measure([(-1, 0), (0, 0), (1, 0)], [1, 1, 1])
        T = cl.build_truncated(mu, cl.CAUCHY, 0.0)
        image = T.apply(np.ones(3))
        assert image[1] == 0j  # antisymmetric cancellation
        norm = cl.indicator_image_norm(mu, cl.Cube((0, 0), 4.0))
        by_hand = math.sqrt(abs(image[0]) ** 2 + abs(image[2]) ** 2)
        assert norm == pytest.approx(by_hand, rel=1e-14)

    def test_circle_indicator_closed_form(self):
        n = 400
        mu = cl.generate_circle(1.0, n)
        val = cl.indicator_image_norm(mu, cl.Cube((0, 0), 4.0))
        # discrete principal value on the circle: |image| = pi (1 - 1/N)
        expected = math.pi * (1 - 1 / n) * math.sqrt(2 * math.pi)
        assert val == pytest.approx(expected, rel=1e-10)
        assert val ** 2 == pytest.approx(2 * math.pi ** 3, rel=0.02)

    def test_empty_cube(self, rng):
        mu = random_planar_measure(rng, 5)
        with pytest.raises(cl.EmptyCube):
            cl.indicator_image_norm(mu, cl.Cube((50, 50), 0.1))


class TestPairCorrelation:
    def test_single_atom_cubes(self):
        mu = cl.new_measure([(0, 0), (1, 0)], [0.7, 1.3])
        qa = cl.Cube((0, 0), 0.5)
        qb = cl.Cube((1, 0), 0.5)
        val = cl.pair_correlation(mu, qa, qb)
        assert val == pytest.approx(math.sqrt(0.7 * 1.3), rel=1e-14)

    def test_mirror_symmetric_real_part_formula(self):
        # atoms mirror-symmetric across the imaginary axis; the pairing of the
        # two half measures reduces to the double sum of Re(z - w)/|z - w|^2
        pts = [(-2.0, 0.3), (-1.5, -0.4), (-2.2, -0.1), (2.0, 0.3), (1.5, -0.4), (2.2, -0.1)]
        w = [0.5, 0.8, 0.6, 0.5, 0.8, 0.6]
        mu = cl.new_measure(pts, w)
        qa = cl.Cube((-2, 0), 2.0)
        qb = cl.Cube((2, 0), 2.0)
        val = cl.pair_correlation(mu, qa, qb)
        left = [i for i, p in enumerate(pts) if p[0] < 0]
        right = [i for i, p in enumerate(pts) if p[0] > 0]
        acc = 0.0
        for i in right:
            for j in left:
                dx = pts[i][0] - pts[j][0]
                dy = pts[i][1] - pts[j][1]
                acc += dx / (dx * dx + dy * dy) * w[i] * w[j]
        mass = sum(w[i] for i in left)
        expected = abs(acc) / mass  # equal masses on both sides
        assert val == pytest.approx(expected, rel=1e-12)

    def test_separated_pair_value_on_uniform_square(self, grid_square):
        q = cl.Cube((0.5, 0.5), 1.0, half_open=False)
        qa, qb = cl.find_separated_pair(grid_square, q, 4, 16)
        val = cl.pair_correlation(grid_square, qa, qb)
        # frozen against an independent double loop (see oracle study);
        # comfortably bounded below at half the coarse heuristic mu(Q)/l(Q')
        assert val == pytest.approx(0.12475069, abs=1e-7)
        assert val >= 0.5 * 0.05 * grid_square.total_mass / qa.side

    def test_overlap_rejected(self, grid_square):
        with pytest.raises(cl.OverlappingCubes):
            cl.pair_correlation(grid_square, cl.Cube((0.4, 0.4), 0.5), cl.Cube((0.5, 0.5), 0.5))

    def test_empty_cube_rejected(self, grid_square):
        with pytest.raises(cl.EmptyCube):
            cl.pair_correlation(grid_square, cl.Cube((5, 5), 0.5), cl.Cube((0.25, 0.25), 0.4))


class TestT1Quantities:
    def test_all_cubes_single_atom_gives_zero(self):
        mu = cl.new_measure([(0.1, 0.1), (0.9, 0.9)], [1, 1])
        base = cl.Cube((0.5, 0.5), 4.0)
        assert cl.t1_quantities(mu, base, 12, min_atoms=2) == (0.0, 0.0)

    def test_segment_density_stays_flat(self):
        mu = cl.generate_segment(0, 1, 512)
        base = cl.Cube((0.5, 0.0), 2.0)
        values = [cl.t1_quantities(mu, base, n)[0] for n in range(0, 5)]
        for v in values:
            assert v == pytest.approx(1.0, rel=1e-12)

    def test_half_cantor_quantities_decrease(self):
        mu = cl.generate_cantor(cl.CantorSpec((0.5,) * 6, 6))
        base = cl.Cube((0.5, 0.5), 2.0)
        results = [cl.t1_quantities(mu, base, n) for n in range(2, 7)]
        for (i_prev, ii_prev), (i_next, ii_next) in zip(results, results[1:]):
            assert i_next <= i_prev * 1.05
            assert ii_next <= ii_prev * 1.05

    def test_min_atoms_guard(self, rng):
        mu = random_planar_measure(rng, 5)
        with pytest.raises(cl.InvalidParameter):
            cl.t1_quantities(mu, cl.Cube((0, 0), 10.0), 0, min_atoms=1)
