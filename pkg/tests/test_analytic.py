import math

import numpy as np
import pytest

import cauchylab as cl


class TestStepFunction:
    def test_construction_and_eval(self):
        f = cl.StepFunction((0.0, 0.5, 1.0), (1.0, -1.0))
        xs = np.array([-0.1, 0.25, 0.75, 1.5])
        assert f(xs).tolist() == [0.0, 1.0, -1.0, 0.0]

    def test_validation(self):
        with pytest.raises(cl.ValidationError):
            cl.StepFunction((0.0, 0.0), (1.0,))
        with pytest.raises(cl.ValidationError):
            cl.StepFunction((0.0, 1.0), (1.0, 2.0))

    def test_exact_l2_norm(self):
        f = cl.StepFunction((0.0, 2.0), (3.0,))
        assert f.l2_norm() == pytest.approx(3.0 * math.sqrt(2.0), rel=1e-15)


class TestMakeFk:
    def test_k1_is_plus_minus_one(self):
        f = cl.make_fk(1)
        assert f.breakpoints == (0.0, 0.5, 1.0)
        assert f.values == (1.0, -1.0)
        assert f.l2_norm() == pytest.approx(1.0, rel=1e-14)

    @pytest.mark.parametrize("k", range(1, 9))
    def test_unit_norm_and_zero_mean(self, k):
        f = cl.make_fk(k)
        assert f.l2_norm() == pytest.approx(1.0, rel=1e-14)
        mean = sum(v * (b - a) for (a, b), v in
                   zip(zip(f.breakpoints, f.breakpoints[1:]), f.values))
        assert mean == pytest.approx(0.0, abs=1e-16)

    def test_invalid_k(self):
        with pytest.raises(cl.InvalidParameter):
            cl.make_fk(0)


class TestHilbertStep:
    def test_indicator_at_two(self):
        chi = cl.StepFunction((0.0, 1.0), (1.0,))
        assert cl.hilbert_step(chi, 2.0) == pytest.approx(math.log(2.0), rel=1e-15)

    def test_indicator_center_symmetry(self):
        chi = cl.StepFunction((0.0, 1.0), (1.0,))
        assert cl.hilbert_step(chi, 0.5) == 0.0

    def test_f1_at_three_halves(self):
        f1 = cl.make_fk(1)
        assert cl.hilbert_step(f1, 1.5) == pytest.approx(math.log(0.75), rel=1e-14)

    def test_breakpoint_rejected(self):
        chi = cl.StepFunction((0.0, 1.0), (1.0,))
        with pytest.raises(cl.BreakpointSingularity):
            cl.hilbert_step(chi, 1.0)
        with pytest.raises(cl.BreakpointSingularity):
            cl.hilbert_step(chi, np.array([0.3, 0.0]))

    def test_even_step_has_odd_transform(self):
        # even about 0.25: indicator of [-0.5, 1.0] with symmetric values
        f = cl.StepFunction((-0.5, 0.0, 0.5, 1.0), (2.0, 5.0, 2.0))
        for t in (0.6, 1.3, 2.7, 10.0):
            left = cl.hilbert_step(f, 0.25 - t)
            right = cl.hilbert_step(f, 0.25 + t)
            assert right == pytest.approx(-left, rel=1e-12, abs=1e-12)

    def test_vectorized_matches_scalar(self):
        f = cl.make_fk(3)
        xs = np.array([0.1, 0.4, 2.0, -1.0])
        vec = cl.hilbert_step(f, xs)
        for x, v in zip(xs, vec):
            assert cl.hilbert_step(f, float(x)) == v


class TestL2NormInterval:
    def test_constant_function(self):
        val = cl.l2_norm_interval(lambda x: np.ones_like(x), 0.0, 1.0, 4)
        assert val == pytest.approx(1.0, rel=1e-14)

    def test_doubling_panels_stable_on_smooth(self):
        f = lambda x: np.sin(3 * x) * np.exp(-x)  # noqa: E731
        a = cl.l2_norm_interval(f, 0.0, 2.0, 40)
        b = cl.l2_norm_interval(f, 0.0, 2.0, 80)
        assert abs(a - b) < 1e-8

    def test_invalid_range(self):
        with pytest.raises(cl.InvalidRange):
            cl.l2_norm_interval(lambda x: x, 1.0, 0.0, 4)
        with pytest.raises(cl.InvalidRange):
            cl.l2_norm_interval(lambda x: x, 0.0, 1.0, 0)

    @pytest.mark.parametrize("k", range(1, 9))
    def test_full_line_isometry_constant(self, k):
        f = cl.make_fk(k)
        hf = lambda x: cl.hilbert_step(f, x)  # noqa: E731
        val = cl.l2_norm_interval(hf, -50.0, 50.0, 2000, breakpoints=f.breakpoints)
        assert val == pytest.approx(math.pi, rel=0.01)

    def test_transform_norm_concentrates_on_unit_interval(self):
        f = cl.make_fk(5)
        hf = lambda x: cl.hilbert_step(f, x)  # noqa: E731
        val = cl.l2_norm_interval(hf, 0.0, 1.0, 1200, breakpoints=f.breakpoints)
        assert 0.9 * math.pi <= val <= math.pi * 1.001

    @pytest.mark.parametrize("k", [4, 6, 8])
    def test_tail_mass_bound(self, k):
        f = cl.make_fk(k)
        hf = lambda x: cl.hilbert_step(f, x)  # noqa: E731
        tail = cl.l2_norm_interval(hf, 1.0, 1000.0, 1500)
        assert tail ** 2 <= 2.0 ** (-k + 1) * 4.0
