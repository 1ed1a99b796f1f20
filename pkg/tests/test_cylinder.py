"""Oscillating-warp example: critical slices and their nondegeneracy."""

import math

import numpy as np
import pytest

from aclab.cylinder import critical_points, oscillating_eval, slice_minimality_check
from aclab.errors import ResolutionTooCoarse


def brute_force_roots(lo, hi, resolution):
    """Independent sign-scan oracle on f' at the given resolution."""
    grid = np.arange(lo, hi + resolution, resolution)
    fp = np.array([oscillating_eval(t)[1] for t in grid])
    roots = []
    for i in range(len(grid) - 1):
        if fp[i] == 0.0:
            roots.append(grid[i])
        elif fp[i] * fp[i + 1] < 0:
            a, b = grid[i], grid[i + 1]
            fa = fp[i]
            for _ in range(100):
                mid = 0.5 * (a + b)
                fm = oscillating_eval(mid)[1]
                if fm == 0.0 or b - a < 1e-13:
                    a = b = mid
                    break
                if (fm < 0) == (fa < 0):
                    a, fa = mid, fm
                else:
                    b = mid
            roots.append(0.5 * (a + b))
    return roots


class TestEval:
    def test_value_at_one(self):
        f, _, _ = oscillating_eval(1.0)
        assert f == pytest.approx(2.0, abs=1e-14)

    def test_limit_at_zero(self):
        assert oscillating_eval(0.0) == (1.0, 0.0, 0.0)
        assert oscillating_eval(1e-12) == (1.0, 0.0, 0.0)

    def test_warp_at_least_one(self):
        for t in np.linspace(-1.5, 1.5, 1001):
            assert oscillating_eval(t)[0] >= 1.0

    def test_derivative_matches_finite_differences(self):
        h = 1e-7
        for t in np.linspace(0.05, 1.0, 50):
            f_m = oscillating_eval(t - h)[0]
            f_p = oscillating_eval(t + h)[0]
            fp = oscillating_eval(t)[1]
            assert (f_p - f_m) / (2 * h) == pytest.approx(fp, rel=1e-5, abs=1e-9)

    def test_second_derivative_matches_finite_differences(self):
        h = 1e-5
        for t in np.linspace(0.1, 1.0, 25):
            f_m = oscillating_eval(t - h)[1]
            f_p = oscillating_eval(t + h)[1]
            fpp = oscillating_eval(t)[2]
            assert (f_p - f_m) / (2 * h) == pytest.approx(fpp, rel=1e-5, abs=1e-7)


@pytest.fixture(scope="module")
def points():
    return critical_points((0.05, 0.8), 1e-5)


class TestCriticalPoints:
    def test_strictly_decreasing(self, points):
        ts = [p.t for p in points]
        assert all(b < a for a, b in zip(ts, ts[1:]))

    def test_critical_residual(self, points):
        assert max(slice_minimality_check(p.t) for p in points) <= 1e-10

    def test_midpoints_are_not_critical(self, points):
        ts = [p.t for p in points]
        for a, b in zip(ts, ts[1:]):
            assert slice_minimality_check(0.5 * (a + b)) > 0.0

    def test_matches_brute_force_oracle(self, points):
        oracle = sorted(brute_force_roots(0.05, 0.8, 1e-6), reverse=True)
        ts = [p.t for p in points]
        assert len(ts) == len(oracle)
        assert np.max(np.abs(np.array(ts) - np.array(oracle))) <= 1e-9

    def test_maxima_and_minima_alternate(self, points):
        signs = [math.copysign(1.0, p.f_second) for p in points]
        assert all(b == -a for a, b in zip(signs, signs[1:]))

    def test_all_nondegenerate(self, points):
        assert all(p.nondegenerate for p in points)

    def test_exact_family_has_sin_minus_one(self, points):
        # f' vanishes identically where 2 pi / t = 3 pi/2 mod 2 pi, i.e. at
        # t = 4/(3 + 4k); those local minima of f carry sin = -1 exactly
        exact = [4.0 / (3 + 4 * k) for k in range(20)]
        hits = 0
        for p in points:
            close = min(abs(p.t - e) for e in exact)
            if close <= 1e-9:
                hits += 1
                assert p.sin_value == pytest.approx(-1.0, abs=1e-9)
                assert p.f_second > 0
        assert hits >= 5

    def test_maxima_family_has_sin_near_one(self, points):
        for p in points:
            if p.f_second < 0:  # local maxima of f
                assert p.sin_value >= 0.5

    def test_no_reflective_symmetry(self, points):
        neg = critical_points((-0.8, -0.05), 1e-5)
        mirrored = np.array(sorted(-p.t for p in neg))
        for p in points:
            assert np.min(np.abs(mirrored - p.t)) > 1e-6

    def test_root_count_grows_toward_zero(self):
        counts = [len(critical_points((lo, 0.8), 1e-5)) for lo in (0.05, 0.02, 0.01)]
        assert counts[0] < counts[1] < counts[2]

    def test_resolution_too_coarse(self):
        with pytest.raises(ResolutionTooCoarse):
            critical_points((0.01, 0.8), 5e-4)

    def test_degenerate_slice_at_zero(self):
        assert slice_minimality_check(0.0) == 0.0

    def test_range_validation(self):
        with pytest.raises(ValueError):
            critical_points((0.8, 0.05), 1e-5)
        with pytest.raises(ValueError):
            critical_points((0.05, 0.8), -1.0)
