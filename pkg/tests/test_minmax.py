"""Minmax module: sweepout masses, width report, least-area scan."""

import math

import numpy as np
import pytest

from aclab.elliptic import SolveOptions, continuation
from aclab.errors import InsufficientData
from aclab.field import sigma_energy
from aclab.geometry import SphereMetric, slice_area, unit_sphere_area
from aclab.minmax import least_area_scan, sweepout_profile, width_report


class TestSweepout:
    def test_max_is_unit_sphere_area(self, metric257):
        prof = sweepout_profile(metric257, 257)
        assert abs(prof.max_mass - 4 * math.pi) <= 1e-10

    def test_mass_vanishes_at_poles(self, metric257):
        prof = sweepout_profile(metric257, 257)
        assert prof.mass[0] == 0.0
        assert prof.mass[-1] == 0.0

    def test_mass_symmetric(self, metric257):
        prof = sweepout_profile(metric257, 257)
        assert np.max(np.abs(prof.mass - prof.mass[::-1])) <= 1e-12

    def test_argmax_is_plateau_within_one_cell(self, metric257):
        samples = 257
        prof = sweepout_profile(metric257, samples)
        cell = metric257.L / (samples - 1)
        lo, hi = metric257.plateau
        assert abs(prof.argmax_interval[0] - lo) <= cell
        assert abs(prof.argmax_interval[1] - hi) <= cell

    def test_grid_independence(self, metric257, metric513):
        a = sweepout_profile(metric257, 257).max_mass
        b = sweepout_profile(metric513, 257).max_mass
        assert abs(a - b) <= 1e-12

    def test_degenerate_cylinder(self):
        m = SphereMetric(n=3, r=0.0, N=129)
        prof = sweepout_profile(m, 129)
        assert abs(prof.max_mass - 4 * math.pi) <= 1e-10

    def test_sample_validation(self, metric257):
        with pytest.raises(ValueError):
            sweepout_profile(metric257, 32)


@pytest.fixture(scope="module")
def energies(metric513):
    opts = SolveOptions(tolerance=1e-11)
    recs = continuation(metric513, (1.2, 0.9, 0.6), opts)
    return [(rec.profile.eps, rec.energy) for rec in recs]


class TestWidthReport:
    def test_upper_bound_and_table(self, metric513, energies):
        rep = width_report(metric513, energies, samples=257)
        assert abs(rep.omega1_upper - 4 * math.pi) <= 1e-10
        sigma = sigma_energy()
        for eps, e, ratio in rep.energy_table:
            assert ratio == pytest.approx(e / (2 * sigma * 4 * math.pi), rel=1e-12)

    def test_trend_flag_on_resolvable_schedule(self, metric513, energies):
        # the finite-eps energy gap shrinks along 1.2 -> 0.9 -> 0.6, where it
        # still dominates the quadrature bias of the discrete energy
        rep = width_report(metric513, energies, samples=257)
        assert rep.trend_decreasing

    def test_insufficient_data(self, metric513, energies):
        with pytest.raises(InsufficientData):
            width_report(metric513, energies[:2])


class TestLeastArea:
    def test_minimum_is_center_slice(self, census06_257, metric257):
        rep = least_area_scan(census06_257, metric257)
        assert not rep.any_below_center
        assert rep.min_area == pytest.approx(rep.center_area, rel=0.01)

    def test_constants_excluded(self, census06_257, metric257):
        rep = least_area_scan(census06_257, metric257)
        nonconstant = [rec for rec in census06_257 if rec.zeros]
        assert len(rep.entries) == len(nonconstant)

    def test_two_zero_members_double_area(self, census06_257, metric257):
        rep = least_area_scan(census06_257, metric257)
        for zeros, area in rep.entries:
            if len(zeros) == 2:
                assert area == pytest.approx(2 * rep.center_area, rel=0.01)

    def test_energy_dominates_layer_count(self, metric1025, v_family_1025):
        # E_eps >= 2 sigma (least zero-slice mass) - 10% at eps <= 0.1 r
        rec = v_family_1025[0.3]
        sigma = sigma_energy()
        least = min(slice_area(metric1025, z) for z in rec.zeros)
        assert rec.energy >= 2 * sigma * least * 0.9

    def test_empty_census_rejected(self, metric257):
        with pytest.raises(ValueError):
            least_area_scan([], metric257)
