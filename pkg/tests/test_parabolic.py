"""Parabolic module: flow stepping, barriers, drift, comparison audits."""

import math

import numpy as np
import pytest

from aclab.elliptic import SolveOptions, newton_solve
from aclab.errors import PreconditionViolated, StableInput, StepTooLarge
from aclab.field import QUARTIC, RadialProfile, ac_residual, energy, reflect
from aclab.geometry import SphereMetric
from aclab.parabolic import (
    FlowOptions,
    comparison_check,
    drift_experiment,
    drift_distance_reduced,
    flow_step,
    frankel_experiment,
    perturb_by_eigenfunction,
)

ROOT2 = math.sqrt(2.0)


@pytest.fixture(scope="module")
def small_metric():
    return SphereMetric(n=3, r=3.0, N=129)


def smooth_random(metric, rng, amplitude=1.0):
    x = metric.s / metric.L
    coeffs = rng.randn(5)
    vals = sum(c * np.cos(k * math.pi * x) for k, c in enumerate(coeffs))
    return amplitude * vals / max(1.0, np.max(np.abs(vals)))


class TestFlowStep:
    def test_wells_are_fixed_points(self, small_metric):
        for c in (-1.0, 1.0):
            prof = RadialProfile(small_metric, 0.5, np.full(small_metric.N, c))
            out = flow_step(prof, 0.5**2 / 4)
            assert np.max(np.abs(out.values - c)) <= 1e-14

    def test_constant_follows_scalar_ode(self, small_metric):
        # u+ = u - dt W'(u)/eps^2 for spatially constant data
        eps, dt = 0.5, 0.5**2 / 4
        prof = RadialProfile(small_metric, eps, np.full(small_metric.N, 0.5))
        out = flow_step(prof, dt)
        expect = 0.5 - dt * QUARTIC.dw(0.5) / eps**2
        assert expect > 0.5  # W'(0.5) < 0: pushed toward the +1 well
        assert np.max(np.abs(out.values - expect)) <= 1e-13

    def test_step_too_large(self, small_metric):
        prof = RadialProfile(small_metric, 0.5, np.zeros(small_metric.N))
        with pytest.raises(StepTooLarge):
            flow_step(prof, 0.5**2)

    def test_energy_dissipation_on_random_data(self, small_metric):
        eps, dt = 0.4, 0.4**2 / 4
        rng = np.random.RandomState(21)
        for _ in range(1000):
            prof = RadialProfile(small_metric, eps, smooth_random(small_metric, rng))
            out = flow_step(prof, dt)
            assert energy(out) <= energy(prof) + 1e-10

    def test_comparison_principle(self, small_metric):
        eps, dt = 0.5, 0.5**2 / 4
        rng = np.random.RandomState(22)
        for _ in range(50):
            lo = smooth_random(small_metric, rng, 0.8)
            hi = lo + 0.2 * (1.0 + smooth_random(small_metric, rng, 1.0)) / 2.0
            u = RadialProfile(small_metric, eps, lo)
            v = RadialProfile(small_metric, eps, hi)
            for _ in range(5):
                u = flow_step(u, dt)
                v = flow_step(v, dt)
                assert np.all(u.values <= v.values + 1e-10)

    def test_reflection_equivariance(self, small_metric):
        eps, dt = 0.5, 0.5**2 / 4
        rng = np.random.RandomState(23)
        prof = RadialProfile(small_metric, eps, smooth_random(small_metric, rng))
        a = flow_step(prof.with_values(-prof.values[::-1]), dt)
        b = flow_step(prof, dt)
        assert np.max(np.abs(a.values + b.values[::-1])) <= 1e-12

    def test_census_members_are_equilibria(self, census06_257):
        # strongly unstable multilayer members amplify the ~1e-12 solver
        # error by e^(|lambda_1| T); only mildly unstable members can hold
        # the 1e-8 line over 100 steps
        for rec in census06_257:
            u = rec.profile
            out = u
            for _ in range(100):
                out = flow_step(out, 0.6**2 / 4)
            moved = np.max(np.abs(out.values - u.values))
            bound = 1e-8 if len(rec.zeros) <= 3 else 1e-4
            assert moved <= bound


class TestPerturbation:
    def test_subsolution(self, v06_short):
        u0 = perturb_by_eigenfunction(v06_short, 0.5)
        assert ac_residual(u0).min() >= -1e-10

    def test_strictly_above_base(self, v06_short):
        u0 = perturb_by_eigenfunction(v06_short, 0.5)
        assert np.all(u0.values > v06_short.profile.values)

    def test_small_fraction_approaches_base(self, v06_short):
        # theta scales linearly with the fraction, so the perturbation does too
        base = v06_short.profile.values
        gaps = []
        for frac in (0.5, 0.05, 0.005):
            u0 = perturb_by_eigenfunction(v06_short, frac)
            gaps.append(np.max(np.abs(u0.values - base)))
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[1] == pytest.approx(0.1 * gaps[0], rel=1e-9)
        assert gaps[2] == pytest.approx(0.01 * gaps[0], rel=1e-9)

    def test_stable_input_rejected(self, metric257, tight_opts):
        ones = RadialProfile(metric257, 0.6, np.ones(metric257.N))
        rec = newton_solve(ones, tight_opts)
        with pytest.raises(StableInput):
            perturb_by_eigenfunction(rec, 0.5)

    def test_fraction_validation(self, v06_short):
        with pytest.raises(ValueError):
            perturb_by_eigenfunction(v06_short, 1.5)


class TestFrankel:
    def test_reaches_plus_one(self, metric_short257, v06_short):
        trace = frankel_experiment(
            metric_short257, 0.6, FlowOptions(T=2e5, snapshot_stride=5000), record=v06_short
        )
        assert trace.monotone
        assert trace.global_min_increment >= -1e-10
        assert trace.reached_constant
        assert np.max(np.abs(trace.final.values - 1.0)) <= 1e-4
        assert np.all(np.diff(trace.energy) <= 1e-10 * 5000)

    def test_zero_fraction_is_stationary(self, metric_short257, v06_short):
        # theta -> 0: flowing the unperturbed solution moves nothing
        opts = FlowOptions(T=100 * 0.36, snapshot_stride=50)
        trace = frankel_experiment(metric_short257, 0.6, opts, theta_fraction=1e-12, record=v06_short)
        assert np.max(np.abs(trace.final.values - v06_short.profile.values)) <= 1e-8

    def test_mirrored_flow_is_negated(self, metric_short257, v06_short):
        # odd symmetry: the flow from -(v + theta phi) is the negation
        from aclab.parabolic import _run_flow

        u0 = perturb_by_eigenfunction(v06_short, 0.5)
        dt = 0.36 / 4
        up = _run_flow(u0, dt, 300, 0, 0.0, 50)
        down = _run_flow(u0.with_values(-u0.values), dt, 300, 0, 0.0, 50)
        assert np.max(np.abs(up[0] + down[0])) <= 1e-12


class TestDrift:
    def test_centered_layer_stays(self, metric257):
        m = metric257
        trace = drift_experiment(m, 0.6, 0.0, FlowOptions(T=50.0))
        assert np.all(np.abs(trace.interface_s - m.s_c) <= m.h)

    def test_offset_layer_drifts_toward_nearer_cap(self, metric257):
        # layers are attracted by the caps: the centered solution is the
        # energy mountain pass, so the interface moves away from the center
        m = metric257
        trace = drift_experiment(m, 0.6, 0.9, FlowOptions(T=720.0))
        d0 = abs(trace.interface_s[0] - m.s_c)
        d1 = abs(trace.interface_s[-1] - m.s_c)
        assert d1 > d0
        assert not drift_distance_reduced(trace, m, 0.9)

    def test_smaller_eps_drifts_strictly_slower(self, metric257):
        m = metric257
        d_fast = drift_experiment(m, 0.6, 0.9, FlowOptions(T=720.0))
        d_slow = drift_experiment(m, 0.3, 0.9, FlowOptions(T=720.0))
        move_fast = abs(d_fast.interface_s[-1] - d_fast.interface_s[0])
        move_slow = abs(d_slow.interface_s[-1] - d_slow.interface_s[0])
        assert move_slow < move_fast

    def test_energy_nonincreasing(self, metric257):
        trace = drift_experiment(metric257, 0.6, 0.9, FlowOptions(T=100.0))
        strides = np.diff(trace.times) / (0.36 / 4)
        assert np.all(np.diff(trace.energy) <= 1e-10 * np.maximum(strides, 1.0))

    def test_offset_validation(self, metric257):
        with pytest.raises(ValueError):
            drift_experiment(metric257, 0.6, 2.5)

    def test_annihilation_is_reported(self, metric_short257):
        # push the layer near the admissibility edge and flow long: the cap
        # swallows it, which the trace must report rather than raise
        m = metric_short257
        trace = drift_experiment(m, 0.3, 0.85, FlowOptions(T=3.6e4, snapshot_stride=2000))
        assert trace.interface_lost
        assert math.isnan(trace.interface_s[-1])


class TestComparison:
    def test_census_pairs_audit(self, census06_257, metric257):
        # every positive nodal interval of a census member lies under any
        # member positive there (Serrin comparison, discrete audit)
        m = metric257
        ones = RadialProfile(m, 0.6, np.ones(m.N))
        for rec in census06_257:
            if rec.nodal is None:
                continue
            for lo, hi, sgn in rec.nodal.intervals:
                if sgn <= 0:
                    continue
                # widen by one cell so the boundary nodes carry u <= 0
                span = (max(0.0, lo - m.h), min(m.L, hi + m.h))
                assert comparison_check(rec.profile, ones, span)

    def test_equal_profiles_flagged(self, v06_257, metric257):
        v = v06_257.profile
        lo, hi, sgn = v06_257.nodal.intervals[0]
        assert sgn == 1
        with pytest.raises(PreconditionViolated) as err:
            comparison_check(v, reflect(v).with_values(-reflect(v).values), (lo, hi))
        assert err.value.node is not None

    def test_positive_endpoint_rejected(self, metric257):
        m = metric257
        u = RadialProfile(m, 0.6, np.ones(m.N) * 0.5)
        v = RadialProfile(m, 0.6, np.ones(m.N))
        with pytest.raises(PreconditionViolated):
            comparison_check(u, v, (2.0, 4.0))
