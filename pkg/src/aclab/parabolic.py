"""Gradient-flow engine for the parabolic Allen-Cahn equation.

Semi-implicit stepping (implicit diffusion, explicit reaction) against the
same conservative Laplacian as the steady solvers, so the discrete energy is
nonincreasing for dt <= eps^2 / max|W''|.  Hosts the subsolution barrier
experiment from the ordered-solutions argument and the interface-drift
experiment for off-center layers.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .elliptic import SolveOptions, _solve_tridiag, symmetric_solution
from .errors import (
    InterfaceLost,
    MonotonicityViolated,
    PreconditionViolated,
    StableInput,
    StepTooLarge,
)
from .field import QUARTIC, RadialProfile, ac_residual, energy, laplacian_bands
from .spectral import eigenfunction, linearized_spectrum

log = logging.getLogger(__name__)

__all__ = [
    "FlowOptions",
    "FlowTrace",
    "flow_step",
    "perturb_by_eigenfunction",
    "frankel_experiment",
    "drift_experiment",
    "comparison_check",
]


@dataclass(frozen=True)
class FlowOptions:
    """Stepping controls; dt and T default to eps^2/4 and experiment scale."""

    dt: float | None = None
    T: float | None = None
    scheme: str = "semi-implicit"
    check_monotone: bool = False
    snapshot_stride: int | None = None

    def __post_init__(self):
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.T is not None and self.dt is not None and self.T < self.dt:
            raise ValueError("T must be at least dt")
        if self.scheme != "semi-implicit":
            raise ValueError(f"unknown stepping scheme {self.scheme!r}")


@dataclass
class FlowTrace:
    """Snapshots of a flow run: interface position, energy, step increments."""

    times: np.ndarray
    interface_s: np.ndarray  # first zero by interpolation; nan when absent
    energy: np.ndarray
    min_step_increment: np.ndarray  # smallest nodal increment per window
    global_min_increment: float
    monotone: bool
    reached_constant: bool
    interface_lost: bool
    final: RadialProfile
    snapshots: list


def _first_zero(metric, values):
    exact = np.flatnonzero(values == 0.0)
    sign = np.sign(values)
    idx = np.flatnonzero(sign[:-1] * sign[1:] < 0)
    first_cross = math.inf if idx.size == 0 else int(idx[0])
    first_exact = math.inf if exact.size == 0 else int(exact[0])
    if first_exact <= first_cross:
        if math.isinf(first_exact):
            return math.nan
        return float(metric.s[int(first_exact)])
    i = int(first_cross)
    v0, v1 = values[i], values[i + 1]
    return float(metric.s[i] - v0 * metric.h / (v1 - v0))


def _check_dt(dt, eps, well):
    limit = eps * eps / 2.0
    if dt > limit * (1.0 + 1e-12):
        raise StepTooLarge(f"dt={dt} exceeds the reaction stability bound eps^2/2={limit}")


def flow_step(u, dt, well=QUARTIC):
    """One semi-implicit step (I - dt Lap) u+ = u - dt W'(u)/eps^2."""
    _check_dt(dt, u.eps, well)
    lower, diag, upper = laplacian_bands(u.metric)
    rhs = u.values - dt * well.dw(u.values) / (u.eps * u.eps)
    unew = _solve_tridiag(-dt * lower, 1.0 - dt * diag, -dt * upper, rhs)
    return u.with_values(unew)


def _run_flow(u0, dt, n_steps, stop_mode, stop_target, stride):
    """Quartic-well flow loop through the compiled kernel."""
    metric = u0.metric
    lower, diag, upper = laplacian_bands(metric)
    lo = np.ascontiguousarray(-dt * lower)
    di = np.ascontiguousarray(1.0 - dt * diag)
    up = np.ascontiguousarray(-dt * upper)
    beta, gamma = _kernels.thomas_factor(lo, di, up)
    n_snaps = n_steps // stride + 2
    snaps = np.empty((n_snaps, metric.N))
    snap_steps = np.zeros(n_snaps, dtype=np.int64)
    snap_min_inc = np.zeros(n_snaps)
    u = u0.values.copy()
    c_react = dt / (u0.eps * u0.eps)
    steps_done, status, gmin, max_seen, used = _kernels.flow_loop(
        u,
        lo,
        beta,
        gamma,
        c_react,
        n_steps,
        stride,
        snaps,
        snap_steps,
        snap_min_inc,
        stop_mode,
        stop_target,
    )
    return u, steps_done, status, gmin, max_seen, snaps[:used], snap_steps[:used], snap_min_inc[:used]


def _trace_from_run(metric, eps, dt, run, well):
    u, steps_done, status, gmin, _, snaps, snap_steps, snap_min_inc = run
    times = snap_steps * dt
    interface = np.array([_first_zero(metric, snap) for snap in snaps])
    energies = np.array([energy(RadialProfile(metric, eps, snap), well) for snap in snaps])
    return FlowTrace(
        times=times,
        interface_s=interface,
        energy=energies,
        min_step_increment=snap_min_inc,
        global_min_increment=float(gmin),
        monotone=bool(gmin >= -1e-10),
        reached_constant=status == 1,
        interface_lost=status == 2,
        final=RadialProfile(metric, eps, u),
        snapshots=[RadialProfile(metric, eps, s) for s in snaps],
    )


def perturb_by_eigenfunction(record, theta_fraction, well=QUARTIC):
    """u + theta phi_1 with theta = theta_fraction eps^2 (-lambda_1) / C.

    phi_1 is the positive ground state of the linearization, sup-normalized;
    the Taylor bound on W' makes the result a discrete subsolution for
    theta_fraction < 1.
    """
    if not 0.0 < theta_fraction < 1.0:
        raise ValueError("theta_fraction must lie in (0, 1)")
    u = record.profile
    report = linearized_spectrum(u, k_max=1, m=2, well=well)
    lam1 = report.modes[0].eigenvalues[0]
    if lam1 >= 0.0:
        raise StableInput(f"lowest eigenvalue {lam1} is nonnegative")
    phi1 = eigenfunction(report, 0, 0).values
    if phi1.min() <= 0.0:
        phi1 = np.abs(phi1)  # Perron ground state; flip rounding-level dips
    theta = theta_fraction * u.eps * u.eps * (-lam1) / well.quad_constant
    return u.with_values(u.values + theta * phi1)


def frankel_experiment(metric, eps, opts=None, theta_fraction=0.5, well=QUARTIC, record=None):
    """Flow the perturbed symmetric solution upward toward the constant +1.

    Starts from v + theta phi_1 (a subsolution below the ordered solution
    u2 == 1), asserts pointwise per-step monotonicity and u < 1 throughout,
    and stops once sup|u - 1| <= 1e-4 or at T.
    """
    opts = opts or FlowOptions(check_monotone=True)
    if record is None:
        record = symmetric_solution(metric, eps, SolveOptions())
    u0 = perturb_by_eigenfunction(record, theta_fraction, well)
    dt = opts.dt if opts.dt is not None else eps * eps / 4.0
    _check_dt(dt, eps, well)
    T = opts.T if opts.T is not None else 50.0 * eps * eps
    n_steps = max(1, int(round(T / dt)))
    stride = opts.snapshot_stride or max(1, n_steps // 512)
    run = _run_flow(u0, dt, n_steps, 1, 1e-4, stride)
    trace = _trace_from_run(metric, eps, dt, run, well)
    max_seen = run[4]
    if trace.global_min_increment < -1e-10:
        raise MonotonicityViolated(
            f"smallest step increment {trace.global_min_increment:.3e} < -1e-10 "
            "(dt too large or the perturbation is not a subsolution)"
        )
    if max_seen >= 1.0:
        raise MonotonicityViolated(f"flow crossed the ordered solution: max u = {max_seen}")
    return trace


def drift_experiment(metric, eps, offset, opts=None, well=QUARTIC):
    """Flow a layer centered at s_c + offset and record its interface path.

    The trace reports whether the final interface sits closer to the center
    than the initial offset.  A layer annihilated during the run is recorded
    on the trace as interface_lost, not raised.
    """
    opts = opts or FlowOptions()
    if abs(offset) >= metric.r - 2.0 * eps:
        raise ValueError(
            f"offset {offset} leaves the layer core outside the plateau "
            f"(|offset| must stay below r - 2 eps = {metric.r - 2.0 * eps})"
        )
    root2 = math.sqrt(2.0)
    center = metric.s_c + offset
    u0 = RadialProfile(metric, eps, np.tanh((metric.s - center) / (root2 * eps)))
    dt = opts.dt if opts.dt is not None else eps * eps / 4.0
    _check_dt(dt, eps, well)
    T = opts.T if opts.T is not None else 2000.0 * eps * eps
    n_steps = max(1, int(round(T / dt)))
    stride = opts.snapshot_stride or max(1, n_steps // 512)
    run = _run_flow(u0, dt, n_steps, 2, 0.0, stride)
    trace = _trace_from_run(metric, eps, dt, run, well)
    if trace.interface_lost:
        log.info("drift run at eps=%s offset=%s lost its interface", eps, offset)
    return trace


def drift_distance_reduced(trace, metric, offset):
    """Did the run end with the interface closer to the center slice?"""
    if trace.interface_lost or math.isnan(trace.interface_s[-1]):
        return False
    return abs(trace.interface_s[-1] - metric.s_c) < abs(offset)


def comparison_check(u, v, interval):
    """Serrin-comparison audit: v > u on every node of [s1, s2].

    Requires v > 0 on the closed interval and u <= 0 at its interior
    endpoints, the discrete stand-in for u = 0 on the domain boundary; at a
    pole the nodal domain has no boundary, so no sign condition applies
    there.  Violations raise with the offending node.
    """
    if u.metric is not v.metric:
        raise ValueError("profiles must share a grid")
    s1, s2 = interval
    mask = (u.metric.s >= s1 - 1e-12) & (u.metric.s <= s2 + 1e-12)
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        raise ValueError("empty interval")
    lo, hi = int(idx[0]), int(idx[-1])
    for i in idx:
        if v.values[i] <= 0.0:
            raise PreconditionViolated(f"v is not positive at node {i}", node=int(i))
    for i in (lo, hi):
        if 0 < i < u.metric.N - 1 and u.values[i] > 0.0:
            raise PreconditionViolated(f"u is positive at endpoint node {i}", node=int(i))
    return bool(np.all(v.values[idx] > u.values[idx]))
