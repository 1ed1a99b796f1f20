"""Steady solutions of the radial Allen-Cahn equation.

Builds the half-sphere Dirichlet minimizer, its odd reflection (the symmetric
solution vanishing exactly on the middle slice), damped Newton solves on the
full sphere, warm-started continuation in epsilon, and a shooting census of
radial solutions.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from . import _kernels
from .errors import (
    AsymmetricGrid,
    NoConvergence,
    SingularJacobian,
    TrivialMinimizer,
    UnsupportedWell,
)
from .field import (
    QUARTIC,
    RadialProfile,
    ac_residual,
    energy,
    laplacian_bands,
    nodal_decomposition,
    residual_values,
)
from .errors import AllZero
from .geometry import _warp_table

log = logging.getLogger(__name__)

__all__ = [
    "SolveOptions",
    "SolutionRecord",
    "newton_solve",
    "minimize_dirichlet_half",
    "symmetric_solution",
    "continuation",
    "shooting_scan",
    "default_alpha_grid",
]


@dataclass(frozen=True)
class SolveOptions:
    """Newton and descent controls shared by the steady solvers.

    The default tolerance leaves headroom over the rounding floor of the
    residual evaluation, which scales like 1e-16 / h^2.
    """

    tolerance: float = 1e-10
    max_iterations: int = 60
    damping_factor: float = 0.5
    max_halvings: int = 20
    gd_iterations: int = 300
    eps_schedule: tuple | None = None

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass
class SolutionRecord:
    """A converged steady solution plus its audit quantities."""

    profile: RadialProfile
    residual_norm: float
    energy: float
    nodal: object  # NodalDecomposition, or None for the zero solution
    provenance: str
    alpha_seed: float | None = None

    @property
    def zeros(self):
        return [] if self.nodal is None else list(self.nodal.zeros)


def _solve_tridiag(lower, diag, upper, rhs):
    n = len(diag)
    ab = np.zeros((3, n))
    ab[0, 1:] = upper[:-1]
    ab[1, :] = diag
    ab[2, :-1] = lower[1:]
    try:
        return solve_banded((1, 1), ab, rhs)
    except LinAlgError as exc:
        raise SingularJacobian(str(exc)) from exc


def _newton_banded(metric, values, eps, well, bands, opts, label):
    """Damped Newton on r(u) = Lap u - W'(u)/eps^2 = 0 on the full grid.

    Backtracking halves the step until the sup residual strictly decreases.
    Returns the converged vector; the residual history goes to the debug log.
    """
    lower, diag, upper = bands
    inv_eps2 = 1.0 / (eps * eps)
    u = values.copy()
    r = residual_values(metric, eps, u, well)
    norm = float(np.max(np.abs(r)))
    history = [norm]
    for it in range(opts.max_iterations):
        if norm <= opts.tolerance:
            log.debug("%s newton converged in %d iterations: %s", label, it, history)
            return u, norm, it
        jac_diag = diag - well.d2w(u) * inv_eps2
        delta = _solve_tridiag(lower, jac_diag, upper, -r)
        lam = 1.0
        for _ in range(opts.max_halvings + 1):
            trial = u + lam * delta
            r_trial = residual_values(metric, eps, trial, well)
            norm_trial = float(np.max(np.abs(r_trial)))
            if norm_trial < norm:
                break
            lam *= opts.damping_factor
        else:
            raise NoConvergence(
                f"{label}: damping exhausted at iteration {it}, residual {norm:.3e}"
            )
        u, r, norm = trial, r_trial, norm_trial
        history.append(norm)
    if norm <= opts.tolerance:
        log.debug("%s newton converged at budget: %s", label, history)
        return u, norm, opts.max_iterations
    raise NoConvergence(f"{label}: residual {norm:.3e} after {opts.max_iterations} iterations")


def _make_record(metric, eps, values, well, opts, provenance, alpha_seed=None, half=False):
    profile = RadialProfile(metric, eps, values)
    r = ac_residual(profile, well)
    norm = float(np.max(np.abs(r)))
    if norm > opts.tolerance:
        raise NoConvergence(f"{provenance}: final residual {norm:.3e} exceeds tolerance")
    try:
        nodal = nodal_decomposition(profile)
    except AllZero:
        nodal = None
    e = energy(profile, well)
    if half:
        e *= 0.5
    return SolutionRecord(profile, norm, e, nodal, provenance, alpha_seed)


def newton_solve(initial, opts=None, well=QUARTIC, provenance="newton"):
    """Damped Newton on the full-sphere discrete residual from a seed profile."""
    opts = opts or SolveOptions()
    if not np.all(np.isfinite(initial.values)):
        raise ValueError("initial profile must be finite")
    metric, eps = initial.metric, initial.eps
    bands = laplacian_bands(metric)
    u, _, _ = _newton_banded(metric, initial.values, eps, well, bands, opts, provenance)
    return _make_record(metric, eps, u, well, opts, provenance)


def _half_bands(metric):
    """Bands of the Laplacian restricted to nodes [0, mid-1], Dirichlet at mid."""
    lower, diag, upper = laplacian_bands(metric)
    mid = metric.center_index
    return lower[:mid].copy(), diag[:mid].copy(), upper[:mid].copy()


def _odd_extension(metric, u_half):
    """Full-grid values of the odd reflection of the half profile."""
    values = np.zeros(metric.N)
    mid = metric.center_index
    values[:mid] = u_half
    values[mid + 1 :] = -u_half[::-1]
    return values


def _half_residual(metric, eps, u_half, well):
    # evaluated through the odd extension so the arithmetic matches the
    # full-grid residual bit for bit (the center row vanishes identically)
    values = _odd_extension(metric, u_half)
    return residual_values(metric, eps, values, well)[: len(u_half)]


def minimize_dirichlet_half(metric, eps, opts=None, well=QUARTIC):
    """Nonnegative minimizer of the energy on [0, s_c] with u(s_c) = 0.

    Projected semi-implicit descent (values clamped to [0, 1]) from a clamped
    layer ansatz, then Newton polish of the half-domain system.  The returned
    record carries the odd extension across the center node, which solves the
    full discrete system exactly; its energy field is the half-domain energy.
    """
    opts = opts or SolveOptions()
    if not metric.has_center_node:
        raise AsymmetricGrid("half-domain minimization needs a center node (odd N)")
    if eps <= 0:
        raise ValueError("eps must be positive")
    mid = metric.center_index
    root2 = math.sqrt(2.0)
    u = np.tanh((metric.s_c - metric.s[:mid]) / (root2 * eps))
    u = np.clip(u, 0.0, 1.0)

    bands = _half_bands(metric)
    lower, diag, upper = bands
    dt = eps * eps / 4.0
    step_lower = -dt * lower
    step_diag = 1.0 - dt * diag
    step_upper = -dt * upper
    inv_eps2 = 1.0 / (eps * eps)
    prev = u
    for _ in range(opts.gd_iterations):
        rhs = u - dt * well.dw(u) * inv_eps2
        u = _solve_tridiag(step_lower, step_diag, step_upper, rhs)
        np.clip(u, 0.0, 1.0, out=u)
        if float(np.max(np.abs(u - prev))) <= 1e-12:
            break
        prev = u

    u, _, _ = _newton_banded_half(u, metric, eps, well, bands, opts)
    if float(np.max(np.abs(u))) <= 1e-6:
        raise TrivialMinimizer(
            f"half minimizer collapsed to zero at eps={eps} (below the bifurcation threshold)"
        )
    return _make_record(metric, eps, _odd_extension(metric, u), well, opts, "minimizer", half=True)


def _newton_banded_half(u_half, metric, eps, well, bands, opts):
    lower, diag, upper = bands
    inv_eps2 = 1.0 / (eps * eps)
    u = u_half.copy()
    r = _half_residual(metric, eps, u, well)
    norm = float(np.max(np.abs(r)))
    history = [norm]
    for it in range(opts.max_iterations):
        if norm <= opts.tolerance:
            log.debug("half newton converged in %d iterations: %s", it, history)
            return u, norm, it
        jac_diag = diag - well.d2w(u) * inv_eps2
        delta = _solve_tridiag(lower, jac_diag, upper, -r)
        lam = 1.0
        for _ in range(opts.max_halvings + 1):
            trial = u + lam * delta
            r_trial = _half_residual(metric, eps, trial, well)
            norm_trial = float(np.max(np.abs(r_trial)))
            if norm_trial < norm:
                break
            lam *= opts.damping_factor
        else:
            raise NoConvergence(f"half newton: damping exhausted at iteration {it}")
        u, r, norm = trial, r_trial, norm_trial
        history.append(norm)
    if norm <= opts.tolerance:
        return u, norm, opts.max_iterations
    raise NoConvergence(f"half newton: residual {norm:.3e} after {opts.max_iterations} iterations")


def symmetric_solution(metric, eps, opts=None, well=QUARTIC):
    """The antisymmetric solution vanishing exactly on the middle slice.

    Odd reflection of the half minimizer followed by a full-sphere Newton
    polish; antisymmetry survives the polish to solver rounding because the
    discrete operator commutes with the reflection.
    """
    opts = opts or SolveOptions()
    seed = minimize_dirichlet_half(metric, eps, opts, well)
    rec = newton_solve(seed.profile, opts, well, provenance="minimizer")
    return rec


def continuation(metric, eps_schedule, opts=None, initial=None, well=QUARTIC):
    """Warm-started Newton chain along a strictly decreasing epsilon schedule."""
    opts = opts or SolveOptions()
    schedule = list(eps_schedule)
    if not schedule:
        raise ValueError("schedule must be nonempty")
    if any(e <= 0 for e in schedule):
        raise ValueError("schedule entries must be positive")
    if any(b >= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("schedule must be strictly decreasing")
    records = []
    current = initial
    for eps in schedule:
        try:
            if current is None:
                rec = symmetric_solution(metric, eps, opts, well)
            else:
                seed = RadialProfile(metric, eps, current.profile.values.copy())
                rec = newton_solve(seed, opts, well, provenance="continuation")
        except NoConvergence as exc:
            raise NoConvergence(f"continuation failed at eps={eps}: {exc}") from exc
        records.append(rec)
        current = rec
    return records


def default_alpha_grid(count=400, edge=1e-7):
    """tanh-spaced shooting grid over (-1, 1).

    Solutions leave the poles exponentially close to the wells, so the grid
    must resolve basins of width ~exp(-sqrt(2) s_c / eps) next to +-1; a
    uniform grid cannot.
    """
    tau = math.atanh(1.0 - edge)
    return np.tanh(np.linspace(-tau, tau, count))


def shooting_scan(metric, eps, alpha_grid, opts=None, well=QUARTIC, blowups=None):
    """Census of radial solutions by shooting from the pole.

    Integrates u(0) = alpha, u'(0) = 0 for every alpha.  Trajectories leaving
    |u| <= 2 blow up through the anti-damped far cap; their exit direction
    extends the mismatch sign, so adjacent grid points of opposite extended
    sign bracket a separatrix.  Each bracket is bisected until a bounded shot
    appears, which seeds a Newton polish; the deduplicated records form the
    census.  Blowup alphas from the scan grid are appended to `blowups`.
    """
    opts = opts or SolveOptions()
    if well.name != "quartic":
        raise UnsupportedWell("shooting kernel is specialized to the quartic well")
    alphas = [float(x) for x in alpha_grid]
    if not alphas:
        return []
    if any(not -1.0 < x < 1.0 for x in alphas):
        raise ValueError("alpha grid must lie in (-1, 1)")
    alphas = sorted(alphas)

    edges, rho, phi = _warp_table(metric.a)
    dx = edges[1]
    stride = 4
    h_ode = metric.h / stride
    end_cells = max(1, metric.n // 2)

    def run(alpha):
        nodes = np.empty(metric.N)
        mismatch, blown = _kernels.shoot(
            alpha,
            eps,
            float(metric.n),
            metric.a,
            metric.R,
            metric.L,
            h_ode,
            rho,
            phi,
            dx,
            nodes,
            stride,
            end_cells,
        )
        return mismatch, blown, nodes

    signs = np.zeros(len(alphas))
    regular = {}
    for i, alpha in enumerate(alphas):
        mm, blown, nodes = run(alpha)
        signs[i] = math.copysign(1.0, mm) if mm != 0.0 else 0.0
        if blown:
            if blowups is not None:
                blowups.append(alpha)
        else:
            regular[i] = (mm, nodes)

    def refine(lo, s_lo, hi, s_hi):
        """Bisect a sign-change bracket down to a bounded, small-mismatch shot."""
        best = None
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            mm, blown, nodes = run(mid)
            if not blown and (best is None or abs(mm) < best[0]):
                best = (abs(mm), mid, nodes)
            s_mid = math.copysign(1.0, mm) if mm != 0.0 else 0.0
            if s_mid == 0.0:
                return mid, nodes
            if s_mid == s_lo:
                lo = mid
            else:
                hi = mid
            if best is not None and best[0] <= 1e-9:
                break
        if best is None:
            return None
        return best[1], best[2]

    candidates = []
    for i, alpha in enumerate(alphas):
        if signs[i] == 0.0 and i in regular:
            candidates.append((alpha, regular[i][1]))
    for i in range(len(alphas) - 1):
        if signs[i] != 0.0 and signs[i + 1] != 0.0 and signs[i] != signs[i + 1]:
            if i in regular and abs(regular[i][0]) <= 1e-9:
                candidates.append((alphas[i], regular[i][1]))
                continue
            hit = refine(alphas[i], signs[i], alphas[i + 1], signs[i + 1])
            if hit is not None:
                candidates.append(hit)

    census = []
    for alpha_star, nodes in candidates:
        seed = RadialProfile(metric, eps, nodes)
        try:
            rec = newton_solve(seed, opts, well, provenance="shooting")
        except (NoConvergence, SingularJacobian) as exc:
            log.debug("shooting polish failed at alpha=%s: %s", alpha_star, exc)
            continue
        rec.alpha_seed = alpha_star
        if any(
            float(np.max(np.abs(rec.profile.values - kept.profile.values))) <= 1e-6
            for kept in census
        ):
            continue
        census.append(rec)
    return census
