"""Compiled inner loops: semi-implicit flow stepping and radial shooting.

Everything here is specialized to the quartic well W'(u) = u^3 - u; the
public modules fall back to generic numpy paths for other potentials.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["thomas_factor", "flow_loop", "shoot", "sturm_count"]


@njit(cache=True)
def thomas_factor(lower, diag, upper):
    """LU factors (beta, gamma) of a tridiagonal, no pivoting.

    Valid for the diagonally dominant matrices I - dt*Lap used by the flow.
    """
    n = diag.shape[0]
    beta = np.empty(n)
    gamma = np.empty(n)
    beta[0] = diag[0]
    gamma[0] = upper[0] / beta[0]
    for i in range(1, n - 1):
        beta[i] = diag[i] - lower[i] * gamma[i - 1]
        gamma[i] = upper[i] / beta[i]
    beta[n - 1] = diag[n - 1] - lower[n - 1] * gamma[n - 2]
    return beta, gamma


@njit(cache=True)
def _thomas_solve(lower, beta, gamma, rhs, out):
    n = rhs.shape[0]
    out[0] = rhs[0] / beta[0]
    for i in range(1, n):
        out[i] = (rhs[i] - lower[i] * out[i - 1]) / beta[i]
    for i in range(n - 2, -1, -1):
        out[i] = out[i] - gamma[i] * out[i + 1]


@njit(cache=True)
def flow_loop(
    u,
    lower,
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
):
    """Run semi-implicit steps (I - dt Lap) u+ = u - c (u^3 - u) in place.

    stop_mode: 0 none, 1 stop when sup|u - 1| <= stop_target, 2 stop when the
    profile becomes single-signed.  Returns (steps_done, status, global
    minimum step increment, maximum value seen).  Snapshots are written every
    `stride` steps starting at step 0; snap_min_inc[k] is the smallest nodal
    increment since the previous snapshot.
    """
    n = u.shape[0]
    rhs = np.empty(n)
    unew = np.empty(n)
    global_min_inc = np.inf
    window_min_inc = np.inf
    max_seen = u[0]
    for i in range(n):
        if u[i] > max_seen:
            max_seen = u[i]
    snap_idx = 0
    snaps[0, :] = u
    snap_steps[0] = 0
    snap_min_inc[0] = 0.0
    snap_idx = 1
    status = 0
    step = 0
    while step < n_steps:
        for i in range(n):
            ui = u[i]
            rhs[i] = ui - c_react * (ui * ui * ui - ui)
        _thomas_solve(lower, beta, gamma, rhs, unew)
        for i in range(n):
            inc = unew[i] - u[i]
            if inc < window_min_inc:
                window_min_inc = inc
            if inc < global_min_inc:
                global_min_inc = inc
            u[i] = unew[i]
            if u[i] > max_seen:
                max_seen = u[i]
        step += 1
        take_snap = (step % stride == 0) or (step == n_steps)
        done = False
        if stop_mode == 1:
            sup = 0.0
            for i in range(n):
                d = abs(u[i] - 1.0)
                if d > sup:
                    sup = d
            if sup <= stop_target:
                status = 1
                done = True
        elif stop_mode == 2:
            pos = False
            neg = False
            for i in range(n):
                if u[i] > 0.0:
                    pos = True
                elif u[i] < 0.0:
                    neg = True
            if not (pos and neg):
                status = 2
                done = True
        if take_snap or done:
            if snap_idx < snaps.shape[0]:
                snaps[snap_idx, :] = u
                snap_steps[snap_idx] = step
                snap_min_inc[snap_idx] = window_min_inc
                snap_idx += 1
            window_min_inc = np.inf
        if done:
            break
    return step, status, global_min_inc, max_seen, snap_idx


@njit(cache=True)
def _warp_pair(s, a, R, L, rho, phi, dx):
    """(w, w') of the doubled warp; Hermite table on the cap, 1 on the plateau."""
    if s > R:
        x = L - s
        flip = -1.0
    else:
        x = s
        flip = 1.0
    if x >= a:
        return 1.0, 0.0
    j = int(x / dx)
    last = rho.shape[0] - 2
    if j > last:
        j = last
    t = (x - j * dx) / dx
    t2 = t * t
    t3 = t2 * t
    w = (
        (2 * t3 - 3 * t2 + 1) * rho[j]
        + (t3 - 2 * t2 + t) * dx * phi[j]
        + (-2 * t3 + 3 * t2) * rho[j + 1]
        + (t3 - t2) * dx * phi[j + 1]
    )
    return w, flip * phi_of(x, a)


@njit(cache=True)
def phi_of(x, a):
    if x >= a:
        return 0.0
    denom = a * a - x * x
    q = x * x / denom
    if q >= 700.0:
        return 0.0
    return np.exp(-q)


@njit(cache=True)
def _rhs(s, uu, vv, n, eps2, a, R, L, rho, phi, dx):
    w, wp = _warp_pair(s, a, R, L, rho, phi, dx)
    drift = (n - 1.0) * wp / w
    return vv, (uu * uu * uu - uu) / eps2 - drift * vv


@njit(cache=True)
def shoot(alpha, eps, n, a, R, L, h_ode, rho, phi, dx, nodes, node_stride, end_cells):
    """RK4 integration of the radial equation from the pole with u(0) = alpha.

    Series start u = alpha + W'(alpha) s^2 / (2 n eps^2) at s = h_ode; the
    mismatch is u'(L) continued through the far pole by the same series.
    Integration stops `end_cells` micro-steps short of L so the drift term
    (n-1) w'/w stays inside the RK4 stability region at the stages.
    Returns (mismatch, blown) and fills `nodes` with u at the grid nodes
    (every `node_stride` RK4 steps).
    """
    eps2 = eps * eps
    dwa = alpha * alpha * alpha - alpha
    s = h_ode
    u = alpha + dwa * s * s / (2.0 * n * eps2)
    v = dwa * s / (n * eps2)
    nodes[0] = alpha
    n_steps = node_stride * (nodes.shape[0] - 1) - 1 - end_cells
    blown = False
    for k in range(1, n_steps + 1):
        k1u, k1v = _rhs(s, u, v, n, eps2, a, R, L, rho, phi, dx)
        half = 0.5 * h_ode
        k2u, k2v = _rhs(s + half, u + half * k1u, v + half * k1v, n, eps2, a, R, L, rho, phi, dx)
        k3u, k3v = _rhs(s + half, u + half * k2u, v + half * k2v, n, eps2, a, R, L, rho, phi, dx)
        k4u, k4v = _rhs(s + h_ode, u + h_ode * k3u, v + h_ode * k3v, n, eps2, a, R, L, rho, phi, dx)
        u = u + h_ode / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v = v + h_ode / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        s = s + h_ode
        if abs(u) > 2.0:
            blown = True
            break
        if (k + 1) % node_stride == 0:
            j = (k + 1) // node_stride
            if j < nodes.shape[0]:
                nodes[j] = u
    if blown:
        # exit value carries the blowup direction for separatrix bracketing
        return u, True
    # continue to the far pole: u'(L - z) ~ -W'(u(L)) z / (n eps^2)
    z = end_cells * h_ode
    mismatch = v + (u * u * u - u) * z / (n * eps2)
    nodes[nodes.shape[0] - 1] = u + 0.5 * v * z
    return mismatch, False


@njit(cache=True)
def sturm_count(d, e, lam):
    """Number of eigenvalues of the symmetric tridiagonal (d, e) below lam."""
    n = d.shape[0]
    count = 0
    t = d[0] - lam
    if t < 0.0:
        count += 1
    for i in range(1, n):
        if t == 0.0:
            t = 1e-300
        t = d[i] - lam - e[i - 1] * e[i - 1] / t
        if t < 0.0:
            count += 1
    return count
