"""Double-well potential, radial profiles, and the discrete Allen-Cahn residual.

The residual discretizes Delta u - W'(u)/eps^2 in conservative form,
(w^(n-1) u')' / w^(n-1) evaluated with cell-midpoint weights, so that the
discrete energy gradient and the residual are the same object: the invariant
dE/du_i = -(eps A w_i^(n-1) h) r_i holds to machine precision at interior
nodes.  Poles use the removable-singularity limit Delta u = n u''.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AllZero, AsymmetricGrid, UnsupportedWell
from .geometry import unit_sphere_area
from .quadrature import adaptive_simpson

__all__ = [
    "DoubleWell",
    "QUARTIC",
    "sigma_energy",
    "heteroclinic",
    "RadialProfile",
    "ac_residual",
    "energy",
    "reflect",
    "NodalDecomposition",
    "nodal_decomposition",
    "laplacian_bands",
]


@dataclass(frozen=True)
class DoubleWell:
    """Symmetric nonnegative potential with wells at +-1.

    `quad_constant` is a C with |W'(t) - W'(s) - W''(s)(t-s)| <= C (t-s)^2 on
    [-1, 1]; for the quartic well C = 3 (half the sup of |W'''|).
    """

    name: str
    w: callable
    dw: callable
    d2w: callable
    quad_constant: float
    wells: tuple = (-1.0, 1.0)

    def scaled(self, factor):
        """Well multiplied by a positive constant (same zeros, scaled C)."""
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return DoubleWell(
            name=f"scaled-{self.name}",
            w=lambda u, f=factor: f * self.w(u),
            dw=lambda u, f=factor: f * self.dw(u),
            d2w=lambda u, f=factor: f * self.d2w(u),
            quad_constant=factor * self.quad_constant,
            wells=self.wells,
        )


QUARTIC = DoubleWell(
    name="quartic",
    w=lambda u: 0.25 * (1.0 - u * u) ** 2,
    dw=lambda u: u * u * u - u,
    d2w=lambda u: 3.0 * u * u - 1.0,
    quad_constant=3.0,
)


def sigma_energy(well=QUARTIC, tol=1e-12):
    """Heteroclinic surface tension sigma = integral of sqrt(W/2) over [-1, 1]."""
    lo, hi = well.wells
    return adaptive_simpson(lambda t: math.sqrt(max(well.w(t), 0.0) / 2.0), lo, hi, tol=tol)


def heteroclinic(t, eps, well=QUARTIC):
    """The 1D connecting layer tanh(t / (sqrt(2) eps)); quartic well only."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if well.name != "quartic":
        raise UnsupportedWell(f"no closed-form layer for well {well.name!r}")
    return math.tanh(t / (math.sqrt(2.0) * eps))


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Nodal values of a rotationally symmetric function on a metric grid."""

    metric: object
    eps: float
    values: np.ndarray

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if len(self.values) != self.metric.N:
            raise ValueError("value count does not match the grid")

    def with_values(self, values):
        return RadialProfile(self.metric, self.eps, np.asarray(values, dtype=float))


def profile_from_callable(metric, eps, fn):
    """Sample a scalar function of arclength onto the metric grid."""
    return RadialProfile(metric, eps, np.array([fn(s) for s in metric.s]))


def residual_values(metric, eps, v, well=QUARTIC):
    """Discrete residual r_i = (Delta_h v)_i - W'(v_i)/eps^2 on raw values.

    Single source of truth for the residual arithmetic: the solvers evaluate
    convergence through this exact expression.
    """
    h2 = metric.h * metric.h
    r = np.empty(metric.N)
    d = np.diff(v)
    flux = metric.cell_w * d  # w^(n-1) u' on cells
    r[1:-1] = (flux[1:] - flux[:-1]) / (metric.wn[1:-1] * h2)
    n = metric.n
    r[0] = 2.0 * n * (v[1] - v[0]) / h2
    r[-1] = 2.0 * n * (v[-2] - v[-1]) / h2
    r -= well.dw(v) / (eps * eps)
    return r


def ac_residual(u, well=QUARTIC):
    """Discrete residual of a profile at every node."""
    return residual_values(u.metric, u.eps, u.values, well)


def laplacian_bands(metric):
    """Tridiagonal bands (lower, diag, upper) of the conservative Laplacian.

    Row i applies (cell_w[i](u_{i+1}-u_i) - cell_w[i-1](u_i-u_{i-1}))/(wn_i h^2);
    pole rows use the limit n u'' with the Neumann ghost already folded in.
    """
    N = metric.N
    h2 = metric.h * metric.h
    lower = np.zeros(N)
    diag = np.zeros(N)
    upper = np.zeros(N)
    wn_int = metric.wn[1:-1]
    upper[1:-1] = metric.cell_w[1:] / (wn_int * h2)
    lower[1:-1] = metric.cell_w[:-1] / (wn_int * h2)
    diag[1:-1] = -(metric.cell_w[1:] + metric.cell_w[:-1]) / (wn_int * h2)
    n = metric.n
    diag[0], upper[0] = -2.0 * n / h2, 2.0 * n / h2
    diag[-1], lower[-1] = -2.0 * n / h2, 2.0 * n / h2
    return lower, diag, upper


def energy(u, well=QUARTIC):
    """Discrete Allen-Cahn energy vol(S^(n-1)) int (eps u'^2/2 + W(u)/eps) w^(n-1).

    Gradient part by cell midpoints, potential part by the trapezoid weights;
    this is exactly the functional whose nodal gradient reproduces ac_residual.
    """
    m = u.metric
    v = u.values
    d = np.diff(v) / m.h
    grad = 0.5 * u.eps * m.h * float(np.dot(m.cell_w, d * d))
    pot = float(np.dot(m.node_vol, well.w(v))) / u.eps
    return unit_sphere_area(m.n) * (grad + pot)


def energy_range(u, i0, i1, well=QUARTIC):
    """Energy restricted to nodes [i0, i1] (trapezoid ends at both cuts)."""
    m = u.metric
    v = u.values[i0 : i1 + 1]
    d = np.diff(v) / m.h
    grad = 0.5 * u.eps * m.h * float(np.dot(m.cell_w[i0:i1], d * d))
    c = np.ones(i1 - i0 + 1)
    c[0] = c[-1] = 0.5
    vol = m.h * m.wn[i0 : i1 + 1] * c
    pot = float(np.dot(vol, well.w(v))) / u.eps
    return unit_sphere_area(m.n) * (grad + pot)


def reflect(u):
    """Profile s -> u(2R - s); needs the center node (odd N)."""
    if u.metric.N % 2 == 0:
        raise AsymmetricGrid("reflection needs an odd node count")
    return u.with_values(u.values[::-1].copy())


@dataclass
class NodalDecomposition:
    """Maximal sign intervals of a profile and its transversal zeros."""

    intervals: list  # (s_left, s_right, sign) partitioning [0, L]
    zeros: list  # interior zero crossings by linear interpolation


def nodal_decomposition(u, tol=1e-10):
    """Split [0, L] into maximal sign intervals with |u| > tol.

    Nodes inside the tolerance band belong to the transition; a crossing is
    placed by linear interpolation between the outermost strictly signed
    nodes.  Same-signed blocks separated only by a near-zero dip are merged.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    m = u.metric
    v = u.values
    sign = np.zeros(m.N, dtype=int)
    sign[v > tol] = 1
    sign[v < -tol] = -1
    nz = np.flatnonzero(sign)
    if nz.size == 0:
        raise AllZero(f"profile is below tolerance {tol} everywhere")

    # blocks of consecutive equal signs over the strictly signed nodes
    blocks = []  # (first_idx, last_idx, sign)
    start = nz[0]
    prev = nz[0]
    cur = sign[nz[0]]
    for i in nz[1:]:
        if sign[i] != cur:
            blocks.append((start, prev, cur))
            start, cur = i, sign[i]
        prev = i
    blocks.append((start, prev, cur))

    zeros = []
    for (l0, l1, s0), (r0, r1, s1) in zip(blocks[:-1], blocks[1:]):
        # s1 == -s0 by construction of the block list
        z = m.s[l1] - v[l1] * (m.s[r0] - m.s[l1]) / (v[r0] - v[l1])
        zeros.append(float(z))

    intervals = []
    left = 0.0
    for k, (b, z) in enumerate(zip(blocks, zeros + [None])):
        right = m.L if z is None else z
        intervals.append((left, right, int(b[2])))
        left = right
    return NodalDecomposition(intervals, zeros)
