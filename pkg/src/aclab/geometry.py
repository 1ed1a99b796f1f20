"""Capped-cylinder metrics on S^n built from a compactly supported bump.

The warp profile rho is the primitive of the bump phi(x) = exp(-x^2/(a^2-x^2)),
with the support radius a normalized so that rho == 1 from x = a on.  Doubling
rho across the far end of a cylinder of half-length R = a + r produces a
rotationally symmetric metric on the sphere: two nonnegatively curved caps
joined by an exact product cylinder (the plateau), every slice of which is a
totally geodesic round sphere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import NoBracket, OutOfDomain
from .quadrature import adaptive_simpson, gauss_legendre_cells, kahan_cumsum

__all__ = [
    "BumpParams",
    "bump_eval",
    "bump_integral",
    "solve_bump_constant",
    "SphereMetric",
    "CurvatureReport",
    "warp_eval",
    "curvature_report",
    "slice_area",
    "unit_sphere_area",
    "cap_comparison",
]

# exp(-q) underflows to zero well before q reaches this; avoids inf*0 in the
# derivative prefactors as x -> a.
_Q_CUTOFF = 700.0

_TABLE_CELLS = 16384


@dataclass(frozen=True)
class BumpParams:
    """Support radius a of the bump, normalized so its integral is one."""

    a: float

    def __post_init__(self):
        if not 1.0 < self.a < 2.0:
            raise ValueError(f"bump radius must lie in (1, 2), got {self.a}")


def bump_eval(x, bump):
    """Evaluate (phi, phi', phi'') at x >= 0; closed-form derivatives.

    Works on scalars and arrays.  All three components vanish identically for
    x >= a and join the interior branch to machine accuracy.
    """
    a = bump.a
    if isinstance(x, (float, int)):
        # scalar fast path: quadrature and ODE kernels hit this in tight loops
        if x >= a:
            return 0.0, 0.0, 0.0
        denom = a * a - x * x
        q = x * x / denom
        if q >= _Q_CUTOFF:
            return 0.0, 0.0, 0.0
        e = math.exp(-q)
        dq = 2.0 * a * a * x / (denom * denom)
        d2q = 2.0 * a * a * (a * a + 3.0 * x * x) / (denom * denom * denom)
        return e, -dq * e, (dq * dq - d2q) * e
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr)

    phi = np.zeros_like(x_arr)
    dphi = np.zeros_like(x_arr)
    d2phi = np.zeros_like(x_arr)

    inside = x_arr < a
    xi = x_arr[inside]
    denom = a * a - xi * xi
    q = xi * xi / denom
    live = q < _Q_CUTOFF
    xi, denom, q = xi[live], denom[live], q[live]

    e = np.exp(-q)
    dq = 2.0 * a * a * xi / (denom * denom)
    d2q = 2.0 * a * a * (a * a + 3.0 * xi * xi) / (denom * denom * denom)

    idx = np.flatnonzero(inside)[live]
    phi[idx] = e
    dphi[idx] = -dq * e
    d2phi[idx] = (dq * dq - d2q) * e

    if scalar:
        return float(phi[0]), float(dphi[0]), float(d2phi[0])
    return phi, dphi, d2phi


def bump_integral(a):
    """Integral of phi(.; a) over [0, a] by adaptive Simpson."""
    bump = BumpParams(a)

    def f(x):
        return bump_eval(x, bump)[0]

    return adaptive_simpson(f, 0.0, a, tol=1e-14)


def solve_bump_constant(tol=1e-10):
    """Find the support radius a in (1, 2) with integral of phi equal to 1.

    Bisection down to a 1e-6 bracket, then secant polish; the residual of the
    returned root is driven to ~1e-14 regardless of `tol` (which only sets the
    guaranteed upper bound).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")

    def g(a):
        return bump_integral(a) - 1.0

    lo, hi = 1.0 + 1e-9, 2.0 - 1e-9
    glo, ghi = g(lo), g(hi)
    if glo * ghi > 0:
        raise NoBracket(
            f"integral map does not straddle 1 on (1,2): g({lo})={glo}, g({hi})={ghi}"
        )
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if glo * gm <= 0:
            hi, ghi = mid, gm
        else:
            lo, glo = mid, gm

    a0, a1 = lo, hi
    g0, g1 = glo, ghi
    for _ in range(60):
        if g1 == g0:
            break
        a2 = a1 - g1 * (a1 - a0) / (g1 - g0)
        a0, g0 = a1, g1
        a1, g1 = a2, g(a2)
        if abs(g1) <= 1e-14:
            break
    if abs(g1) > min(tol, 1e-12):
        raise NoBracket(f"secant polish stalled at residual {g1}")
    return BumpParams(a1)


@lru_cache(maxsize=4)
def _default_bump(tol=1e-10):
    return solve_bump_constant(tol)


@lru_cache(maxsize=8)
def _warp_table(a):
    """Cumulative primitive of phi on a fine uniform grid over [0, a].

    Gauss-Legendre per cell plus compensated summation; cubic Hermite
    interpolation with the exact derivative phi reproduces rho to ~1e-15.
    """
    bump = BumpParams(a)
    edges = np.linspace(0.0, a, _TABLE_CELLS + 1)
    cells = gauss_legendre_cells(lambda x: bump_eval(x, bump)[0], edges)
    rho = np.empty(_TABLE_CELLS + 1)
    rho[0] = 0.0
    rho[1:] = kahan_cumsum(cells)
    phi = bump_eval(edges, bump)[0]
    return edges, rho, phi


def _rho_eval(a, x):
    """rho(x) for x in [0, a] via the cached Hermite table (scalar or array)."""
    edges, rho, phi = _warp_table(a)
    dx = edges[1]
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    j = np.clip((x_arr / dx).astype(int), 0, _TABLE_CELLS - 1)
    t = (x_arr - edges[j]) / dx
    t2 = t * t
    t3 = t2 * t
    h00 = 2 * t3 - 3 * t2 + 1
    h10 = t3 - 2 * t2 + t
    h01 = -2 * t3 + 3 * t2
    h11 = t3 - t2
    out = h00 * rho[j] + h10 * dx * phi[j] + h01 * rho[j + 1] + h11 * dx * phi[j + 1]
    if np.ndim(x) == 0:
        return float(out[0])
    return out


class SphereMetric:
    """Doubled warped-product metric on S^n in the arclength coordinate.

    Nodes cover [0, L] with L = 2R and R = a + r; the plateau [a, 2R - a] is
    an exact product cylinder (w, w', w'') = (1, 0, 0).  Node and cell arrays
    are built on the first half and mirrored, so reflection symmetry holds to
    the bit.
    """

    def __init__(self, n=3, r=3.0, N=1025, bump=None):
        if not isinstance(n, int) or not 3 <= n <= 16:
            raise ValueError(f"dimension n must be an integer in [3, 16], got {n}")
        if r < 0:
            raise ValueError(f"cylinder half-length r must be >= 0, got {r}")
        if not isinstance(N, int) or N < 64:
            raise ValueError(f"node count N must be an integer >= 64, got {N}")
        self.n = n
        self.r = float(r)
        self.N = N
        self.bump = bump if bump is not None else _default_bump()
        self.a = self.bump.a
        self.R = self.a + self.r
        self.L = 2.0 * self.R
        self.h = self.L / (N - 1)
        self.s = np.linspace(0.0, self.L, N)
        self.s_c = self.R

        self.w, self.wp, self.wpp = self._node_arrays()
        self.wn = self.w ** (n - 1)
        self.cell_w = self._cell_weights()
        # node volume weights: trapezoid in s against w^(n-1)
        c = np.ones(N)
        c[0] = c[-1] = 0.5
        self.node_vol = self.h * self.wn * c
        # eigenproblem mass at the poles consistent with the n*u'' limit
        self.pole_mass = self.cell_w[0] * self.h / (2.0 * n)

    # -- construction helpers -------------------------------------------------

    def _half_eval(self, x):
        """(w, w', w'') at arclength x in [0, R] on the first half."""
        if x >= self.a:
            return 1.0, 0.0, 0.0
        phi, dphi, _ = bump_eval(x, self.bump)
        return _rho_eval(self.a, x), phi, dphi

    def _node_arrays(self):
        N = self.N
        w = np.empty(N)
        wp = np.empty(N)
        wpp = np.empty(N)
        half = (N + 1) // 2
        cap = self.s[:half] < self.a
        xcap = self.s[:half][cap]
        w[:half] = 1.0
        wp[:half] = 0.0
        wpp[:half] = 0.0
        if xcap.size:
            phi, dphi, _ = bump_eval(xcap, self.bump)
            w[:half][cap] = _rho_eval(self.a, xcap)
            wp[:half][cap] = phi
            wpp[:half][cap] = dphi
        # mirror: w even about the center, w' odd, w'' even
        w[N - half :] = w[:half][::-1]
        wp[N - half :] = -wp[:half][::-1]
        wpp[N - half :] = wpp[:half][::-1]
        return w, wp, wpp

    def _cell_weights(self):
        """w(midpoint)^(n-1) per cell, mirrored exactly."""
        N = self.N
        mids = 0.5 * (self.s[:-1] + self.s[1:])
        m = N - 1
        half = (m + 1) // 2
        vals = np.ones(half)
        for j in range(half):
            x = mids[j]
            if x < self.a:
                vals[j] = _rho_eval(self.a, x)
        cw = np.empty(m)
        cw[:half] = vals ** (self.n - 1)
        cw[m - half :] = cw[:half][::-1]
        return cw

    # -- queries ---------------------------------------------------------------

    @property
    def plateau(self):
        return self.a, self.L - self.a

    @property
    def has_center_node(self):
        return self.N % 2 == 1

    @property
    def center_index(self):
        return (self.N - 1) // 2

    def __repr__(self):
        return f"SphereMetric(n={self.n}, r={self.r}, N={self.N}, a={self.a:.6f})"


def warp_eval(metric, s):
    """Doubled warp (w, w', w'') at any arclength s in [0, L]."""
    if not 0.0 <= s <= metric.L:
        raise OutOfDomain(f"s={s} outside [0, {metric.L}]")
    if s <= metric.R:
        w, wp, wpp = metric._half_eval(s)
        return w, wp, wpp
    w, wp, wpp = metric._half_eval(metric.L - s)
    return w, -wp, wpp


@dataclass
class CurvatureReport:
    """Pointwise Ricci eigenvalues and scalar curvature on the grid."""

    s: np.ndarray
    w: np.ndarray
    w_prime: np.ndarray
    w_second: np.ndarray
    ricci_radial: np.ndarray
    ricci_tangential: np.ndarray
    scalar: np.ndarray
    pole_value: float  # common limit (n-1) * 2/a^2 of both Ricci fields


def curvature_report(metric):
    """Ricci eigenvalues -(n-1)w''/w and (n-2)(1-w'^2)/w^2 - w''/w, and scalar.

    Pole rows carry the series limits; near-pole nodes evaluate (1-w'^2)
    through expm1 to dodge the cancellation in 1 - phi^2.
    """
    n = metric.n
    a = metric.a
    N = metric.N
    s = metric.s
    w, wp, wpp = metric.w, metric.wp, metric.wpp

    radial = np.zeros(N)
    tangential = np.full(N, float(n - 2))

    x = np.minimum(s, metric.L - s)
    cap = (x < a) & (x > 0.0)
    xc = x[cap]
    denom = a * a - xc * xc
    q = xc * xc / denom
    phi = np.abs(wp[cap])  # |w'| = phi(x) on the caps
    one_minus_phi2 = -np.expm1(-q) * (1.0 + phi)

    radial[cap] = -(n - 1) * wpp[cap] / w[cap]
    tangential[cap] = (n - 2) * one_minus_phi2 / (w[cap] * w[cap]) - wpp[cap] / w[cap]

    pole = (n - 1) * 2.0 / (a * a)
    for i in (0, N - 1):
        radial[i] = pole
        tangential[i] = pole

    # scalar = -2(n-1) w''/w + (n-1)(n-2)(1-w'^2)/w^2
    scalar = np.full(N, float((n - 1) * (n - 2)))
    scalar[cap] = (
        -2.0 * (n - 1) * wpp[cap] / w[cap]
        + (n - 1) * (n - 2) * one_minus_phi2 / (w[cap] * w[cap])
    )
    scalar[0] = scalar[N - 1] = (n - 1) * n * 2.0 / (a * a)

    return CurvatureReport(s, w, wp, wpp, radial, tangential, scalar, pole)


def unit_sphere_area(n):
    """Round volume of S^(n-1): 2 pi^(n/2) / Gamma(n/2), exact for n <= 16."""
    if not isinstance(n, int) or not 2 <= n <= 16:
        raise ValueError(f"need an integer dimension in [2, 16], got {n}")
    if n % 2 == 0:
        k = n // 2
        return 2.0 * math.pi**k / math.factorial(k - 1)
    k = (n - 1) // 2
    # Gamma(k + 1/2) = (2k)! sqrt(pi) / (4^k k!)
    gamma_half = math.factorial(2 * k) * math.sqrt(math.pi) / (4.0**k * math.factorial(k))
    return 2.0 * math.pi ** (n / 2.0) / gamma_half


def slice_area(metric, s):
    """Area of the coordinate slice {s = const}: w(s)^(n-1) vol(S^(n-1))."""
    w, _, _ = warp_eval(metric, s)
    return w ** (metric.n - 1) * unit_sphere_area(metric.n)


def cap_comparison(samples=2048, bump=None):
    """Sample f(b) = rho(a - pi/2 + b) - sin(b) on [0, pi/2].

    f >= 0 certifies that the cap profile rides above the round half-sphere
    of the same boundary; returns (min over samples, endpoint value) plus the
    sampled arrays for export.
    """
    if samples < 16:
        raise ValueError("need at least 16 samples")
    bump = bump if bump is not None else _default_bump()
    a = bump.a
    b = np.linspace(0.0, math.pi / 2.0, samples)
    x = a - math.pi / 2.0 + b
    f = _rho_eval(a, np.minimum(x, a)) - np.sin(b)
    # x stays below a except at the right endpoint where rho(a) = 1 exactly
    return float(f.min()), float(f[-1]), b, f
