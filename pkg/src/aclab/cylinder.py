"""Oscillating-warp cylinder: critical slices of f(t) = t^6 (sin(2 pi/t) + 1) + 1.

The warp has critical points accumulating at 0 from both sides; each critical
slice of the product metric dt^2 + f(t)^2 g_round is totally geodesic, and the
second derivative certifies nondegeneracy.  There is no reflection symmetry:
the positive and mirrored negative critical sets differ.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ResolutionTooCoarse

__all__ = ["OscillatingWarpPoint", "oscillating_eval", "critical_points", "slice_minimality_check"]

# below this the oscillatory factor is damped to within one ulp of the limit
_T_TINY = 1e-8


def oscillating_eval(t):
    """(f, f', f'') of the oscillating warp at any real t.

    f'(t) = t^4 (6 t (sin + 1) - 2 pi cos) and
    f''(t) = 30 t^4 (sin + 1) - 20 pi t^3 cos - 4 pi^2 t^2 sin,
    with limit values (1, 0, 0) at t = 0.
    """
    if abs(t) <= _T_TINY:
        return 1.0, 0.0, 0.0
    theta = 2.0 * math.pi / t
    s = math.sin(theta)
    c = math.cos(theta)
    t2 = t * t
    t3 = t2 * t
    t4 = t2 * t2
    f = t4 * t2 * (s + 1.0) + 1.0
    fp = t4 * (6.0 * t * (s + 1.0) - 2.0 * math.pi * c)
    fpp = 30.0 * t4 * (s + 1.0) - 20.0 * math.pi * t3 * c - 4.0 * math.pi * math.pi * t2 * s
    return f, fp, fpp


@dataclass
class OscillatingWarpPoint:
    """A polished critical point of the warp with its nondegeneracy data."""

    t: float
    f_second: float
    nondegenerate: bool
    sin_value: float


def critical_points(t_range, resolution, nondeg_tol=1e-8):
    """All sign changes of f' in [t_lo, t_hi], polished by bisection to 1e-12.

    The scan uses steps of `resolution`; if two detected roots sit closer
    than twice that, the oscillation outruns the sampling and the scan
    raises.  A range containing 0 is truncated at +-resolution.
    """
    t_lo, t_hi = float(t_range[0]), float(t_range[1])
    if t_hi <= t_lo:
        raise ValueError("empty range")
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    # truncate away (-resolution, resolution) around the accumulation point
    pieces = []
    if t_hi > resolution and t_lo < -resolution:
        pieces = [(t_lo, -resolution), (resolution, t_hi)]
    else:
        pieces = [(max(t_lo, resolution), t_hi)] if t_hi > 0 else [(t_lo, min(t_hi, -resolution))]

    roots = []
    for lo, hi in pieces:
        if hi <= lo:
            continue
        n_steps = int(math.ceil((hi - lo) / resolution))
        prev_t = lo
        prev_fp = oscillating_eval(prev_t)[1]
        for k in range(1, n_steps + 1):
            t = min(lo + k * resolution, hi)
            fp = oscillating_eval(t)[1]
            if fp == 0.0:
                roots.append(t)
            elif prev_fp == 0.0:
                pass  # exact root already recorded at the previous step
            elif (prev_fp < 0.0) != (fp < 0.0):
                roots.append(_bisect_root(prev_t, prev_fp, t, fp))
            prev_t, prev_fp = t, fp

    for a, b in zip(roots, roots[1:]):
        if abs(b - a) < 2.0 * resolution:
            raise ResolutionTooCoarse(
                f"adjacent roots {a} and {b} closer than twice the resolution {resolution}"
            )

    out = []
    for t in sorted(roots, reverse=True):
        _, _, fpp = oscillating_eval(t)
        theta = 2.0 * math.pi / t
        out.append(
            OscillatingWarpPoint(
                t=t,
                f_second=fpp,
                nondegenerate=abs(fpp) > nondeg_tol,
                sin_value=math.sin(theta),
            )
        )
    return out


def _bisect_root(lo, f_lo, hi, f_hi):
    for _ in range(200):
        if hi - lo <= 1e-12:
            break
        mid = 0.5 * (lo + hi)
        f_mid = oscillating_eval(mid)[1]
        if f_mid == 0.0:
            return mid
        if (f_mid < 0.0) == (f_lo < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    return 0.5 * (lo + hi)


def slice_minimality_check(t_star):
    """|f'(t*)|: the mean-curvature proxy of the slice, zero iff totally geodesic."""
    return abs(oscillating_eval(t_star)[1])
