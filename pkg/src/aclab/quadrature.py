"""Small quadrature helpers: adaptive Simpson and composite Gauss-Legendre."""

from __future__ import annotations

import numpy as np

__all__ = ["adaptive_simpson", "gauss_legendre_cells", "kahan_cumsum"]

# 8-point Gauss-Legendre nodes/weights on [-1, 1]
_GL8_X = np.array(
    [
        -0.9602898564975363,
        -0.7966664774136267,
        -0.5255324099163290,
        -0.1834346424956498,
        0.1834346424956498,
        0.5255324099163290,
        0.7966664774136267,
        0.9602898564975363,
    ]
)
_GL8_W = np.array(
    [
        0.1012285362903763,
        0.2223810344533745,
        0.3137066458778873,
        0.3626837833783620,
        0.3626837833783620,
        0.3137066458778873,
        0.2223810344533745,
        0.1012285362903763,
    ]
)


def _simpson(f, a, fa, b, fb):
    m = 0.5 * (a + b)
    fm = f(m)
    return m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def adaptive_simpson(f, a, b, tol=1e-12, max_depth=50):
    """Integrate a smooth scalar function on [a, b] to absolute tolerance."""
    if a == b:
        return 0.0
    fa, fb = f(a), f(b)
    m, fm, whole = _simpson(f, a, fa, b, fb)
    return _adaptive(f, a, fa, b, fb, m, fm, whole, tol, max_depth)


def _adaptive(f, a, fa, b, fb, m, fm, whole, tol, depth):
    lm, flm, left = _simpson(f, a, fa, m, fm)
    rm, frm, right = _simpson(f, m, fm, b, fb)
    err = left + right - whole
    if depth <= 0 or abs(err) <= 15.0 * tol:
        return left + right + err / 15.0
    return _adaptive(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1) + _adaptive(
        f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1
    )


def gauss_legendre_cells(f, edges):
    """Per-cell 8-point Gauss-Legendre integrals of a vectorized function.

    `edges` is an increasing array of cell boundaries; returns one integral
    per cell. Machine-accurate for smooth integrands on fine cells.
    """
    edges = np.asarray(edges, dtype=float)
    lo = edges[:-1]
    half = 0.5 * (edges[1:] - lo)
    mid = lo + half
    x = mid[:, None] + half[:, None] * _GL8_X[None, :]
    vals = f(x.ravel()).reshape(x.shape)
    return half * (vals @ _GL8_W)


def kahan_cumsum(values):
    """Compensated cumulative sum; keeps accumulation error near one ulp."""
    out = np.empty(len(values))
    s = 0.0
    c = 0.0
    for i, v in enumerate(values):
        y = v - c
        t = s + y
        c = (t - s) - y
        s = t
        out[i] = s
    return out
