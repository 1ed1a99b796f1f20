"""Spectra of the linearized operator and of the slice Jacobi operator.

Each spherical-harmonic mode k contributes the radial pencil

    -(w^(n-1) psi')' / w^(n-1) + [mu_k / w^2 + W''(u)/eps^2] psi = lambda psi

in the volume-weighted inner product, discretized with the same conservative
stencil as the Allen-Cahn residual (so the mode-0 operator is exactly minus
the Newton Jacobian).  Eigenvalues come from bisection on the Sturm sequence
of the symmetrized tridiagonal, polished by the Rayleigh quotient of an
inverse-iteration eigenvector.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from . import _kernels
from .errors import ModeTruncationWarning, NotComputed, NotMinimal
from .field import QUARTIC, RadialProfile

__all__ = [
    "SpectralReport",
    "ModeSpectrum",
    "JacobiReport",
    "harmonic_multiplicity",
    "harmonic_eigenvalue",
    "linearized_spectrum",
    "jacobi_spectrum_slice",
    "eigenfunction",
    "rotational_kernel_check",
]


def harmonic_eigenvalue(n, k):
    """Laplace eigenvalue mu_k = k (k + n - 2) on the round S^(n-1)."""
    return float(k * (k + n - 2))


def harmonic_multiplicity(n, k):
    """Dimension of degree-k spherical harmonics on S^(n-1).

    C(n+k-1, k) - C(n+k-3, k-2); gives 1, n, and 2k+1 for n = 3.
    """
    if k == 0:
        return 1
    low = math.comb(n + k - 3, k - 2) if k >= 2 else 0
    return math.comb(n + k - 1, k) - low


@dataclass
class ModeSpectrum:
    k: int
    mu_k: float
    d_k: int
    eigenvalues: list


@dataclass
class SpectralReport:
    """Per-mode eigenvalues of -L around a profile, with index and nullity."""

    eps: float
    k_max: int
    m: int
    null_tol: float
    modes: list
    index: int
    nullity: int
    profile: RadialProfile = None
    _vectors: dict = field(default_factory=dict, repr=False)


def _mode_pencil(metric, eps, values, k, well):
    """Symmetrized tridiagonal (d, e) of mode k, plus the mass vector.

    Mode 0 keeps the pole rows (Neumann radial factor, mass from the
    n u'' limit); modes k >= 1 impose psi = 0 at the poles.
    """
    n = metric.n
    h = metric.h
    cw = metric.cell_w
    wn = metric.wn
    vpot = well.d2w(values) / (eps * eps)
    if k == 0:
        size = metric.N
        mass = np.empty(size)
        mass[0] = mass[-1] = metric.pole_mass
        mass[1:-1] = h * wn[1:-1]
        kdiag = np.empty(size)
        kdiag[0] = cw[0] / h
        kdiag[-1] = cw[-1] / h
        kdiag[1:-1] = (cw[:-1] + cw[1:]) / h
        koff = -cw / h
        v = vpot
    else:
        size = metric.N - 2
        mass = h * wn[1:-1]
        kdiag = (cw[:-1] + cw[1:]) / h
        koff = -cw[1:-1] / h
        v = vpot[1:-1] + harmonic_eigenvalue(n, k) / (metric.w[1:-1] ** 2)
    d = kdiag / mass + v
    e = koff / np.sqrt(mass[:-1] * mass[1:])
    return d, e, mass


def _bisect_eigenvalue(d, e, j, lo, hi):
    """j-th smallest eigenvalue by Sturm-sequence bisection."""
    tol = 1e-13 * max(1.0, abs(lo), abs(hi))
    it = 0
    while hi - lo > tol and it < 200:
        mid = 0.5 * (lo + hi)
        if _kernels.sturm_count(d, e, mid) >= j + 1:
            hi = mid
        else:
            lo = mid
        it += 1
    return 0.5 * (lo + hi)


def _inverse_iteration(d, e, lam):
    """Eigenvector of the symmetric tridiagonal near lam; Rayleigh polish."""
    size = len(d)
    ab = np.zeros((3, size))
    x = np.cos(np.linspace(0.0, 3.0, size)) + 0.5
    x /= np.linalg.norm(x)
    shift = lam
    for _ in range(3):
        ab[1, :] = d - shift
        if size > 1:
            ab[0, 1:] = e
            ab[2, :-1] = e
        try:
            y = solve_banded((1, 1), ab, x)
        except LinAlgError:
            ab[1, :] = d - (shift + 1e-12 * max(1.0, abs(shift)))
            y = solve_banded((1, 1), ab, x)
        x = y / np.linalg.norm(y)
    # Rayleigh quotient of the converged vector
    sx = d * x
    sx[:-1] += e * x[1:]
    sx[1:] += e * x[:-1]
    return float(x @ sx), x


def _mode_eigs(d, e, m):
    """Lowest m eigenvalues and vectors of the symmetric tridiagonal (d, e)."""
    rad = np.zeros(len(d))
    rad[:-1] += np.abs(e)
    rad[1:] += np.abs(e)
    lo = float(np.min(d - rad))
    hi = float(np.max(d + rad))
    eigs = []
    vecs = []
    for j in range(m):
        lam = _bisect_eigenvalue(d, e, j, lo, hi)
        lam_rq, x = _inverse_iteration(d, e, lam)
        # keep the polished value only if it stayed in the bisection bracket
        if abs(lam_rq - lam) <= 1e-6 * max(1.0, abs(lam)):
            lam = lam_rq
        eigs.append(lam)
        vecs.append(x)
    return eigs, vecs


def linearized_spectrum(u, k_max=8, m=4, well=QUARTIC, null_tol=None):
    """Spectrum of -L_k around a profile for harmonic modes k = 0..k_max.

    Assembles index and nullity with harmonic multiplicities; warns with
    ModeTruncationWarning when the top mode still carries negative or
    near-zero eigenvalues, since then the totals are not certified.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    if m < 2:
        raise ValueError("need at least two eigenvalues per mode")
    metric, eps = u.metric, u.eps
    if null_tol is None:
        null_tol = 1e-6 / (eps * eps)

    modes = []
    vectors = {}
    index = 0
    nullity = 0
    for k in range(k_max + 1):
        d, e, mass = _mode_pencil(metric, eps, u.values, k, well)
        eigs, vecs = _mode_eigs(d, e, m)
        d_k = harmonic_multiplicity(metric.n, k)
        index += d_k * sum(1 for lam in eigs if lam < -null_tol)
        nullity += d_k * sum(1 for lam in eigs if abs(lam) <= null_tol)
        modes.append(ModeSpectrum(k, harmonic_eigenvalue(metric.n, k), d_k, eigs))
        for j, x in enumerate(vecs):
            psi = np.zeros(metric.N)
            if k == 0:
                psi[:] = x / np.sqrt(mass)
            else:
                psi[1:-1] = x / np.sqrt(mass)
            top = int(np.argmax(np.abs(psi)))
            psi /= psi[top]  # sup-normalized, largest component positive
            vectors[(k, j)] = psi

    if min(modes[-1].eigenvalues) <= null_tol:
        warnings.warn(
            f"mode k={k_max} still has eigenvalues at or below the null tolerance; "
            "increase k_max to certify index and nullity",
            ModeTruncationWarning,
        )
    return SpectralReport(eps, k_max, m, null_tol, modes, index, nullity, u, vectors)


def eigenfunction(report, k, which=0):
    """Radial factor of a computed eigenfunction, sup-normalized to one."""
    try:
        psi = report._vectors[(k, which)]
    except KeyError as exc:
        raise NotComputed(f"eigenfunction (k={k}, which={which}) was not computed") from exc
    return RadialProfile(report.profile.metric, report.eps, psi.copy())


def rotational_kernel_check(u, well=QUARTIC):
    """Lowest mode-1 eigenvalue: positivity certifies an empty rotational kernel.

    For a rotationally symmetric profile the Killing-field derivative vanishes
    identically, so the only possible mode-1 kernel is spectral; the returned
    value being positive rules it out quantitatively.
    """
    report = linearized_spectrum(u, k_max=1, m=2, well=well)
    return report.modes[1].eigenvalues[0]


@dataclass
class JacobiReport:
    """Spectrum of the slice Jacobi operator Delta_Sigma at a plateau slice."""

    s: float
    entries: list  # (k, eigenvalue, multiplicity)
    index: int
    nullity: int


def jacobi_spectrum_slice(metric, s, k_max=8, null_tol=1e-12):
    """Jacobi spectrum mu_k / w(s)^2 of a totally geodesic plateau slice."""
    lo, hi = metric.plateau
    if not lo - 1e-12 <= s <= hi + 1e-12:
        raise NotMinimal(f"slice s={s} lies outside the plateau [{lo}, {hi}]")
    entries = []
    index = 0
    nullity = 0
    for k in range(k_max + 1):
        lam = harmonic_eigenvalue(metric.n, k)  # w == 1 on the plateau
        d_k = harmonic_multiplicity(metric.n, k)
        entries.append((k, lam, d_k))
        if lam < -null_tol:
            index += d_k
        elif abs(lam) <= null_tol:
            nullity += d_k
    return JacobiReport(float(s), entries, index, nullity)
