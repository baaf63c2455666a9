"""Benchmark densities and wavefunctions: Gaussians, cat states, boxes.

The cat state is the superposition N(|0> + nu |alpha/nu>) of the vacuum and a
real-amplitude coherent state.  Its quadrature PDF at angle theta is

    F(y) = N^2 pi^(-1/2) exp(-y^2)
           * |1 + nu exp(-(alpha^2/(2 nu^2))(1 + e^{2 i theta}) + sqrt(2) e^{i theta} (alpha/nu) y)|^2

with normalization N = [1 + 2 nu exp(-alpha^2 / (2 nu^2)) + nu^2]^(-1/2).
The exponent is written with the ratio alpha/nu so that alpha = 0 is regular;
nu = 0 is routed to the vacuum limit where the formula itself degenerates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyBox, SupportExceedsGrid
from .grid import (
    TAIL_CLAMP,
    GriddedDensity,
    GridSpec,
    WaveFunction,
    normalize,
    quadrature_weights,
)

# 6 sigma of the vacuum quadrature Gaussian (sigma^2 = 1/2).
_CAT_MARGIN = 6.0 * math.sqrt(0.5)


@dataclass(frozen=True)
class CatStateParams:
    """Weighting factor nu, coherent amplitude alpha, quadrature angle theta."""

    nu: float
    alpha: float
    theta: float = 0.0

    def normalization(self) -> float:
        """The prefactor N; the vacuum limit is used when nu == 0."""
        if self.nu == 0.0:
            return 1.0
        with np.errstate(under="ignore"):
            overlap = math.exp(-self.alpha**2 / (2.0 * self.nu**2)) if self.alpha != 0 else 1.0
        n2 = 1.0 + 2.0 * self.nu * overlap + self.nu**2
        if not (n2 > 0 and math.isfinite(n2)):
            raise ValueError(f"cat-state normalization undefined for {self}")
        return n2**-0.5


def _clamp_tails(values: np.ndarray) -> np.ndarray:
    peak = float(np.max(values))
    if peak <= 0:
        return values
    return np.where(values < TAIL_CLAMP * peak, 0.0, values)


def gaussian_density(spec: GridSpec, mean, cov) -> GriddedDensity:
    """Normalized multivariate Gaussian samples on the grid."""
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    dim = spec.dim
    if mean.shape != (dim,) or cov.shape != (dim, dim):
        raise ValueError("mean/cov shape mismatch with grid dimension")
    eigvals = np.linalg.eigvalsh(cov)
    if np.any(eigvals <= 0):
        raise ValueError("covariance must be positive definite")
    for i, ax in enumerate(spec.axes):
        reach = 6.0 * math.sqrt(cov[i, i])
        if mean[i] - reach < ax.min or mean[i] + reach > ax.max:
            raise SupportExceedsGrid(f"6 sigma of axis {i} leaves the grid box")
    prec = np.linalg.inv(cov)
    meshes = spec.meshes()
    quad = np.zeros(spec.shape)
    for i in range(dim):
        for j in range(dim):
            quad += prec[i, j] * (meshes[i] - mean[i]) * (meshes[j] - mean[j])
    with np.errstate(under="ignore"):
        vals = np.exp(-0.5 * quad)
    return normalize(GriddedDensity(spec, _clamp_tails(vals)))


def _cat_amplitude_factor(p: CatStateParams, y: np.ndarray) -> np.ndarray:
    """The |1 + nu exp(...)|^2 factor of the quadrature PDF."""
    if p.nu == 0.0:
        return np.ones_like(y)
    ratio = p.alpha / p.nu
    phase = np.exp(1j * p.theta)
    exponent = -0.5 * ratio**2 * (1.0 + phase**2) + math.sqrt(2.0) * phase * ratio * y
    with np.errstate(under="ignore", over="ignore"):
        inner = 1.0 + p.nu * np.exp(exponent)
    return np.abs(inner) ** 2


def _check_cat_grid(p: CatStateParams, spec: GridSpec) -> None:
    if spec.dim != 1:
        raise ValueError("cat states are one-dimensional")
    # The coherent component carries mass ~ nu^2/(1+nu^2); below the density
    # norm tolerance its out-of-grid truncation is harmless (vacuum limit).
    if p.nu == 0.0 or p.nu**2 / (1.0 + p.nu**2) <= 1e-8:
        peak2 = 0.0
    else:
        peak2 = math.sqrt(2.0) * p.alpha / p.nu
    lo = min(0.0, peak2) - _CAT_MARGIN
    hi = max(0.0, peak2) + _CAT_MARGIN
    ax = spec.axes[0]
    if ax.min > lo or ax.max < hi:
        raise SupportExceedsGrid(
            f"grid [{ax.min}, {ax.max}] cannot hold cat peaks at 0 and {peak2:.3g}"
        )


def cat_quadrature_density(p: CatStateParams, spec: GridSpec) -> GriddedDensity:
    """Quadrature-variable PDF of the (un)balanced cat state at angle theta."""
    _check_cat_grid(p, spec)
    y = spec.points(0)
    n2 = p.normalization() ** 2
    with np.errstate(under="ignore"):
        vals = n2 / math.sqrt(math.pi) * np.exp(-(y**2)) * _cat_amplitude_factor(p, y)
    return normalize(GriddedDensity(spec, _clamp_tails(vals)))


def cat_wavefunction(p: CatStateParams, spec: GridSpec, hbar: float = 1.0) -> WaveFunction:
    """Position-representation amplitude; |psi|^2 matches the theta=0 PDF.

    Written as the two displaced Gaussians N pi^(-1/4) [e^{-y^2/2}
    + nu e^{-(y - sqrt(2) alpha/nu)^2/2}]; no Fock-space truncation occurs.
    """
    _check_cat_grid(p, spec)
    y = spec.points(0)
    with np.errstate(under="ignore"):
        vac = np.exp(-0.5 * y**2)
        if p.nu == 0.0:
            amp = vac
        else:
            shift = math.sqrt(2.0) * p.alpha / p.nu
            amp = vac + p.nu * np.exp(-0.5 * (y - shift) ** 2)
    amp = p.normalization() * math.pi**-0.25 * amp
    w = quadrature_weights(spec)
    norm = math.sqrt(float(np.sum(w * amp**2)))
    return WaveFunction(spec, amp / norm, hbar)


def uniform_density(spec: GridSpec, box) -> GriddedDensity:
    """Constant inside the per-axis box, zero outside, normalized.

    Edge cells carry O(dx) quadrature bias when the box sits strictly inside
    the grid; tests that assert exact values use box-spanning grids.
    """
    box = np.atleast_2d(np.asarray(box, dtype=float))
    if box.shape != (spec.dim, 2):
        raise EmptyBox(f"box must be {spec.dim} (lo, hi) pairs")
    inside = np.ones(spec.shape, dtype=bool)
    meshes = spec.meshes()
    for i, (lo, hi) in enumerate(box):
        if not hi > lo:
            raise EmptyBox(f"box axis {i} has nonpositive width")
        ax = spec.axes[i]
        if lo < ax.min - 1e-12 or hi > ax.max + 1e-12:
            raise EmptyBox(f"box axis {i} extends outside the grid")
        inside &= (meshes[i] >= lo - 1e-12) & (meshes[i] <= hi + 1e-12)
    if not np.any(inside):
        raise EmptyBox("box contains no grid points")
    return normalize(GriddedDensity(spec, inside.astype(float)))
