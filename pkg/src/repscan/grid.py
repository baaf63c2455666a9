"""Uniform rectangular grids with densities, wavefunctions and transforms.

This module owns the numerical geometry used everywhere else: trapezoid
quadrature, second-order finite differences, FFT-based Gaussian smoothing and
the unitary Fourier conjugation between position- and momentum-like variables.

Conventions
-----------
- Grids are uniform per axis; arrays are stored in row-major (C) order with
  shape ``(count_0, ..., count_{D-1})``.
- All quadrature is the composite trapezoid rule.  For densities whose tails
  decay well inside the box this is spectrally accurate (the Euler-Maclaurin
  boundary terms vanish), which is what the default generator boxes rely on.
- Density values below ``TAIL_CLAMP`` times the peak are treated as exact
  zeros by the generators so that ``log F`` stays representable.
- The Fourier pair convention is

      psi_G(y) = (2 pi hbar)^(-D/2) * integral exp(-i x.y / hbar) psi_F(x) dx

  and its reciprocal with ``+i`` in the exponent.  The forward transform maps
  onto the canonical dual grid ``y_k = (k - n//2) * 2 pi hbar / (n dx)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import (
    AllZeroDensity,
    EmptyBox,
    GridTooCoarse,
    KernelWiderThanGrid,
    NotNormalized,
)

# Values this far below the peak are clamped to exact zero by generators.
TAIL_CLAMP = 1e-300

# Negative values no larger than this (in magnitude) are rounding noise.
NEGATIVE_TOL = 1e-14

_NORM_TOL = 1e-8
_L2_TOL = 1e-8


class Axis(NamedTuple):
    """One grid axis: closed interval [min, max] sampled at `count` points."""

    min: float
    max: float
    count: int


@dataclass(frozen=True)
class GridSpec:
    """Geometry of a uniform rectangular D-dimensional grid."""

    axes: tuple[Axis, ...]

    def __post_init__(self):
        if not self.axes:
            raise ValueError("grid needs at least one axis")
        axes = tuple(Axis(float(a[0]), float(a[1]), int(a[2])) for a in self.axes)
        object.__setattr__(self, "axes", axes)
        for ax in axes:
            if not ax.max > ax.min:
                raise ValueError(f"axis needs max > min, got {ax}")
            if ax.count < 8:
                raise ValueError(f"axis needs at least 8 points, got {ax}")
        if self.size > 2**31:
            raise ValueError("grid too large to address")

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(ax.count for ax in self.axes)

    @property
    def size(self) -> int:
        return int(np.prod([ax.count for ax in self.axes]))

    def spacing(self, i: int) -> float:
        ax = self.axes[i]
        return (ax.max - ax.min) / (ax.count - 1)

    @property
    def spacings(self) -> tuple[float, ...]:
        return tuple(self.spacing(i) for i in range(self.dim))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacings))

    def points(self, i: int) -> np.ndarray:
        ax = self.axes[i]
        return np.linspace(ax.min, ax.max, ax.count)

    def meshes(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays broadcast to the full grid shape (indexing 'ij')."""
        return tuple(np.meshgrid(*(self.points(i) for i in range(self.dim)), indexing="ij"))


def grid_1d(lo: float, hi: float, count: int) -> GridSpec:
    """Shorthand for a one-dimensional GridSpec."""
    return GridSpec((Axis(lo, hi, count),))


@lru_cache(maxsize=64)
def _trapezoid_weights(spec: GridSpec) -> np.ndarray:
    w = np.ones(1)
    for i in range(spec.dim):
        wi = np.full(spec.axes[i].count, spec.spacing(i))
        wi[0] *= 0.5
        wi[-1] *= 0.5
        w = np.multiply.outer(w, wi)
    return w.reshape(spec.shape)


def quadrature_weights(spec: GridSpec) -> np.ndarray:
    """Trapezoid-rule weights, one per grid point."""
    return _trapezoid_weights(spec)


@dataclass(frozen=True, eq=False)
class GriddedDensity:
    """Nonnegative normalized PDF sampled on a uniform grid."""

    spec: GridSpec
    values: np.ndarray
    norm_tol: float = _NORM_TOL

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(self.spec.shape)
        object.__setattr__(self, "values", v)

    def validate(self) -> None:
        """Raise if the density invariants do not hold."""
        if np.any(self.values < 0):
            raise AllZeroDensity("density has negative entries")
        total = float(np.sum(quadrature_weights(self.spec) * self.values))
        if abs(total - 1.0) > self.norm_tol:
            raise ValueError(f"density integrates to {total!r}, not 1")


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Complex amplitude on a grid, L2-normalized under trapezoid quadrature."""

    spec: GridSpec
    values: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).reshape(self.spec.shape)
        object.__setattr__(self, "values", v)
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")

    def norm(self) -> float:
        w = quadrature_weights(self.spec)
        return float(np.sqrt(np.sum(w * np.abs(self.values) ** 2)))

    def density(self) -> GriddedDensity:
        """|psi|^2 as a normalized GriddedDensity."""
        return normalize(GriddedDensity(self.spec, np.abs(self.values) ** 2))


@dataclass(frozen=True, eq=False)
class VectorField:
    """One real array per dimension, e.g. a gradient or a score vector."""

    spec: GridSpec
    components: tuple[np.ndarray, ...]

    def __post_init__(self):
        comps = tuple(np.asarray(c, dtype=float).reshape(self.spec.shape) for c in self.components)
        if len(comps) != self.spec.dim:
            raise ValueError("need one component per dimension")
        object.__setattr__(self, "components", comps)


def normalize(d: GriddedDensity) -> GriddedDensity:
    """Rescale values by a single constant so the density integrates to 1.

    Entries in (-NEGATIVE_TOL, 0) are clamped to zero; anything more negative,
    or a nonpositive total mass, raises AllZeroDensity.
    """
    v = d.values
    if np.any(v < -NEGATIVE_TOL):
        raise AllZeroDensity("density has negative entries beyond rounding noise")
    v = np.where(v < 0, 0.0, v)
    total = float(np.sum(quadrature_weights(d.spec) * v))
    if not total > 0 or not math.isfinite(total):
        raise AllZeroDensity("density has no positive mass")
    return GriddedDensity(d.spec, v / total, d.norm_tol)


def integrate(d: GriddedDensity, weight: Callable[..., np.ndarray] | None = None) -> float:
    """Trapezoid value of integral weight(x) * F(x) dx (weight defaults to 1).

    `weight` is called with one coordinate array per dimension.
    """
    w = quadrature_weights(d.spec)
    if weight is None:
        return float(np.sum(w * d.values))
    return float(np.sum(w * d.values * weight(*d.spec.meshes())))


def mean_vector(d: GriddedDensity) -> np.ndarray:
    meshes = d.spec.meshes()
    w = quadrature_weights(d.spec) * d.values
    return np.array([float(np.sum(w * m)) for m in meshes])


def covariance_matrix(d: GriddedDensity) -> np.ndarray:
    """Covariance of the coordinates under the density."""
    meshes = d.spec.meshes()
    w = quadrature_weights(d.spec) * d.values
    mu = [float(np.sum(w * m)) for m in meshes]
    dim = d.spec.dim
    cov = np.empty((dim, dim))
    for i in range(dim):
        for j in range(i, dim):
            cij = float(np.sum(w * (meshes[i] - mu[i]) * (meshes[j] - mu[j])))
            cov[i, j] = cov[j, i] = cij
    return cov


def gradient(d: GriddedDensity) -> VectorField:
    """Central differences in the interior, second-order one-sided at edges."""
    if any(ax.count < 3 for ax in d.spec.axes):
        raise GridTooCoarse("gradient needs at least 3 points per axis")
    coords = [d.spec.points(i) for i in range(d.spec.dim)]
    grads = np.gradient(d.values, *coords, edge_order=2)
    if d.spec.dim == 1:
        grads = [grads]
    return VectorField(d.spec, tuple(grads))


def _as_cov(sigma, dim: int) -> np.ndarray:
    s = np.atleast_2d(np.asarray(sigma, dtype=float))
    if s.shape != (dim, dim):
        raise ValueError(f"covariance must be {dim}x{dim}, got {s.shape}")
    if not np.allclose(s, s.T, atol=1e-12):
        raise ValueError("covariance must be symmetric")
    return s


def _padded_freqs(spec: GridSpec) -> tuple[list[np.ndarray], list[int]]:
    freqs, nfft = [], []
    for i in range(spec.dim):
        n = spec.axes[i].count
        npad = 1 << int(np.ceil(np.log2(2 * n)))
        nfft.append(npad)
        freqs.append(np.fft.fftfreq(npad, d=spec.spacing(i)))
    return freqs, nfft


def _fft_filter(d: GriddedDensity, multiplier: Callable[[Sequence[np.ndarray]], np.ndarray]) -> GriddedDensity:
    """Convolve with a kernel given by its continuous Fourier transform.

    Zero-pads to the next power of two >= 2*count per axis so the circular
    convolution never wraps the support back into the box.
    """
    freqs, nfft = _padded_freqs(d.spec)
    axes = tuple(range(d.spec.dim))
    fv = np.fft.fftn(d.values, s=nfft, axes=axes)
    mesh = np.meshgrid(*freqs, indexing="ij")
    fv *= multiplier(mesh)
    out = np.fft.ifftn(fv, axes=axes).real
    out = out[tuple(slice(0, n) for n in d.spec.shape)]
    out = np.where(out < 0, 0.0, out)  # FFT ringing at the 1e-17 level
    return normalize(GriddedDensity(d.spec, out, d.norm_tol))


def _check_kernel_fits(spec: GridSpec, eps: float, lam_max: float) -> None:
    width = 6.0 * math.sqrt(max(eps * lam_max, 0.0))
    for ax in spec.axes:
        if width > 0.5 * (ax.max - ax.min):
            raise KernelWiderThanGrid(
                f"kernel 6-sigma width {width:.3g} exceeds half extent of axis {ax}"
            )


def convolve_gaussian(d: GriddedDensity, sigma, eps: float) -> GriddedDensity:
    """Density of X + sqrt(eps) Z with Z ~ N(0, sigma).

    The smoothing kernel N(0, eps*sigma) enters through its exact Fourier
    multiplier exp(-2 pi^2 xi . (eps sigma) xi), so no kernel sampling error
    is introduced.  eps = 0 returns the input unchanged.
    """
    cov = _as_cov(sigma, d.spec.dim)
    if eps < 0:
        raise ValueError("eps must be >= 0")
    if eps == 0 or np.all(cov == 0):
        return d
    eigvals = np.linalg.eigvalsh(cov)
    if float(np.min(eigvals)) < -1e-12:
        raise ValueError("noise covariance must be positive semi-definite")
    lam_max = float(np.max(eigvals))
    _check_kernel_fits(d.spec, eps, lam_max)
    ecov = eps * cov

    def mult(mesh):
        quad = np.zeros_like(mesh[0])
        for i in range(d.spec.dim):
            for j in range(d.spec.dim):
                if ecov[i, j] != 0.0:
                    quad += ecov[i, j] * mesh[i] * mesh[j]
        return np.exp(-2.0 * math.pi**2 * quad)

    return _fft_filter(d, mult)


def convolve_uniform(d: GriddedDensity, sigma, eps: float) -> GriddedDensity:
    """Density of X + sqrt(eps) Z with Z uniform on a centered box.

    Z_i is uniform on [-w_i, w_i] with w_i = sqrt(3 eps sigma_ii), which
    matches the covariance eps*sigma of the Gaussian variant; sigma must be
    diagonal.  Used to exercise noise-shape independence of the smoothing
    derivative.
    """
    cov = _as_cov(sigma, d.spec.dim)
    if np.any(cov != np.diag(np.diag(cov))):
        raise ValueError("uniform noise kernel needs a diagonal covariance")
    if eps < 0:
        raise ValueError("eps must be >= 0")
    if eps == 0 or np.all(cov == 0):
        return d
    lam_max = float(np.max(np.diag(cov)))
    _check_kernel_fits(d.spec, eps, lam_max)
    halfwidths = np.sqrt(3.0 * eps * np.diag(cov))

    def mult(mesh):
        out = np.ones_like(mesh[0])
        for i, w in enumerate(halfwidths):
            if w > 0:
                out = out * np.sinc(2.0 * w * mesh[i])
        return out

    return _fft_filter(d, mult)


def convolve_densities(d1: GriddedDensity, d2: GriddedDensity) -> GriddedDensity:
    """Density of X1 + X2 for independent gridded densities.

    Both inputs must share per-axis spacings; the result lives on the
    enlarged grid [min1+min2, max1+max2] with count n1+n2-1 per axis.
    """
    from scipy.signal import fftconvolve

    if d1.spec.dim != d2.spec.dim:
        raise ValueError("dimension mismatch")
    for i in range(d1.spec.dim):
        if not math.isclose(d1.spec.spacing(i), d2.spec.spacing(i), rel_tol=1e-9):
            raise ValueError("summands must share grid spacing")
    out = fftconvolve(d1.values, d2.values, mode="full") * d1.spec.cell_volume
    out = np.where(out < 0, 0.0, out)
    axes = tuple(
        Axis(a1.min + a2.min, a1.max + a2.max, a1.count + a2.count - 1)
        for a1, a2 in zip(d1.spec.axes, d2.spec.axes)
    )
    return normalize(GriddedDensity(GridSpec(axes), out))


def _dual_axis(ax: Axis, dx: float, hbar: float) -> Axis:
    dy = 2.0 * math.pi * hbar / (ax.count * dx)
    y0 = -(ax.count // 2) * dy
    return Axis(y0, y0 + (ax.count - 1) * dy, ax.count)


def fourier_conjugate(w: WaveFunction, inverse: bool = False, out_spec: GridSpec | None = None) -> WaveFunction:
    """Unitary Fourier conjugation between reciprocal wavefunctions.

    Forward (default) evaluates

        psi_G(y) = (2 pi hbar)^(-D/2) * integral exp(-i x.y/hbar) psi_F(x) dx

    by trapezoid-sampled DFT on the canonical dual grid; `inverse=True` flips
    the exponent sign (the reciprocal relation).  `out_spec` selects the
    output grid; it must satisfy the duality constraint
    dx_out * dx_in = 2 pi hbar / count per axis (the canonical dual does, and
    so does the original grid when round-tripping).
    """
    if abs(w.norm() - 1.0) > _L2_TOL:
        raise NotNormalized(f"wavefunction norm {w.norm()!r} deviates from 1")
    sign = +1.0 if inverse else -1.0
    hbar = w.hbar
    spec = w.spec
    dim = spec.dim

    if out_spec is None:
        out_axes = tuple(_dual_axis(ax, spec.spacing(i), hbar) for i, ax in enumerate(spec.axes))
        out_spec = GridSpec(out_axes)
    else:
        if out_spec.shape != spec.shape:
            raise ValueError("out_spec must match the input point counts")
        for i in range(dim):
            need = 2.0 * math.pi * hbar / spec.axes[i].count
            have = out_spec.spacing(i) * spec.spacing(i)
            if not math.isclose(have, need, rel_tol=1e-9):
                raise ValueError("out_spec violates the FFT duality constraint")

    vals = w.values.astype(complex)
    # Pre-phase shifts the output origin to out_spec's min per axis.
    for i in range(dim):
        j = np.arange(spec.axes[i].count)
        phase = np.exp(sign * 1j * j * spec.spacing(i) * out_spec.axes[i].min / hbar)
        vals = vals * phase.reshape([-1 if k == i else 1 for k in range(dim)])
    if inverse:
        vals = np.fft.ifftn(vals) * spec.size
    else:
        vals = np.fft.fftn(vals)
    # Post-phase accounts for the input grid origin.
    for i in range(dim):
        y = out_spec.points(i)
        phase = np.exp(sign * 1j * spec.axes[i].min * y / hbar)
        vals = vals * phase.reshape([-1 if k == i else 1 for k in range(dim)])
    vals = vals * spec.cell_volume / (2.0 * math.pi * hbar) ** (dim / 2.0)
    return WaveFunction(out_spec, vals, hbar)


# ---------------------------------------------------------------------------
# .grid.json file format
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def save_grid(obj: GriddedDensity | WaveFunction, path: str | Path) -> None:
    """Write a density or wavefunction as .grid.json (17 significant digits)."""
    spec = obj.spec
    parts = ['{"dim": %d' % spec.dim]
    if isinstance(obj, WaveFunction):
        parts.append(', "hbar": %s' % _fmt(obj.hbar))
        kind = "wavefunction"
        flat = obj.values.ravel()
        values = ", ".join("[%s, %s]" % (_fmt(v.real), _fmt(v.imag)) for v in flat)
    else:
        kind = "density"
        values = ", ".join(_fmt(v) for v in obj.values.ravel())
    axes = ", ".join(
        '{"min": %s, "max": %s, "count": %d}' % (_fmt(ax.min), _fmt(ax.max), ax.count)
        for ax in spec.axes
    )
    parts.append(', "axes": [%s]' % axes)
    parts.append(', "kind": "%s"' % kind)
    parts.append(', "values": [%s]}' % values)
    Path(path).write_text("".join(parts) + "\n")


def load_grid(path: str | Path) -> GriddedDensity | WaveFunction:
    """Read a .grid.json file back into the matching object."""
    doc = json.loads(Path(path).read_text())
    axes = tuple(Axis(a["min"], a["max"], a["count"]) for a in doc["axes"])
    spec = GridSpec(axes)
    if doc["kind"] == "wavefunction":
        vals = np.array([complex(re, im) for re, im in doc["values"]])
        return WaveFunction(spec, vals, float(doc.get("hbar", 1.0)))
    if doc["kind"] == "density":
        return GriddedDensity(spec, np.asarray(doc["values"], dtype=float))
    raise ValueError(f"unknown kind {doc['kind']!r}")
