"""The information random variable i_X = log2(1/F) and its distribution.

Each grid point with F > 0 contributes the sample y = -log2 F(x) carrying
the quadrature weight F(x) dV, so the weighted sample set is the exact
discrete image of the density under the surprisal map.  Histograms of these
samples are the ground truth against which series reconstructions are
scored; moments and the moment identity use the unbinned weighted sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entropy import log_integral_power
from .errors import DegenerateSupport
from .grid import GriddedDensity, quadrature_weights
from .estimation import InequalityReport, _report

LOG2E = 1.0 / math.log(2.0)


@dataclass(frozen=True, eq=False)
class InfoDistribution:
    """Information PDF g(y), as a weighted histogram or a series descriptor."""

    kind: str
    support: tuple[float, float]
    bins: tuple[tuple[float, float], ...]
    total_mass: float
    series: object = None

    def __post_init__(self):
        if self.kind not in ("histogram", "series"):
            raise ValueError(f"unknown kind {self.kind!r}")

    @property
    def centers(self) -> np.ndarray:
        return np.array([c for c, _ in self.bins])

    @property
    def masses(self) -> np.ndarray:
        return np.array([m for _, m in self.bins])

    @property
    def bin_width(self) -> float:
        if len(self.bins) < 2:
            return 0.0
        return float(self.bins[1][0] - self.bins[0][0])

    @property
    def edges(self) -> np.ndarray:
        w = self.bin_width
        return np.concatenate([self.centers - 0.5 * w, [self.centers[-1] + 0.5 * w]])

    def densities(self) -> np.ndarray:
        """Bin masses divided by the bin width."""
        w = self.bin_width
        if w == 0.0:
            raise DegenerateSupport("point mass has no density representation")
        return self.masses / w


def information_values(d: GriddedDensity) -> tuple[np.ndarray, np.ndarray]:
    """Weighted samples (values in bits, quadrature weights) of i_X.

    Weights sum to integral F = 1 within the density's norm tolerance.
    """
    w = quadrature_weights(d.spec).ravel()
    v = d.values.ravel()
    mask = v > 0
    values = -np.log2(v[mask])
    weights = (w * v)[mask]
    return values, weights


def info_cdf(d: GriddedDensity, y: float) -> float:
    """P(i_X <= y): total weight of information values at or below y."""
    values, weights = information_values(d)
    return float(np.sum(weights[values <= y]))


def info_pdf_histogram(
    d: GriddedDensity,
    n_bins: int = 256,
    value_range: tuple[float, float] | None = None,
    allow_pointmass: bool = False,
) -> InfoDistribution:
    """Ground-truth histogram of the information values.

    Bins are uniform over [min, max] of the observed values unless
    `value_range` overrides them.  A degenerate (single-point) support
    raises unless `allow_pointmass` asks for the single-bin representation.
    """
    if n_bins < 16:
        raise ValueError("use at least 16 bins")
    values, weights = information_values(d)
    lo, hi = (float(values.min()), float(values.max())) if value_range is None else value_range
    if hi - lo < 1e-12:
        if not allow_pointmass:
            raise DegenerateSupport("all information values coincide")
        return InfoDistribution(
            "histogram", (lo, lo), ((lo, float(np.sum(weights))),), float(np.sum(weights))
        )
    masses, edges = np.histogram(values, bins=n_bins, range=(lo, hi), weights=weights)
    centers = 0.5 * (edges[:-1] + edges[1:])
    total = float(np.sum(masses))
    return InfoDistribution(
        "histogram", (lo, hi), tuple(zip(centers.tolist(), masses.tolist())), total
    )


def moment_identity_check(d: GriddedDensity, p: float, check_tol: float = 1e-6) -> InequalityReport:
    """integral F^p dx against sum of weights * 2^((1-p) y) over the samples.

    Identity-style report: slack = -|lhs - rhs| / |rhs|.
    """
    lhs = math.exp(log_integral_power(d, p))
    values, weights = information_values(d)
    rhs = float(np.sum(weights * np.exp2((1.0 - p) * values)))
    slack = -abs(lhs - rhs) / max(abs(rhs), 1e-300)
    return _report("moment_identity", lhs, rhs, slack, check_tol, 1e-3)


def _normalized_samples(d: GriddedDensity) -> tuple[np.ndarray, np.ndarray]:
    values, weights = information_values(d)
    return values, weights / float(np.sum(weights))


def information_moments(d: GriddedDensity, m: int) -> np.ndarray:
    """Raw moments E[i_X^r] for r = 1..m (normalized weights), in bits^r."""
    values, weights = _normalized_samples(d)
    return np.array([float(np.sum(weights * values**r)) for r in range(1, m + 1)])


def varentropy(d: GriddedDensity) -> float:
    """Second central moment of i_X in bits^2."""
    mu1, mu2 = information_moments(d, 2)
    return mu2 - mu1**2


def histogram_l1(a: InfoDistribution, b: InfoDistribution) -> float:
    """L1 distance between two histograms sharing the same bin edges."""
    if len(a.bins) != len(b.bins) or not np.allclose(a.centers, b.centers, atol=1e-9):
        raise ValueError("histograms must share bin edges; build them with a common value_range")
    return float(np.sum(np.abs(a.masses - b.masses)))
