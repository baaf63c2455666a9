"""Shared fixtures: the benchmark densities and wavefunctions.

Session-scoped because everything is immutable; grids follow the
acceptance geometry (1D, 2048 points, box wide enough for 6 sigma).
"""

from __future__ import annotations

import math

import numpy as np
import pytest

import repscan as rs
from repscan.grid import GriddedDensity, quadrature_weights


@pytest.fixture(scope="session")
def grid1d():
    return rs.grid_1d(-12.0, 12.0, 2048)


@pytest.fixture(scope="session")
def gauss1(grid1d):
    return rs.gaussian_density(grid1d, 0.0, 1.0)


@pytest.fixture(scope="session")
def gauss_half(grid1d):
    return rs.gaussian_density(grid1d, 0.0, 0.5)


@pytest.fixture(scope="session")
def gauss2(grid1d):
    return rs.gaussian_density(grid1d, 0.0, 2.0)


@pytest.fixture(scope="session")
def bcs(grid1d):
    return rs.cat_quadrature_density(rs.CatStateParams(nu=1.0, alpha=5.0, theta=0.0), grid1d)


@pytest.fixture(scope="session")
def ucs_grid():
    return rs.grid_1d(-8.0, 22.0, 2048)


@pytest.fixture(scope="session")
def ucs(ucs_grid):
    return rs.cat_quadrature_density(rs.CatStateParams(nu=0.97, alpha=10.0, theta=0.0), ucs_grid)


@pytest.fixture(scope="session")
def mixture(grid1d):
    """Two well-separated unequal Gaussians; strongly non-Gaussian but smooth."""
    x = grid1d.points(0)
    vals = 0.7 * np.exp(-((x + 2.0) ** 2) / (2 * 0.5)) / math.sqrt(2 * math.pi * 0.5)
    vals += 0.3 * np.exp(-((x - 3.0) ** 2) / (2 * 1.5)) / math.sqrt(2 * math.pi * 1.5)
    return rs.normalize(GriddedDensity(grid1d, vals))


@pytest.fixture(scope="session")
def unit_box_grid():
    return rs.grid_1d(0.0, 1.0, 1025)


@pytest.fixture(scope="session")
def unit_box(unit_box_grid):
    return rs.uniform_density(unit_box_grid, [(0.0, 1.0)])


@pytest.fixture(scope="session")
def embedded_box(grid1d):
    return rs.uniform_density(grid1d, [(0.0, 1.0)])


@pytest.fixture(scope="session")
def wave_grid():
    return rs.grid_1d(-24.0, 24.0, 4096)


def make_gaussian_wave(spec, var, hbar=1.0, mean=0.0):
    x = spec.points(0)
    amp = (2.0 * math.pi * var) ** -0.25 * np.exp(-((x - mean) ** 2) / (4.0 * var))
    w = quadrature_weights(spec)
    amp = amp / math.sqrt(float(np.sum(w * amp**2)))
    return rs.WaveFunction(spec, amp, hbar)


@pytest.fixture(scope="session")
def wave_gauss(wave_grid):
    return make_gaussian_wave(wave_grid, 1.0)


@pytest.fixture(scope="session")
def cat_wave(wave_grid):
    return rs.cat_wavefunction(rs.CatStateParams(nu=1.0, alpha=5.0), wave_grid)


@pytest.fixture(scope="session")
def smooth_fixtures(gauss_half, gauss1, gauss2, bcs, ucs, mixture):
    return {
        "gauss_half": gauss_half,
        "gauss1": gauss1,
        "gauss2": gauss2,
        "bcs": bcs,
        "ucs": ucs,
        "mixture": mixture,
    }


@pytest.fixture(scope="session")
def all_fixtures(smooth_fixtures, embedded_box):
    out = dict(smooth_fixtures)
    out["uniform"] = embedded_box
    return out
