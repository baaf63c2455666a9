"""Escort distributions, order-q Fisher information, and inequality checks.

The order-q score is V_q = q grad(F)/F and the order-q Fisher matrix is its
covariance under the escort distribution rho_q = F^q / integral F^q.  The
checks implemented here verify, numerically on a fixture density:

- the smoothing identity d/deps I_q(X + sqrt(eps) Z)|_0 = Tr(J_q Sigma)/(2q),
  in scalar and entrywise-matrix form;
- the isoperimetric bound N_q det(J_q)^(1/D) >= 1 (q >= 1) and its trace form;
- the order-q Cramer-Rao bound sigma^2 >= D q^(1/(q-1)) / (e J_q);
- the entropy-power inequality with Hoelder-coupled orders;
- the Stam bound 16 pi^2 N_q(Y) >= det(J_r(X))^(1/D) for conjugate pairs;
- the entropy-power uncertainty product N_{p/2} N_{q/2} >= hbar^2/4.

Every check returns an InequalityReport.  `slack` is documented per check;
for identity-style checks it is -|lhs-rhs|/scale (always <= 0) so that
``satisfied == (slack >= -check_tol)`` holds uniformly.

Conjugate-pair checks work internally in the unit-frequency Fourier
convention (kernel e^{2 pi i x.y}); a wavefunction with hbar attached is
rescaled by x -> x/sqrt(2 pi hbar), under which entropy powers divide by
2 pi hbar and Fisher matrices multiply by it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entropy import renyi_entropy, renyi_entropy_power
from .errors import DerivativeUnstable
from .grid import (
    GriddedDensity,
    WaveFunction,
    VectorField,
    convolve_densities,
    convolve_gaussian,
    convolve_uniform,
    covariance_matrix,
    fourier_conjugate,
    gradient,
    normalize,
    quadrature_weights,
)

SCORE_FLOOR = 1e-300
DEFAULT_CHECK_TOL = 1e-6
DEFAULT_SATURATION_TOL = 1e-3


@dataclass(frozen=True)
class FisherMatrix:
    """Order-q Fisher information matrix with its trace J_q."""

    order: float
    entries: np.ndarray
    trace: float

    def __post_init__(self):
        e = np.atleast_2d(np.asarray(self.entries, dtype=float))
        object.__setattr__(self, "entries", e)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def det(self) -> float:
        return float(np.linalg.det(self.entries))


@dataclass(frozen=True)
class InequalityReport:
    name: str
    lhs: float
    rhs: float
    satisfied: bool
    slack: float
    saturated: bool


def _report(name, lhs, rhs, slack, check_tol, saturation_tol) -> InequalityReport:
    return InequalityReport(
        name=name,
        lhs=float(lhs),
        rhs=float(rhs),
        satisfied=bool(slack >= -check_tol),
        slack=float(slack),
        saturated=bool(abs(slack) <= saturation_tol),
    )


def escort(d: GriddedDensity, q: float) -> GriddedDensity:
    """rho_q = F^q / integral F^q (overflow-safe via peak factoring)."""
    if not q > 0:
        raise ValueError("q must be positive")
    v = d.values
    peak = float(np.max(v))
    with np.errstate(under="ignore"):
        powered = np.where(v > 0, (v / peak) ** q, 0.0)
    return normalize(GriddedDensity(d.spec, powered, d.norm_tol))


def score_vector(d: GriddedDensity, q: float = 1.0) -> VectorField:
    """V_q = q grad(F)/F, zeroed where F is below the relative floor."""
    grad = gradient(d)
    floor = SCORE_FLOOR * float(np.max(d.values))
    mask = d.values > floor
    safe = np.where(mask, d.values, 1.0)
    comps = tuple(np.where(mask, q * g / safe, 0.0) for g in grad.components)
    return VectorField(d.spec, comps)


def fisher_matrix(d: GriddedDensity, q: float) -> FisherMatrix:
    """Covariance of the order-q score under the escort distribution."""
    rho = escort(d, q)
    v = score_vector(d, q)
    w = quadrature_weights(d.spec) * rho.values
    dim = d.spec.dim
    means = np.array([float(np.sum(w * c)) for c in v.components])
    entries = np.empty((dim, dim))
    for i in range(dim):
        for j in range(i, dim):
            second = float(np.sum(w * v.components[i] * v.components[j]))
            entries[i, j] = entries[j, i] = second - means[i] * means[j]
    return FisherMatrix(q, entries, float(np.trace(entries)))


# ---------------------------------------------------------------------------
# Smoothing-derivative identities
# ---------------------------------------------------------------------------

def _smooth(d, sigma, eps, noise):
    if noise == "gaussian":
        return convolve_gaussian(d, sigma, eps)
    if noise == "uniform":
        return convolve_uniform(d, sigma, eps)
    raise ValueError(f"unknown noise kind {noise!r}")


def _noise_derivative(d, sigma, q, eps_ladder, noise, residual_cap):
    """One-sided derivative of eps -> I_q(X + sqrt(eps) Z) at eps = 0.

    Uses forward differences on the ladder (h, 2h, 4h) and two Richardson
    levels; raises DerivativeUnstable when the levels disagree by more than
    `residual_cap` relative to the estimate.
    """
    ladder = sorted(float(e) for e in eps_ladder)
    if len(ladder) != 3 or ladder[0] <= 0:
        raise ValueError("eps_ladder must hold three positive steps (h, 2h, 4h)")
    h = ladder[0]
    if not (math.isclose(ladder[1], 2 * h, rel_tol=1e-9) and math.isclose(ladder[2], 4 * h, rel_tol=1e-9)):
        raise ValueError("eps_ladder must be geometric: (h, 2h, 4h)")
    f0 = renyi_entropy(d, q, "nats").value
    f = {e: renyi_entropy(_smooth(d, sigma, e, noise), q, "nats").value for e in (h, 2 * h, 4 * h)}
    d1 = (f[h] - f0) / h
    d2 = (f[2 * h] - f0) / (2 * h)
    d4 = (f[4 * h] - f0) / (4 * h)
    r1a = 2.0 * d1 - d2
    r1b = 2.0 * d2 - d4
    r2 = (4.0 * r1a - r1b) / 3.0
    scale = max(abs(r2), 1e-300)
    if abs(r2 - r1a) > residual_cap * scale:
        raise DerivativeUnstable(
            f"Richardson levels disagree by {abs(r2 - r1a):.3g} (estimate {r2:.3g})"
        )
    return r2


def default_eps_ladder(d: GriddedDensity, sigma) -> tuple[float, float, float]:
    """(h, 2h, 4h) with h = 1e-3 * mean variance of d / mean diagonal of sigma."""
    var_d = float(np.trace(covariance_matrix(d))) / d.spec.dim
    sig = np.atleast_2d(np.asarray(sigma, dtype=float))
    var_z = float(np.trace(sig)) / d.spec.dim
    h = 1e-3 * var_d / max(var_z, 1e-300)
    return (h, 2 * h, 4 * h)


def de_bruijn_check(
    d: GriddedDensity,
    sigma,
    q: float,
    eps_ladder=None,
    noise: str = "gaussian",
    check_tol: float = 1e-3,
    saturation_tol: float = DEFAULT_SATURATION_TOL,
) -> InequalityReport:
    """Equality of the smoothing derivative with Tr(J_q Sigma) / (2q).

    slack = -|lhs - rhs| / max(|rhs|, |lhs|); Sigma = 0 reports exact equality.
    """
    sig = np.atleast_2d(np.asarray(sigma, dtype=float))
    rhs = float(np.trace(fisher_matrix(d, q).entries @ sig)) / (2.0 * q)
    if np.all(sig == 0):
        return _report("de_bruijn", 0.0, 0.0, 0.0, check_tol, saturation_tol)
    if eps_ladder is None:
        eps_ladder = default_eps_ladder(d, sig)
    lhs = _noise_derivative(d, sig, q, eps_ladder, noise, residual_cap=10.0 * check_tol)
    scale = max(abs(rhs), abs(lhs), 1e-300)
    slack = -abs(lhs - rhs) / scale
    return _report("de_bruijn", lhs, rhs, slack, check_tol, saturation_tol)


def de_bruijn_matrix_check(
    d: GriddedDensity,
    q: float,
    eps_ladder=None,
    check_tol: float = 1e-3,
    saturation_tol: float = DEFAULT_SATURATION_TOL,
) -> InequalityReport:
    """Entrywise derivative dI_q/dSigma_ij at 0 against (J_q)_ij / (2q).

    A bare off-diagonal perturbation of Sigma is not a valid covariance, so
    entry (i, j) is probed through the psd combination (e_i + e_j)(e_i + e_j)^T
    and the two diagonal probes are subtracted.  lhs/rhs are the Frobenius
    norms of the extracted and predicted matrices; slack is the largest
    entrywise discrepancy relative to the dominant predicted entry.

    Accuracy is limited by the O(dx^2) central-difference bias of the score,
    whose scale is the escort's inverse variance; orders q > 1 sharpen the
    escort and need proportionally finer grids to stay inside check_tol.
    """
    dim = d.spec.dim
    fm = fisher_matrix(d, q)
    rhs_matrix = fm.entries / (2.0 * q)

    def deriv(probe):
        ladder = eps_ladder if eps_ladder is not None else default_eps_ladder(d, probe)
        return _noise_derivative(d, probe, q, ladder, "gaussian", residual_cap=10.0 * check_tol)

    diag = np.zeros((dim, dim))
    lhs_matrix = np.zeros((dim, dim))
    for i in range(dim):
        probe = np.zeros((dim, dim))
        probe[i, i] = 1.0
        diag[i, i] = deriv(probe)
        lhs_matrix[i, i] = diag[i, i]
    for i in range(dim):
        for j in range(i + 1, dim):
            probe = np.zeros((dim, dim))
            probe[i, i] = probe[j, j] = 1.0
            probe[i, j] = probe[j, i] = 1.0
            combined = deriv(probe)
            off = (combined - diag[i, i] - diag[j, j]) / 2.0
            lhs_matrix[i, j] = lhs_matrix[j, i] = off
    scale = float(np.max(np.abs(rhs_matrix)))
    slack = -float(np.max(np.abs(lhs_matrix - rhs_matrix))) / max(scale, 1e-300)
    return _report(
        "de_bruijn_matrix",
        float(np.linalg.norm(lhs_matrix)),
        float(np.linalg.norm(rhs_matrix)),
        slack,
        check_tol,
        saturation_tol,
    )


# ---------------------------------------------------------------------------
# Isoperimetric / Cramer-Rao
# ---------------------------------------------------------------------------

def isoperimetric_check(
    d: GriddedDensity,
    q: float,
    check_tol: float = DEFAULT_CHECK_TOL,
    saturation_tol: float = DEFAULT_SATURATION_TOL,
) -> InequalityReport:
    """N_q det(J_q)^(1/D) >= 1, with the weaker trace form above it.

    lhs is the determinant-form product, rhs = 1; slack = lhs - 1.  The chain
    requirement (trace form >= det form) is folded into `satisfied`.
    """
    if q < 1.0:
        raise ValueError("isoperimetric inequality needs q >= 1")
    dim = d.spec.dim
    nq = renyi_entropy_power(d, q)
    fm = fisher_matrix(d, q)
    det_form = nq * fm.det() ** (1.0 / dim)
    trace_form = nq * fm.trace / dim
    slack = det_form - 1.0
    rep = _report("isoperimetric", det_form, 1.0, slack, check_tol, saturation_tol)
    chain_ok = trace_form >= det_form - check_tol
    if not chain_ok:
        rep = InequalityReport(rep.name, rep.lhs, rep.rhs, False, rep.slack, rep.saturated)
    return rep


def _q_power_limit(q: float) -> float:
    # q^(1/(q-1)); the q -> 1 limit is e.
    if abs(q - 1.0) < 1e-12:
        return math.e
    return math.exp(math.log(q) / (q - 1.0))


def cramer_rao_check(
    d: GriddedDensity,
    q: float,
    check_tol: float = DEFAULT_CHECK_TOL,
    saturation_tol: float = DEFAULT_SATURATION_TOL,
) -> InequalityReport:
    """sigma^2(X) >= D q^(1/(q-1)) / (e J_q) >= D / (e J_q), trace form.

    slack = (lhs - rhs)/rhs with rhs the sharp (q-dependent) bound.
    """
    if q < 1.0:
        raise ValueError("Cramer-Rao check needs q >= 1")
    dim = d.spec.dim
    var = float(np.trace(covariance_matrix(d))) / dim
    jq = fisher_matrix(d, q).trace
    rhs = dim * _q_power_limit(q) / (math.e * jq)
    slack = (var - rhs) / rhs
    return _report("cramer_rao", var, rhs, slack, check_tol, saturation_tol)


# ---------------------------------------------------------------------------
# Entropy-power inequality
# ---------------------------------------------------------------------------

def epi_check(
    d1: GriddedDensity,
    d2: GriddedDensity,
    lam: float,
    r: float,
    check_tol: float = DEFAULT_CHECK_TOL,
    saturation_tol: float = DEFAULT_SATURATION_TOL,
) -> InequalityReport:
    """N_r(X1+X2) >= (N_q(X1)/(1-lam))^(1-lam) (N_p(X2)/lam)^lam.

    Orders are Hoelder-coupled: q = r/((1-lam) + lam r), p = r/(lam + (1-lam) r).
    slack = (lhs - rhs)/rhs.
    """
    if not 0.0 < lam < 1.0:
        raise ValueError("lambda must lie in (0, 1)")
    if not r > 1.0:
        raise ValueError("EPI needs r > 1")
    q = r / ((1.0 - lam) + lam * r)
    p = r / (lam + (1.0 - lam) * r)
    total = convolve_densities(d1, d2)
    lhs = renyi_entropy_power(total, r)
    rhs = (renyi_entropy_power(d1, q) / (1.0 - lam)) ** (1.0 - lam) * (
        renyi_entropy_power(d2, p) / lam
    ) ** lam
    slack = (lhs - rhs) / rhs
    return _report("epi", lhs, rhs, slack, check_tol, saturation_tol)


# ---------------------------------------------------------------------------
# Conjugate-pair checks (Stam, uncertainty products)
# ---------------------------------------------------------------------------

def _conjugate_densities(w: WaveFunction) -> tuple[GriddedDensity, GriddedDensity]:
    return w.density(), fourier_conjugate(w).density()


def stam_check(
    w: WaveFunction,
    r: float,
    check_tol: float = DEFAULT_CHECK_TOL,
    saturation_tol: float = DEFAULT_SATURATION_TOL,
) -> InequalityReport:
    """16 pi^2 N_q(Y) >= det(J_r(X))^(1/D) with 1/r + 1/q = 2.

    Both sides are formed in the unit-frequency convention: the hbar-grid
    entropy power divides by 2 pi hbar and the Fisher matrix multiplies by
    it.  slack = (lhs - rhs)/rhs.
    """
    if r < 1.0:
        raise ValueError("Stam inequality needs r >= 1")
    q = 1.0 / (2.0 - 1.0 / r)
    dim = w.spec.dim
    two_pi_hbar = 2.0 * math.pi * w.hbar
    pos, mom = _conjugate_densities(w)
    lhs = 16.0 * math.pi**2 * renyi_entropy_power(mom, q) / two_pi_hbar
    det = fisher_matrix(pos, r).det()
    rhs = two_pi_hbar * det ** (1.0 / dim)
    slack = (lhs - rhs) / rhs
    return _report("stam", lhs, rhs, slack, check_tol, saturation_tol)


def repur_check(
    w: WaveFunction,
    p: float,
    check_tol: float = DEFAULT_CHECK_TOL,
    saturation_tol: float = DEFAULT_SATURATION_TOL,
) -> InequalityReport:
    """N_{p/2}(|psi|^2) N_{q/2}(|psi_hat|^2) >= hbar^2 / 4, 1/p + 1/q = 1.

    Requires p >= 2 so that (p/2, q/2) covers [1, inf) x (1/2, 1]; the p < 2
    member of a pair is its q <-> p mirror.  slack = (lhs - rhs)/hbar^2,
    matching the absolute saturation convention for the product.
    """
    if p < 2.0:
        raise ValueError("use p >= 2 (smaller orders are the swapped pair)")
    q = p / (p - 1.0)
    pos, mom = _conjugate_densities(w)
    lhs = renyi_entropy_power(pos, p / 2.0) * renyi_entropy_power(mom, q / 2.0)
    rhs = w.hbar**2 / 4.0
    slack = (lhs - rhs) / w.hbar**2
    return _report("repur", lhs, rhs, slack, check_tol, saturation_tol)
