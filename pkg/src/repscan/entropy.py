"""Differential entropies and entropy powers.

The Renyi entropy power of order p is

    N_p(X) = (1/2pi) p^(-p'/p) exp((2/D) I_p(X)),   1/p + 1/p' = 1,

the variance of the Gaussian carrying the same order-p Renyi entropy I_p.
At p = 1 every formula routes through the analytic Shannon limit
N_1 = exp((2/D) H) / (2 pi e) instead of evaluating 0/0.  The Tsallis
entropy power uses the q-deformed exponential and coincides with N_q.

All internal computation is in nats; bases convert at the boundary through
the exact factor ln 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientLadder, NonIntegrablePower, QExpDomain
from .grid import GriddedDensity, quadrature_weights

LN2 = math.log(2.0)
_SHANNON_EPS = 1e-8


@dataclass(frozen=True)
class EntropyValue:
    """An entropy with its unit base and order (order 1 means Shannon)."""

    value: float
    base: str
    order: float

    def __post_init__(self):
        if self.base not in ("nats", "bits"):
            raise ValueError(f"unknown base {self.base!r}")

    def to(self, base: str) -> "EntropyValue":
        if base == self.base:
            return self
        if base == "bits":
            return EntropyValue(self.value / LN2, "bits", self.order)
        if base == "nats":
            return EntropyValue(self.value * LN2, "nats", self.order)
        raise ValueError(f"unknown base {base!r}")


@dataclass(frozen=True)
class EntropyPowerCurve:
    """The ladder k -> N_{1 + k delta} feeding cumulant extraction."""

    delta: float
    powers: tuple[tuple[int, float], ...]
    dim: int
    convention: str = "nats_exp"
    base_index: float = 1.0

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        ks = [k for k, _ in self.powers]
        if ks != list(range(len(ks))):
            raise ValueError("ladder indices must be consecutive from 0")
        if any(n <= 0 for _, n in self.powers):
            raise ValueError("entropy powers must be positive")

    def __len__(self) -> int:
        return len(self.powers)

    @property
    def values(self) -> np.ndarray:
        return np.array([n for _, n in self.powers])

    def order(self, k: int) -> float:
        return self.base_index + k * self.delta


def log_integral_power(d: GriddedDensity, q: float) -> float:
    """ln of integral F^q dx, evaluated with the peak factored out."""
    if not q > 0:
        raise ValueError("q must be positive")
    v = d.values
    w = quadrature_weights(d.spec)
    peak = float(np.max(v))
    if not (peak > 0 and math.isfinite(peak)):
        raise NonIntegrablePower("density has no positive finite peak")
    with np.errstate(under="ignore", invalid="raise", over="raise"):
        try:
            total = float(np.sum(w * np.where(v > 0, (v / peak) ** q, 0.0)))
        except FloatingPointError as exc:
            raise NonIntegrablePower(f"integral of F^{q} not representable") from exc
    if not (total > 0 and math.isfinite(total)):
        raise NonIntegrablePower(f"integral of F^{q} not representable")
    return q * math.log(peak) + math.log(total)


def shannon_entropy(d: GriddedDensity, base: str = "nats") -> EntropyValue:
    """-integral F log F, with 0 log 0 = 0."""
    v = d.values
    w = quadrature_weights(d.spec)
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(v > 0, v * np.log(np.where(v > 0, v, 1.0)), 0.0)
    h = -float(np.sum(w * plogp))
    return EntropyValue(h, "nats", 1.0).to(base)


def renyi_entropy(d: GriddedDensity, q: float, base: str = "nats") -> EntropyValue:
    """(1/(1-q)) log integral F^q; q = 1 dispatches to Shannon."""
    if q == 1.0:
        return shannon_entropy(d, base)
    val = log_integral_power(d, q) / (1.0 - q)
    return EntropyValue(val, "nats", q).to(base)


def tsallis_entropy(d: GriddedDensity, q: float) -> EntropyValue:
    """(1/(1-q)) (integral F^q - 1), in nats-like units."""
    if q == 1.0:
        raise ValueError("Tsallis entropy needs q != 1 (q -> 1 gives Shannon)")
    a = math.exp(log_integral_power(d, q))
    return EntropyValue((a - 1.0) / (1.0 - q), "nats", q)


def _renyi_prefactor(p: float) -> float:
    # p^(-p'/p) with p' = p/(p-1); the p -> 1 limit is 1/e.
    return math.exp(-math.log(p) / (p - 1.0))


def renyi_entropy_power(d: GriddedDensity, p: float, convention: str = "nats_exp") -> float:
    if not p > 0:
        raise ValueError("order must be positive")
    dim = d.spec.dim
    if abs(p - 1.0) < _SHANNON_EPS:
        if convention == "bits_exp":
            h = shannon_entropy(d, "bits").value
            return 2.0 ** (2.0 * h / dim) / (2.0 * math.pi * math.e)
        h = shannon_entropy(d, "nats").value
        return math.exp(2.0 * h / dim) / (2.0 * math.pi * math.e)
    pref = _renyi_prefactor(p) / (2.0 * math.pi)
    if convention == "bits_exp":
        return pref * 2.0 ** (2.0 * renyi_entropy(d, p, "bits").value / dim)
    if convention == "nats_exp":
        return pref * math.exp(2.0 * renyi_entropy(d, p, "nats").value / dim)
    raise ValueError(f"unknown convention {convention!r}")


def tsallis_entropy_power(d: GriddedDensity, q: float) -> float:
    """(1/2pi) q^(-q'/q) [exp_q(S_q)]^(2/D); equals the Renyi entropy power."""
    if abs(q - 1.0) < _SHANNON_EPS:
        return renyi_entropy_power(d, 1.0)
    s = tsallis_entropy(d, q).value
    arg = 1.0 + (1.0 - q) * s
    if not arg > 0:
        raise QExpDomain(f"q-exponential argument {arg!r} outside (0, inf)")
    dim = d.spec.dim
    pref = _renyi_prefactor(q) / (2.0 * math.pi)
    return pref * arg ** (2.0 / (dim * (1.0 - q)))


def entropy_power_curve(
    d: GriddedDensity, delta: float, m: int, convention: str = "nats_exp"
) -> EntropyPowerCurve:
    """Entropy powers N_{1 + k delta} for k = 0..m-1."""
    if not 0.0 < delta <= 0.2:
        raise ValueError("delta must lie in (0, 0.2]")
    if m < 2:
        raise InsufficientLadder("a ladder needs at least 2 entries")
    powers = tuple(
        (k, renyi_entropy_power(d, 1.0 + k * delta, convention)) for k in range(m)
    )
    return EntropyPowerCurve(delta, powers, d.spec.dim, convention)


# ---------------------------------------------------------------------------
# q-deformed calculus (Tsallis algebra)
# ---------------------------------------------------------------------------

def q_log(x: float, q: float) -> float:
    """ln_q x = (x^(1-q) - 1)/(1-q), via expm1 to survive q near 1."""
    if q == 1.0:
        return math.log(x)
    return math.expm1((1.0 - q) * math.log(x)) / (1.0 - q)


def q_exp(x: float, q: float) -> float:
    """e_q^x = [1 + (1-q) x]^(1/(1-q)), defined for 1 + (1-q) x >= 0."""
    if q == 1.0:
        return math.exp(x)
    arg = (1.0 - q) * x
    if arg < -1.0:
        raise QExpDomain(f"q-exponential argument {1.0 + arg!r} outside [0, inf)")
    return math.exp(math.log1p(arg) / (1.0 - q))


def q_add(x: float, y: float, q: float) -> float:
    """x (+)_q y = x + y + (1-q) x y."""
    return x + y + (1.0 - q) * x * y
