"""Exception types raised across the package.

Every computational failure mode gets its own class so that callers (and the
CLI) can report the error name without parsing messages.
"""

from __future__ import annotations


class RepscanError(Exception):
    """Base class for all package-specific errors."""


class AllZeroDensity(RepscanError):
    """Density has no positive mass (or genuinely negative entries)."""


class GridTooCoarse(RepscanError):
    """An axis has too few points for the finite-difference stencil."""


class KernelWiderThanGrid(RepscanError):
    """Smoothing kernel support exceeds half the grid extent."""


class NotNormalized(RepscanError):
    """Wavefunction L2 norm deviates from 1 beyond tolerance."""


class SupportExceedsGrid(RepscanError):
    """Generated state would have significant mass outside the grid box."""


class EmptyBox(RepscanError):
    """Uniform-density box contains no grid points or has zero width."""


class NonIntegrablePower(RepscanError):
    """The integral of F^q is not finite/representable."""


class QExpDomain(RepscanError):
    """q-exponential argument left its domain [0, inf)."""


class DerivativeUnstable(RepscanError):
    """Richardson extrapolation of the noise derivative did not converge."""


class InsufficientLadder(RepscanError):
    """Entropy-power ladder has fewer entries than requested cumulants."""


class DegenerateSupport(RepscanError):
    """Information values collapse to a single point; histogram undefined."""


class ReferenceMismatch(RepscanError):
    """Series reference is not mean-matched to the supplied cumulants."""


class IllConditionedWarning(UserWarning):
    """Cumulant extraction amplifies rounding noise beyond usefulness."""
