"""Marginals and normalized moments of a joint photon distribution."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .master import JointDistribution

__all__ = ["MomentSummary", "marginals", "moments", "classify"]

# sigma^2 within this band of 1 is reported as plain Poissonian rather than
# trusting sub-tolerance wiggles of the solver.
DEAD_BAND = 1e-3


@dataclass(frozen=True)
class MomentSummary:
    """Per-mode means and normalized variances sigma^2 = (<n^2>-<n>^2)/<n>.

    A mode stuck at exactly zero photons has no defined normalized variance;
    it is reported as 0.0 with the matching zero_mean flag set.
    """

    mean1: float
    mean2: float
    var1_norm: float
    var2_norm: float
    zero_mean1: bool = False
    zero_mean2: bool = False


def marginals(dist: JointDistribution) -> tuple[np.ndarray, np.ndarray]:
    """Per-mode photon-number distributions P1(n) and P2(n)."""
    return dist.p.sum(axis=1), dist.p.sum(axis=0)


def _mode_moments(marginal: np.ndarray) -> tuple[float, float, bool]:
    n = np.arange(marginal.size)
    mean = float(marginal @ n)
    if mean <= 0.0:
        return 0.0, 0.0, True
    second = float(marginal @ (n * n))
    return mean, (second - mean * mean) / mean, False


def moments(dist: JointDistribution) -> MomentSummary:
    """Exact sums over the truncated grid; no tail extrapolation."""
    p1, p2 = marginals(dist)
    mean1, var1, zero1 = _mode_moments(p1)
    mean2, var2, zero2 = _mode_moments(p2)
    return MomentSummary(
        mean1=mean1,
        mean2=mean2,
        var1_norm=var1,
        var2_norm=var2,
        zero_mean1=zero1,
        zero_mean2=zero2,
    )


def classify(var_norm: float, dead_band: float = DEAD_BAND) -> str:
    """Label photon statistics from the normalized variance."""
    if var_norm > 1.0 + dead_band:
        return "super-Poissonian"
    if var_norm < 1.0 - dead_band:
        return "sub-Poissonian"
    return "Poissonian"
