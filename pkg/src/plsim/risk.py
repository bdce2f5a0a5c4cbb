"""Scaled payout distributions, empirical VaR approximations, comparisons.

Payouts are scaled by the expected payout (count * multiple * mean balance),
so 1.0 means a drawing cost exactly its expectation. VaR at level q is read
off the ascending order statistics: the k-th smallest with
k = round((1 - q) * draws). The single exception is the level whose
resolution equals the whole distribution (q * draws == 1, e.g. 0.01% of
10,000 draws or 0.1% of 1,000 draws): there the maximum is reported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# float-roundoff guard when testing q * draws against the resolution limit
_LEVEL_EPS = 1e-9


@dataclass(frozen=True)
class PayoutDistribution:
    """Ascending payout/expected ratios from repeated drawings."""

    scaled_payouts: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.scaled_payouts, dtype=float)
        if arr.ndim != 1:
            raise ValueError("scaled payouts must be 1-D")
        if np.any(arr <= 0.0):
            raise ValueError("scaled payouts must be positive")
        if np.any(np.diff(arr) < 0.0):
            raise ValueError("scaled payouts must be sorted ascending")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "scaled_payouts", arr)

    @property
    def draws(self) -> int:
        return int(self.scaled_payouts.size)


def scale(payouts, expected: float) -> PayoutDistribution:
    """Divide payouts by the expected payout and sort ascending."""
    if not expected > 0.0:
        raise ValueError("expected payout must be positive")
    return PayoutDistribution(np.sort(np.asarray(payouts, dtype=float) / expected))


def var_approx(dist: PayoutDistribution, level: float) -> float:
    """Empirical VaR approximation at the given tail probability.

    Meaningful when level * draws >= 1; at or below that resolution limit
    the maximum is reported (the topmost approximation the distribution can
    resolve). Non-integer (1 - level) * draws rounds to nearest.
    """
    draws = dist.draws
    if draws == 0:
        raise ValueError("empty payout distribution")
    if not 0.0 < level < 1.0:
        raise ValueError("VaR level must lie in (0, 1)")
    values = dist.scaled_payouts
    if level * draws <= 1.0 + _LEVEL_EPS:
        return float(values[-1])
    k = int(round((1.0 - level) * draws))
    k = min(max(k, 1), draws)
    return float(values[k - 1])


def compare_percentage_higher(a, b) -> float:
    """Percent of paired runs where a_i is strictly higher than b_i."""
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    if a_arr.shape != b_arr.shape:
        raise ValueError("paired comparison requires equal-length inputs")
    return float(np.mean(a_arr > b_arr) * 100.0)


def relative_difference(random_avg: float, bracket_avg: float) -> float:
    """Percent by which the random average exceeds the bracket average."""
    return (random_avg / bracket_avg - 1.0) * 100.0


def std_dev(values) -> float:
    """Sample standard deviation (n-1 denominator) of per-run values."""
    arr = np.asarray(values, dtype=float)
    if arr.size < 2:
        raise ValueError("standard deviation needs at least two values")
    return float(np.std(arr, ddof=1))
