"""Prize schedules and drawing mechanisms.

Two ways to pick winners for a drawing of ``count`` prizes worth
``multiple`` times the winning balance:

* random: a uniformly random subset of ``count`` accounts, without
              replacement, so no account can win twice in one drawing.
* bracketed: accounts sorted ascending by balance and split into ``count``
              contiguous brackets of (near-)equal size; one winner drawn
              uniformly from each bracket. This caps the worst case (the
              largest accounts can no longer all win together) and raises the
              best case, while every account keeps the same chance of winning
              whenever ``count`` divides the population size.

The total payout of a drawing is ``multiple`` times the sum of the winners'
balances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .population import AccountPopulation

MECHANISMS = ("random", "bracketed")

# rows per slice when batching bracketed draws, keeps gather buffers small
_BATCH_ROWS = 2048


@dataclass(frozen=True)
class PrizeSchedule:
    """Number of prizes per drawing and prize size as a fraction of balance."""

    count: int
    multiple: float

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("a schedule needs at least one prize")
        if not self.multiple > 0.0:
            raise ValueError("prize multiple must be positive")

    def label(self) -> str:
        return f"{self.count}x{self.multiple * 100:g}%"


@dataclass(frozen=True)
class DrawOutcome:
    """Winning account indices (distinct) and the resulting total payout."""

    winners: np.ndarray
    payout: float


def expected_payout(pop: AccountPopulation, sched: PrizeSchedule) -> float:
    """count * multiple * mean balance; exact for both mechanisms because
    every account is equally likely to win each prize."""
    return sched.count * sched.multiple * pop.mean


def expected_interest(schedules, n_accounts: int) -> float:
    """Aggregate prize cost as a rate: sum of count*multiple over schedules
    divided by the number of accounts."""
    if n_accounts < 1:
        raise ValueError("need at least one account")
    return sum(s.count * s.multiple for s in schedules) / n_accounts


def bracket_bounds(n: int, k: int) -> np.ndarray:
    """Boundaries of ``k`` contiguous brackets over ``n`` sorted accounts.

    Returns k+1 offsets into the ascending sort order. When k does not divide
    n, the first ``n % k`` brackets take one extra account, keeping all sizes
    within one of each other.
    """
    if k < 1 or k > n:
        raise ValueError(f"cannot split {n} accounts into {k} brackets")
    base, rem = divmod(n, k)
    sizes = np.full(k, base, dtype=np.int64)
    sizes[:rem] += 1
    return np.concatenate(([0], np.cumsum(sizes)))


def _check_drawable(pop: AccountPopulation, sched: PrizeSchedule):
    if sched.count > pop.count:
        raise ValueError(
            f"cannot draw {sched.count} distinct winners from {pop.count} accounts"
        )


def draw_random(pop: AccountPopulation, sched: PrizeSchedule,
                rng: np.random.Generator) -> DrawOutcome:
    """One drawing with winners chosen uniformly without replacement."""
    _check_drawable(pop, sched)
    winners = rng.choice(pop.count, size=sched.count, replace=False, shuffle=False)
    payout = float(pop.balances[winners].sum() * sched.multiple)
    return DrawOutcome(winners=winners, payout=payout)


def draw_bracketed(pop: AccountPopulation, sched: PrizeSchedule,
                   rng: np.random.Generator) -> DrawOutcome:
    """One drawing with one uniform winner per balance bracket."""
    _check_drawable(pop, sched)
    bounds = bracket_bounds(pop.count, sched.count)
    sizes = np.diff(bounds)
    positions = bounds[:-1] + rng.integers(0, sizes)
    winners = pop.sort_order()[positions]
    payout = float(pop.balances[winners].sum() * sched.multiple)
    return DrawOutcome(winners=winners, payout=payout)


def random_payouts(pop: AccountPopulation, sched: PrizeSchedule,
                   rng: np.random.Generator, draws: int) -> np.ndarray:
    """Payouts of ``draws`` independent random-mechanism drawings."""
    _check_drawable(pop, sched)
    bal = pop.balances
    n, k = pop.count, sched.count
    out = np.empty(draws)
    for d in range(draws):
        out[d] = bal[rng.choice(n, size=k, replace=False, shuffle=False)].sum()
    return out * sched.multiple


def random_winner_matrix(pop: AccountPopulation, sched: PrizeSchedule,
                         rng: np.random.Generator, draws: int) -> np.ndarray:
    """Winner index sets of ``draws`` random drawings, one row per drawing.

    Used where payouts must be re-evaluated later against modified balances
    (the cap experiment re-prices identical winner sets at every cap level).
    """
    _check_drawable(pop, sched)
    n, k = pop.count, sched.count
    winners = np.empty((draws, k), dtype=np.int64)
    for d in range(draws):
        winners[d] = rng.choice(n, size=k, replace=False, shuffle=False)
    return winners


def bracketed_payouts(pop: AccountPopulation, sched: PrizeSchedule,
                      rng: np.random.Generator, draws: int) -> np.ndarray:
    """Payouts of ``draws`` independent bracketed drawings."""
    _check_drawable(pop, sched)
    sbal = pop.sorted_balances()
    bounds = bracket_bounds(pop.count, sched.count)
    starts, sizes = bounds[:-1], np.diff(bounds)
    out = np.empty(draws)
    for lo in range(0, draws, _BATCH_ROWS):
        m = min(_BATCH_ROWS, draws - lo)
        positions = starts[None, :] + rng.integers(0, sizes, size=(m, sched.count))
        out[lo:lo + m] = sbal[positions].sum(axis=1)
    return out * sched.multiple


def worst_payout(pop: AccountPopulation, sched: PrizeSchedule,
                 mechanism: str) -> float:
    """Largest payout the mechanism can produce for this sample.

    random: the ``count`` largest accounts all win. bracketed: each bracket's
    largest account wins.
    """
    sbal = _mechanism_sorted(pop, sched, mechanism)
    if mechanism == "random":
        total = sbal[-sched.count:].sum()
    else:
        total = sbal[bracket_bounds(pop.count, sched.count)[1:] - 1].sum()
    return float(total * sched.multiple)


def best_payout(pop: AccountPopulation, sched: PrizeSchedule,
                mechanism: str) -> float:
    """Smallest payout the mechanism can produce for this sample."""
    sbal = _mechanism_sorted(pop, sched, mechanism)
    if mechanism == "random":
        total = sbal[:sched.count].sum()
    else:
        total = sbal[bracket_bounds(pop.count, sched.count)[:-1]].sum()
    return float(total * sched.multiple)


def _mechanism_sorted(pop, sched, mechanism) -> np.ndarray:
    if mechanism not in MECHANISMS:
        raise ValueError(f"unknown mechanism {mechanism!r}, expected one of {MECHANISMS}")
    _check_drawable(pop, sched)
    return pop.sorted_balances()
