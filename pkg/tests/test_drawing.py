from itertools import combinations

import numpy as np
import pytest
from scipy import stats

from plsim.drawing import (
    PrizeSchedule,
    best_payout,
    bracket_bounds,
    bracketed_payouts,
    draw_bracketed,
    draw_random,
    expected_interest,
    expected_payout,
    random_payouts,
    random_winner_matrix,
    worst_payout,
)
from plsim.pareto import ParetoParams
from plsim.population import AccountPopulation, generate

POP4 = AccountPopulation.from_balances([100.0, 200.0, 300.0, 400.0])
TWO_AT_100 = PrizeSchedule(2, 1.0)


class TestSchedule:
    def test_validation(self):
        with pytest.raises(ValueError):
            PrizeSchedule(0, 1.0)
        with pytest.raises(ValueError):
            PrizeSchedule(5, 0.0)

    def test_label(self):
        assert PrizeSchedule(1000, 1.0).label() == "1000x100%"
        assert PrizeSchedule(10, 99.0).label() == "10x9900%"


class TestExpectedPayout:
    def test_direct_formula(self):
        pop = AccountPopulation.from_balances(np.full(10, 3900.0))
        assert expected_payout(pop, PrizeSchedule(5, 1.0)) == pytest.approx(19_500.0)
        pop250 = AccountPopulation.from_balances(np.full(4, 250.0))
        assert expected_payout(pop250, PrizeSchedule(1, 2.0)) == pytest.approx(500.0)

    def test_matches_enumeration(self):
        # brute force over all C(4,2)=6 equally likely winner sets
        payouts = [POP4.balances[list(s)].sum() for s in combinations(range(4), 2)]
        assert expected_payout(POP4, TWO_AT_100) == pytest.approx(np.mean(payouts))
        assert expected_payout(POP4, TWO_AT_100) == pytest.approx(500.0)


class TestExpectedInterest:
    def test_paper_setups(self):
        assert expected_interest([PrizeSchedule(1000, 1.0)], 100_000) == 0.01
        assert expected_interest([PrizeSchedule(100, 9.0)], 100_000) == 0.009
        assert expected_interest([], 100_000) == 0.0

    def test_needs_accounts(self):
        with pytest.raises(ValueError):
            expected_interest([PrizeSchedule(1, 1.0)], 0)


class TestBracketBounds:
    def test_even_split(self):
        np.testing.assert_array_equal(bracket_bounds(4, 2), [0, 2, 4])

    def test_remainder_goes_to_first_brackets(self):
        np.testing.assert_array_equal(bracket_bounds(10, 3), [0, 4, 7, 10])

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            bracket_bounds(3, 4)
        with pytest.raises(ValueError):
            bracket_bounds(3, 0)


class TestDrawRandom:
    def test_rejects_oversized_schedule(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            draw_random(POP4, PrizeSchedule(5, 1.0), rng)

    def test_all_accounts_win_when_count_is_population(self):
        rng = np.random.default_rng(0)
        out = draw_random(POP4, PrizeSchedule(4, 2.0), rng)
        assert out.payout == pytest.approx(2.0 * 1000.0)
        assert sorted(out.winners.tolist()) == [0, 1, 2, 3]

    def test_outcome_invariants(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            out = draw_random(POP4, TWO_AT_100, rng)
            assert len(set(out.winners.tolist())) == 2
            assert out.payout == pytest.approx(POP4.balances[out.winners].sum())

    def test_subsets_equally_likely(self):
        # chi-square over the 6 possible winner sets at 60k draws
        index = {frozenset(s): i for i, s in enumerate(combinations(range(4), 2))}
        rng = np.random.default_rng(11)
        counts = np.zeros(6)
        per_account = np.zeros(4)
        draws = 60_000
        for _ in range(draws):
            out = draw_random(POP4, TWO_AT_100, rng)
            counts[index[frozenset(out.winners.tolist())]] += 1
            per_account[out.winners] += 1
        assert stats.chisquare(counts).pvalue > 0.001
        # each account wins with probability count/population = 1/2
        np.testing.assert_allclose(per_account / draws, 0.5, atol=0.011)


class TestDrawBracketed:
    def test_enumerated_outcomes(self):
        # brackets {100,200} and {300,400}: payouts 400/500/500/600 only
        rng = np.random.default_rng(13)
        seen = set()
        for _ in range(500):
            out = draw_bracketed(POP4, TWO_AT_100, rng)
            seen.add(out.payout)
            assert out.payout in (400.0, 500.0, 600.0)
        assert seen == {400.0, 500.0, 600.0}

    def test_combos_equally_likely(self):
        rng = np.random.default_rng(13)
        counts = np.zeros((2, 2))
        per_account = np.zeros(4)
        draws = 40_000
        for _ in range(draws):
            out = draw_bracketed(POP4, TWO_AT_100, rng)
            counts[out.winners.min(), out.winners.max() - 2] += 1
            per_account[out.winners] += 1
        assert stats.chisquare(counts.ravel()).pvalue > 0.001
        np.testing.assert_allclose(per_account / draws, 0.5, atol=0.013)

    def test_single_prize_is_uniform_over_population(self):
        # one bracket covers everything, matching the random mechanism
        rng = np.random.default_rng(17)
        counts = np.zeros(4)
        for _ in range(40_000):
            out = draw_bracketed(POP4, PrizeSchedule(1, 1.0), rng)
            counts[out.winners[0]] += 1
        assert stats.chisquare(counts).pvalue > 0.001

    def test_rejects_oversized_schedule(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            draw_bracketed(POP4, PrizeSchedule(9, 1.0), rng)


class TestWorstBest:
    def test_four_account_values(self):
        assert worst_payout(POP4, TWO_AT_100, "random") == pytest.approx(700.0)
        assert worst_payout(POP4, TWO_AT_100, "bracketed") == pytest.approx(600.0)
        assert best_payout(POP4, TWO_AT_100, "random") == pytest.approx(300.0)
        assert best_payout(POP4, TWO_AT_100, "bracketed") == pytest.approx(400.0)

    def test_unknown_mechanism(self):
        with pytest.raises(ValueError):
            worst_payout(POP4, TWO_AT_100, "sorted")

    def test_bracketing_tightens_bounds_everywhere(self):
        rng = np.random.default_rng(23)
        for _ in range(300):
            n = int(rng.integers(2, 200))
            pop = generate(ParetoParams(1.04, 150.0), n, rng)
            sched = PrizeSchedule(int(rng.integers(1, n + 1)), float(rng.uniform(0.1, 10)))
            assert worst_payout(pop, sched, "bracketed") <= worst_payout(pop, sched, "random")
            assert best_payout(pop, sched, "bracketed") >= best_payout(pop, sched, "random")

    def test_payouts_stay_within_bounds(self):
        pop = generate(ParetoParams(1.12, 250.0), 500, 31)
        sched = PrizeSchedule(25, 3.0)
        rng = np.random.default_rng(37)
        for mech, drawer in (("random", draw_random), ("bracketed", draw_bracketed)):
            lo, hi = best_payout(pop, sched, mech), worst_payout(pop, sched, mech)
            for _ in range(300):
                assert lo <= drawer(pop, sched, rng).payout <= hi


class TestBatchHelpers:
    def test_random_payouts_match_single_draws(self):
        pop = generate(ParetoParams(1.04, 150.0), 300, 41)
        sched = PrizeSchedule(7, 2.0)
        batch = random_payouts(pop, sched, np.random.default_rng(99), 50)
        rng = np.random.default_rng(99)
        singles = np.array([draw_random(pop, sched, rng).payout for _ in range(50)])
        np.testing.assert_allclose(batch, singles)

    def test_bracketed_payouts_match_single_draws(self):
        pop = generate(ParetoParams(1.04, 150.0), 300, 43)
        sched = PrizeSchedule(6, 1.0)
        batch = bracketed_payouts(pop, sched, np.random.default_rng(7), 40)
        rng = np.random.default_rng(7)
        singles = np.array([draw_bracketed(pop, sched, rng).payout for _ in range(40)])
        np.testing.assert_allclose(batch, singles)

    def test_winner_matrix_consistent_with_payouts(self):
        pop = generate(ParetoParams(1.04, 150.0), 300, 47)
        sched = PrizeSchedule(9, 4.0)
        winners = random_winner_matrix(pop, sched, np.random.default_rng(31), 60)
        replayed = pop.balances[winners].sum(axis=1) * sched.multiple
        direct = random_payouts(pop, sched, np.random.default_rng(31), 60)
        np.testing.assert_allclose(replayed, direct)
        # rows are distinct winner sets
        assert all(len(set(row.tolist())) == sched.count for row in winners)

    def test_payout_linear_in_multiple(self):
        pop = generate(ParetoParams(1.04, 150.0), 200, 53)
        base = random_payouts(pop, PrizeSchedule(5, 1.0), np.random.default_rng(3), 30)
        doubled = random_payouts(pop, PrizeSchedule(5, 2.0), np.random.default_rng(3), 30)
        np.testing.assert_array_equal(doubled, 2.0 * base)
