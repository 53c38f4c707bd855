"""Attrition DP: bidder-count distribution, passage times, endgame funnel."""

import math

import numpy as np
import pytest

from paytobid import (
    AttritionTable,
    AuctionParams,
    GameMode,
    ParameterError,
    bid_count_distribution,
    end_probability,
    endgame_time_fraction,
    exit_probability,
    expected_passage_time,
    hazard_rate,
    prob_two_player_endgame,
)

from helpers import (
    ATTRITION_POINTS,
    FEASIBLE_COMBOS,
    MC_COUNT,
    attrition_params,
    attrition_seed,
    enumerate_two_player_round,
    make_params,
)

LADDER = [10.0, 100.0, 1000.0]


def ladder_params(ratio, n=4):
    return AuctionParams(n=n, value=ratio, sale_price=0.0, bid_fee=1.0, rho=0.0)


# ---------------------------------------------------------------------------
# Exit probability and the bidder-count distribution.
# ---------------------------------------------------------------------------

def test_exit_probability_values():
    two = attrition_params(2, 10)
    assert exit_probability(two, 2) == pytest.approx(0.1, rel=1e-14)
    three = attrition_params(3, 10)
    # sqrt(0.1), frozen from the 50-digit evaluation.
    assert exit_probability(three, 3) == pytest.approx(0.31622776601683794, rel=1e-13)


def test_exit_probability_vanishes_with_the_win_ratio():
    assert exit_probability(ladder_params(1e6, n=2), 2) == pytest.approx(1e-6, rel=1e-10)


def test_exit_probability_requires_two_players():
    with pytest.raises(ParameterError):
        exit_probability(attrition_params(2, 10), 1)


def test_distribution_matches_two_player_enumeration():
    params = attrition_params(2, 10)  # q = 0.1, bid probability 0.9
    dist = bid_count_distribution(params, 2)
    exactly_one, _ = enumerate_two_player_round(0.9)
    assert dist[0] == pytest.approx(exactly_one, rel=1e-12)
    assert dist[0] == pytest.approx(0.18 / 0.99, rel=1e-12)  # frozen
    assert dist[1] == pytest.approx(0.81 / 0.99, rel=1e-12)  # frozen


@pytest.mark.parametrize("money,rho", FEASIBLE_COMBOS)
@pytest.mark.parametrize("k", range(2, 11))
def test_distribution_normalized(money, rho, k):
    dist = bid_count_distribution(make_params(money, rho=rho, n=10), k)
    assert dist.shape == (k,)
    assert abs(float(dist.sum()) - 1.0) <= 1e-12
    assert (dist >= 0).all()


def test_distribution_concentrates_on_everyone_bidding():
    params = ladder_params(1e6, n=3)
    dist = bid_count_distribution(params, 3)
    assert dist[2] > 0.99


# ---------------------------------------------------------------------------
# End probability is the hazard rate, module-independently.
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("money,rho", FEASIBLE_COMBOS)
@pytest.mark.parametrize("k", range(2, 11))
def test_end_probability_equals_hazard_rate(money, rho, k):
    params = make_params(money, rho=rho, n=10)
    assert abs(end_probability(params, k) - hazard_rate(params, k)) <= 1e-12


def test_end_probability_spot_values():
    assert end_probability(attrition_params(2, 10), 2) == pytest.approx(0.18 / 0.99, rel=1e-12)
    # q = 0.5 (bid probability one half): 2 * 0.25 / 0.75 = 2/3.
    half = AuctionParams(n=2, value=1.0, sale_price=0.0, bid_fee=0.5, rho=0.0)
    assert end_probability(half, 2) == pytest.approx(2.0 / 3.0, rel=1e-12)


def test_end_probability_vanishes_with_the_win_ratio():
    assert end_probability(ladder_params(1e6, n=3), 3) < 1e-3


# ---------------------------------------------------------------------------
# Passage times.
# ---------------------------------------------------------------------------

def test_two_player_passage_is_geometric():
    params = attrition_params(2, 10)
    # 1 / P(exactly one bid) = 0.99 / 0.18 = 5.5, frozen.
    assert expected_passage_time(params, 2, 1) == pytest.approx(5.5, rel=1e-12)


def test_passage_time_trivial_and_invalid_targets():
    params = attrition_params(4, 10)
    assert expected_passage_time(params, 3, 3) == 0.0
    assert expected_passage_time(params, 2, 5) == 0.0
    with pytest.raises(ParameterError):
        expected_passage_time(params, 4, 0)
    with pytest.raises(ParameterError):
        expected_passage_time(params, 1, 1)


def test_passage_time_at_least_one_round():
    for n in (2, 3, 4, 5):
        for target in range(1, n):
            assert expected_passage_time(attrition_params(n, 10), n, target) >= 1.0


def test_reaching_two_never_later_than_the_end():
    for ratio in LADDER:
        params = ladder_params(ratio)
        assert expected_passage_time(params, 4, 2) <= expected_passage_time(params, 4, 1)


def test_game_length_grows_with_value_fee_ratio():
    lengths = [expected_passage_time(ladder_params(r), 4, 1) for r in LADDER]
    assert lengths[0] < lengths[1] < lengths[2]


def test_absorption_weighted_variant_understates():
    params = attrition_params(2, 10)
    # The variant charges the absorption mass instead of unit time, so
    # the two-player geometric case collapses to one round; the default
    # renewal form keeps the 5.5-round answer the simulator reproduces.
    assert expected_passage_time(params, 2, 1, variant="absorption-weighted") == pytest.approx(
        1.0, rel=1e-12
    )
    assert expected_passage_time(params, 2, 1) == pytest.approx(5.5, rel=1e-12)
    with pytest.raises(ParameterError):
        expected_passage_time(params, 2, 1, variant="bogus")


# ---------------------------------------------------------------------------
# Two-player endgame probability.
# ---------------------------------------------------------------------------

def test_endgame_prob_three_player_closed_form():
    params = attrition_params(3, 10)
    dist = bid_count_distribution(params, 3)
    expected = dist[1] / (dist[0] + dist[1])
    assert prob_two_player_endgame(params, 3) == pytest.approx(expected, rel=1e-12)


def test_endgame_prob_requires_three_players():
    with pytest.raises(ParameterError):
        prob_two_player_endgame(attrition_params(3, 10), 2)


def test_endgame_prob_interior_for_four_players():
    assert 0.0 < prob_two_player_endgame(attrition_params(4, 10), 4) < 1.0


def test_endgame_prob_climbs_toward_one():
    for n in (3, 4):
        probs = [prob_two_player_endgame(ladder_params(r, n=n), n) for r in LADDER]
        assert probs[0] < probs[1] < probs[2]
        assert probs[2] > 0.9


# ---------------------------------------------------------------------------
# Endgame time fraction.
# ---------------------------------------------------------------------------

def test_time_fraction_interior_and_shrinking():
    fractions = [endgame_time_fraction(ladder_params(r), 4) for r in LADDER]
    assert all(0.0 < f < 1.0 for f in fractions)
    assert fractions[0] > fractions[1] > fractions[2]


def test_time_fraction_requires_three_players():
    with pytest.raises(ParameterError):
        endgame_time_fraction(attrition_params(3, 10), 2)


# ---------------------------------------------------------------------------
# Aggregate table.
# ---------------------------------------------------------------------------

def test_attrition_table_is_consistent_with_pointwise_ops():
    params = attrition_params(5, 10)
    table = AttritionTable.build(params)
    assert table.win_prob == pytest.approx(0.1, rel=1e-14)
    assert sorted(table.bid_count_dist) == [2, 3, 4, 5]
    for k, dist in table.bid_count_dist.items():
        np.testing.assert_allclose(dist, bid_count_distribution(params, k), rtol=1e-15)
        assert abs(float(dist.sum()) - 1.0) <= 1e-12
    assert sorted(table.two_player_endgame_prob) == [3, 4, 5]
    for k, prob in table.two_player_endgame_prob.items():
        assert 0.0 <= prob <= 1.0
        assert prob == pytest.approx(prob_two_player_endgame(params, k), rel=1e-15)
    for (k, target), rounds in table.expected_rounds.items():
        assert target < k
        assert rounds == pytest.approx(expected_passage_time(params, k, target), rel=1e-15)


# ---------------------------------------------------------------------------
# DP against the simulator.
# ---------------------------------------------------------------------------

@pytest.mark.slow
@pytest.mark.parametrize("n,ratio", ATTRITION_POINTS)
def test_dp_matches_simulation(mc, n, ratio):
    params = attrition_params(n, ratio)
    result = mc(params, GameMode.NO_REENTRY, MC_COUNT, attrition_seed(n, ratio))
    dp_length = expected_passage_time(params, n, 1)
    assert abs(result.mean_effective_length - dp_length) <= 3.0 * result.se_effective_length
    if n > 2:
        dp_two = expected_passage_time(params, n, 2)
        assert abs(result.mean_rounds_to_two - dp_two) <= 3.0 * result.se_rounds_to_two
        dp_funnel = prob_two_player_endgame(params, n)
        assert (
            abs(result.two_player_passage_fraction - dp_funnel)
            <= 3.0 * result.se_two_player_passage_fraction
        )
    else:
        assert result.mean_rounds_to_two is None
        assert result.two_player_passage_fraction is None
