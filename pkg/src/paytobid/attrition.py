"""No-re-entry attrition dynamics of the bid/no-bid game.

Without re-entry the active set shrinks to the bidders of the previous
round, so the game is a pure-death chain over player counts.  This
module computes the per-round bidder-count distribution, first-passage
round counts to a target player count, and the probability the game
funnels through a two-player endgame, all by dynamic programming
ascending in the player count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from .equilibrium import AuctionParams, ParameterError, win_probability

PASSAGE_VARIANTS = ("renewal", "absorption-weighted")


def exit_probability(params: AuctionParams, k: int) -> float:
    """Per-player probability of playing No Bid with k active players.

    The complement of the bid probability: lambda ** (1 / (k - 1)) with
    lambda = u(c) / u(v - s).
    """
    if not isinstance(k, int) or isinstance(k, bool) or k < 2:
        raise ParameterError(f"active player count must be an integer >= 2, got {k!r}")
    return math.exp(math.log(win_probability(params)) / (k - 1))


def bid_count_distribution(params: AuctionParams, k: int) -> np.ndarray:
    """Distribution of the number of bidders in an effective round.

    Entry m-1 holds P(m bidders) = C(k, m) (1-q)**m q**(k-m) / (1 - q**k)
    for m = 1..k, with q the per-player exit probability; the zero-bid
    outcome is conditioned away by the replay rule.
    """
    q = exit_probability(params, k)
    bid = 1.0 - q
    norm = 1.0 - q**k
    return np.array(
        [math.comb(k, m) * bid**m * q ** (k - m) / norm for m in range(1, k + 1)]
    )


def end_probability(params: AuctionParams, k: int) -> float:
    """Chance an effective round with k players ends the game.

    P(exactly one bidder); numerically the same quantity as the revenue
    module's hazard rate.
    """
    return float(bid_count_distribution(params, k)[0])


def _passage_table(
    params: AuctionParams, n_players: int, target: int, variant: str
) -> Dict[int, float]:
    """Expected rounds to reach <= target players, for every count up to n."""
    if variant not in PASSAGE_VARIANTS:
        raise ParameterError(
            f"unknown passage-time variant {variant!r}; expected one of {PASSAGE_VARIANTS}"
        )
    expected: Dict[int, float] = {k: 0.0 for k in range(1, target + 1)}
    for k in range(target + 1, n_players + 1):
        dist = bid_count_distribution(params, k)
        stay = float(dist[k - 1])  # all k players bid again
        if variant == "renewal":
            # Every effective round costs one round regardless of outcome.
            numerator = 1.0
        else:
            # Weighs the step by the single-round absorption mass
            # P(bidders <= target) instead of charging unit time; it
            # understates round counts (the two-player geometric case
            # collapses to 1.0) and exists only to measure the gap.
            numerator = float(dist[:target].sum())
        numerator += sum(
            float(dist[j - 1]) * expected[j] for j in range(target + 1, k)
        )
        expected[k] = numerator / (1.0 - stay)
    return expected


def expected_passage_time(
    params: AuctionParams, n_players: int, target: int, *, variant: str = "renewal"
) -> float:
    """Expected effective rounds before <= target players remain.

    Defined for a start of n_players without re-entry; returns 0 when
    n_players <= target (nothing to wait for).  target = 1 is the
    expected length of the whole game.
    """
    if not isinstance(target, int) or isinstance(target, bool) or target < 1:
        raise ParameterError(f"target player count must be an integer >= 1, got {target!r}")
    if not isinstance(n_players, int) or isinstance(n_players, bool) or n_players < 2:
        raise ParameterError(
            f"starting player count must be an integer >= 2, got {n_players!r}"
        )
    if n_players <= target:
        return 0.0
    return _passage_table(params, n_players, target, variant)[n_players]


def prob_two_player_endgame(params: AuctionParams, n_players: int) -> float:
    """Chance the game passes through a two-player state before ending.

    Solves P(k) = [P(Z=2) + sum_{3<=j<k} P(Z=j) P(j)] / (1 - P(Z=k))
    ascending in k, where Z is the bidder count of an effective round.
    Requires n_players >= 3; with two starting players the event is
    vacuous.
    """
    if not isinstance(n_players, int) or isinstance(n_players, bool) or n_players < 3:
        raise ParameterError(
            f"two-player endgame requires a start of at least 3 players, got {n_players!r}"
        )
    through: Dict[int, float] = {}
    for k in range(3, n_players + 1):
        dist = bid_count_distribution(params, k)
        numerator = float(dist[1]) + sum(
            float(dist[j - 1]) * through[j] for j in range(3, k)
        )
        through[k] = numerator / (1.0 - float(dist[k - 1]))
    return through[n_players]


def endgame_time_fraction(params: AuctionParams, n_players: int) -> float:
    """Share of the expected game length spent getting down to 2 players.

    expected_passage_time(n, 2) / expected_passage_time(n, 1); shrinks
    toward zero as the value-to-fee ratio grows, i.e. the two-player
    war eats the whole game.
    """
    if not isinstance(n_players, int) or isinstance(n_players, bool) or n_players < 3:
        raise ParameterError(
            f"endgame fraction requires a start of at least 3 players, got {n_players!r}"
        )
    return expected_passage_time(params, n_players, 2) / expected_passage_time(
        params, n_players, 1
    )


@dataclass(frozen=True)
class AttritionTable:
    """All attrition quantities for player counts up to params.n.

    win_prob: the ratio u(c)/u(v-s) shared by every row.
    bid_count_dist: k -> distribution over 1..k bidders (rows sum to 1).
    two_player_endgame_prob: k -> funnel probability, for k >= 3.
    expected_rounds: (k, target) -> expected effective rounds, target < k.
    """

    win_prob: float
    bid_count_dist: Dict[int, np.ndarray]
    two_player_endgame_prob: Dict[int, float]
    expected_rounds: Dict[Tuple[int, int], float]

    @classmethod
    def build(cls, params: AuctionParams) -> "AttritionTable":
        n = params.n
        dists = {k: bid_count_distribution(params, k) for k in range(2, n + 1)}
        endgame = {k: prob_two_player_endgame(params, k) for k in range(3, n + 1)}
        rounds: Dict[Tuple[int, int], float] = {}
        for target in range(1, n):
            table = _passage_table(params, n, target, "renewal")
            for k in range(target + 1, n + 1):
                rounds[(k, target)] = table[k]
        return cls(
            win_prob=win_probability(params),
            bid_count_dist=dists,
            two_player_endgame_prob=endgame,
            expected_rounds=rounds,
        )
