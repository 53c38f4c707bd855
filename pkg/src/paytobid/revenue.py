"""Seller revenue: hazard rate, entrants per round, fee series, closed form.

An "effective round" is a round conditioned on at least one bid
(all-pass rounds are replayed under the tie-breaking rule, so they
carry no fees and no information).  With stationary mixing the game
length is geometric in the hazard rate and the fee income telescopes
into the closed form s + c * u(v - s) / u(c).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .equilibrium import AuctionParams, ParameterError, bid_probability

DEFAULT_TRUNCATION_TOL = 1e-9


@dataclass(frozen=True)
class RevenueBreakdown:
    """Expected seller income split into sale price and bid fees.

    hazard, expected_entrants and expected_length are evaluated at the
    full player count; total itself does not depend on it.
    """

    sale_price_component: float
    fee_component: float
    total: float
    hazard: float
    expected_entrants: float
    expected_length: float


def hazard_rate(params: AuctionParams, k: int) -> float:
    """Chance an effective round ends the game (exactly one bid).

    k * p * (1-p)**(k-1) / (1 - (1-p)**k), the probability of a single
    bidder conditional on not all k players passing.
    """
    p = bid_probability(params, k)
    stay_out = 1.0 - p
    return k * p * stay_out ** (k - 1) / (1.0 - stay_out**k)


def expected_entrants(params: AuctionParams, k: int) -> float:
    """Expected number of fee-paying bids in an effective round.

    k * p / (1 - (1-p)**k); always above k * p because conditioning on
    at least one bid removes the zero-bid outcome, and never above k.
    """
    p = bid_probability(params, k)
    return k * p / (1.0 - (1.0 - p) ** k)


def revenue_series(
    params: AuctionParams, truncation_tol: float = DEFAULT_TRUNCATION_TOL
) -> float:
    """Fee income summed round by round under stationary mixing.

    Evaluates sum_t (1-h)**(t-1) * c * Q term by term and stops once the
    exact geometric tail (1-h)**t * c * Q / h drops below the
    truncation tolerance.  Returns the fee component only; add the sale
    price for the total.  Defined for the stationary (re-entry) regime.
    """
    if not truncation_tol > 0:
        raise ParameterError(
            f"truncation tolerance must be positive, got {truncation_tol!r}"
        )
    h = hazard_rate(params, params.n)
    per_round_fees = params.bid_fee * expected_entrants(params, params.n)
    decay = 1.0 - h
    # Kahan-compensated sum, with the survival weight recomputed by a
    # direct power every 256 rounds: a small hazard can need millions
    # of terms, and without both fixes the accumulated drift swamps
    # the truncation tolerance.
    fee = 0.0
    compensation = 0.0
    survival = 1.0
    t = 0
    while True:
        term = survival * per_round_fees - compensation
        new_fee = fee + term
        compensation = (new_fee - fee) - term
        fee = new_fee
        t += 1
        survival = decay**t if t % 256 == 0 else survival * decay
        if survival * per_round_fees / h < truncation_tol:
            return fee


def closed_form_revenue(params: AuctionParams) -> RevenueBreakdown:
    """Expected revenue s + c * u(v - s) / u(c) with its round statistics.

    The total carries no dependence on the player count: the per-round
    fee flow and the hazard both vary with n but their ratio collapses
    to c / (1-p)**(n-1) = c * u(v-s) / u(c).  At rho = 0 the total
    reduces to the object value itself.
    """
    u = params.utility
    fee = params.bid_fee * (
        u.evaluate(params.value - params.sale_price) / u.evaluate(params.bid_fee)
    )
    h = hazard_rate(params, params.n)
    # For extreme premiums the mixing probability rounds to exactly 1
    # and the representable hazard underflows to 0; the total is still
    # well defined, so report the degenerate length as infinite rather
    # than failing.
    length = math.inf if h == 0.0 else 1.0 / h
    return RevenueBreakdown(
        sale_price_component=params.sale_price,
        fee_component=fee,
        total=params.sale_price + fee,
        hazard=h,
        expected_entrants=expected_entrants(params, params.n),
        expected_length=length,
    )


def revenue_supremum(params: AuctionParams) -> float:
    """Least upper bound of the total over all valid (sale_price, bid_fee).

    Equals u(value) for rho < 0, approached as sale_price = 0 and
    bid_fee -> 0; for rho = 0 the supremum is the object value itself
    (the closed form is constant in (s, c) there).
    """
    if params.rho == 0.0:
        return params.value
    return params.utility.evaluate(params.value)
