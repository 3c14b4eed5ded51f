"""Taylor approximations of basket and spread prices.

The spread engine expands the conditional price C(y) around a chosen point y*
to any order up to ``SPREAD_ORDER_CAP``, with analytic derivatives through
order two and central finite differences above. The basket engine handles any
dimension at order <= ``BASKET_ORDER_CAP`` by evaluating the outer expectation
exactly through mixed exponential-power Gaussian moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import product

import numpy as np

from .conditional import (
    BasketContext,
    SpreadContext,
    b_of_ystar,
    basket_cond_price,
    basket_strike,
    cond_price,
    conditional_strike,
    d1_c,
    d2_c,
)
from .errors import NonpositiveStrike, OrderCapExceeded, PricingError
from .gaussian import mixed_exp_power_moment, norm_cdf, norm_pdf, std_normal_moment
from .model import BasketContract, MarketModel

#: Highest expansion order for the two-asset engine (finite-difference noise
#: dominates the derivative estimates beyond this).
SPREAD_ORDER_CAP = 6
#: Highest expansion order for the general basket engine (analytic derivatives
#: are implemented through order two).
BASKET_ORDER_CAP = 2


@dataclass(frozen=True)
class TaylorQuote:
    """An approximation result: price plus its per-order term breakdown."""

    order: int
    expansion_point: tuple[float, ...]
    price: float
    terms: tuple[float, ...]


def y_mean(model: MarketModel) -> np.ndarray:
    """Expected terminal log-returns of assets 2..d: (r - vol_k^2/2) T componentwise."""
    return (model.rate - 0.5 * model.vols[1:] ** 2) * model.maturity


def e_of_m(ctx: SpreadContext, m: int) -> float:
    """Moment sum E(m) = sum_v C(m, v) (vol1 rho sqrt(T))^{m-v} E[Z^v]; E(0) = 1."""
    if m < 0:
        raise ValueError("moment order must be nonnegative")
    a = float(ctx.model.vols[0]) * float(ctx.model.corr[0, 1]) * math.sqrt(ctx.model.maturity)
    return sum(math.comb(m, v) * a ** (m - v) * std_normal_moment(v) for v in range(m + 1))


def _fd_weights(order: int) -> list[tuple[float, float]]:
    # Central difference stencil for the order-th derivative: offsets in units
    # of h and signed binomial weights (divide by h**order after summing).
    return [((order / 2.0 - i), (-1.0) ** i * math.comb(order, i)) for i in range(order + 1)]


def spread_derivative(ctx: SpreadContext, y: float, order: int) -> float:
    """D^order C(y) for the spread kernel.

    Orders 0-2 are analytic; higher orders are central finite differences of
    the analytic second derivative, with a step that grows with the residual
    differentiation order to keep rounding noise in check.
    """
    if order == 0:
        return cond_price(ctx, y)
    if order == 1:
        return d1_c(ctx, y)
    if order == 2:
        return d2_c(ctx, y)
    residual = order - 2
    h = max(1e-4, 1e-3 * abs(y)) * residual
    acc = 0.0
    for offset, weight in _fd_weights(residual):
        acc += weight * d2_c(ctx, y + offset * h)
    return acc / h**residual


def price_spread_taylor(
    model: MarketModel, contract: BasketContract, n: int, ystar: float
) -> TaylorQuote:
    """Order-n expansion of a two-asset spread price around y*.

    General weights with w1 > 0 are folded into the unit-spread kernel (the
    conditional strike absorbs K/w1 and -w2 S2/w1) and the result is scaled by
    w1. Requires K(y*) > 0 whenever n >= 1.
    """
    if n < 0:
        raise ValueError("expansion order must be nonnegative")
    if n > SPREAD_ORDER_CAP:
        raise OrderCapExceeded(f"spread expansion order {n} exceeds cap {SPREAD_ORDER_CAP}")
    ctx = SpreadContext.build(model, contract)
    ystar = float(ystar)
    if n >= 1 and conditional_strike(ctx, ystar) <= 0.0:
        raise NonpositiveStrike(
            f"derivatives undefined at the expansion point: K({ystar}) <= 0"
        )
    w1 = float(contract.weights[0])
    vol2 = float(model.vols[1])
    sqrt_t = math.sqrt(model.maturity)
    b = b_of_ystar(ctx, ystar)
    terms = []
    for l in range(n + 1):
        weight_sum = sum(
            math.comb(l, m) * (sqrt_t * vol2) ** m * b ** (l - m) * e_of_m(ctx, m)
            for m in range(l + 1)
        )
        terms.append(w1 * spread_derivative(ctx, ystar, l) / math.factorial(l) * weight_sum)
    return TaylorQuote(
        order=n, expansion_point=(ystar,), price=math.fsum(terms), terms=tuple(terms)
    )


def price_spread_closed12(ctx: SpreadContext, ystar: float) -> tuple[float, float]:
    """First- and second-order prices from the closed forms.

    p1 = C + D1C (B + T vol1 vol2 rho), and
    p2 = p1 + D2C [B^2 + 2 T vol1 vol2 rho B + T vol2^2 (1 + T vol1^2 rho^2)] / 2,
    scaled by w1. Must agree with ``price_spread_taylor`` at n = 1, 2.
    """
    ystar = float(ystar)
    vol1, vol2 = (float(v) for v in ctx.model.vols)
    rho = float(ctx.model.corr[0, 1])
    t = ctx.model.maturity
    w1 = float(ctx.contract.weights[0])
    b = b_of_ystar(ctx, ystar)
    cross = t * vol1 * vol2 * rho
    p1 = cond_price(ctx, ystar) + d1_c(ctx, ystar) * (b + cross)
    p2 = p1 + 0.5 * d2_c(ctx, ystar) * (
        b * b + 2.0 * cross * b + t * vol2**2 * (1.0 + t * vol1**2 * rho**2)
    )
    return float(w1 * p1), float(w1 * p2)


def _strike_exp_terms(ctx: BasketContext) -> list[tuple[float, np.ndarray]]:
    # K(y) as a sum of exponentials of affine functions: list of (coef, theta)
    # with K(y) = sum coef * e^{theta . y}.
    w = ctx.contract.weights
    spots = ctx.model.spots
    base = math.exp(ctx.strike_exponent_const) / float(w[0])
    terms = [(ctx.contract.strike * base, -ctx.cond.slope)]
    d = ctx.model.dim
    for j in range(d - 1):
        theta = -ctx.cond.slope + np.eye(d - 1)[j]
        terms.append((-float(w[j + 1]) * float(spots[j + 1]) * base, theta))
    return terms


def _strike_partial(terms, y: np.ndarray, orders) -> float:
    # D^orders K(y) for K given as a sum of exponential-affine terms.
    acc = 0.0
    for coef, theta in terms:
        acc += coef * math.exp(float(theta @ y)) * float(np.prod(theta ** np.asarray(orders)))
    return acc


def _bs_strike_derivatives(ctx: BasketContext, strike: float) -> tuple[float, float]:
    # First and second derivatives of the call price with respect to the
    # strike; the sure-exercise branch (strike <= 0) is linear.
    t = ctx.model.maturity
    disc = math.exp(-ctx.model.rate * t)
    if strike <= 0.0:
        return -disc, 0.0
    vol_sqrt_t = ctx.sigma * math.sqrt(t)
    d1 = (math.log(float(ctx.model.spots[0]) / strike)
          + (ctx.model.rate + 0.5 * ctx.sigma**2) * t) / vol_sqrt_t
    d2 = d1 - vol_sqrt_t
    return -disc * float(norm_cdf(d2)), disc * float(norm_pdf(d2)) / (strike * vol_sqrt_t)


def _basket_derivative(ctx: BasketContext, terms, y: np.ndarray, orders) -> float:
    # D^orders C(y) by composing strike derivatives with the chain rule.
    total = sum(orders)
    strike = basket_strike(ctx, y)
    if total == 0:
        return basket_cond_price(ctx, y)
    fp, fpp = _bs_strike_derivatives(ctx, strike)
    if total == 1:
        return fp * _strike_partial(terms, y, orders)
    nonzero = [k for k, l in enumerate(orders) if l > 0]
    unit = [0] * len(orders)
    if len(nonzero) == 1:
        unit[nonzero[0]] = 1
        dk = _strike_partial(terms, y, unit)
        return fpp * dk * dk + fp * _strike_partial(terms, y, orders)
    unit_a = list(unit)
    unit_a[nonzero[0]] = 1
    unit_b = list(unit)
    unit_b[nonzero[1]] = 1
    return (fpp * _strike_partial(terms, y, unit_a) * _strike_partial(terms, y, unit_b)
            + fp * _strike_partial(terms, y, orders))


def price_basket_taylor(
    model: MarketModel, contract: BasketContract, n: int, ystar
) -> TaylorQuote:
    """Order-n expansion of a general basket price (n <= 2, any dimension >= 2).

    The outer expectation over the conditioning log-returns is evaluated in
    closed form: the exponential weight is affine in those returns, so each
    term reduces to a mixed exponential-power Gaussian moment.
    """
    if n < 0:
        raise ValueError("expansion order must be nonnegative")
    if n > BASKET_ORDER_CAP:
        raise OrderCapExceeded(f"basket expansion order {n} exceeds cap {BASKET_ORDER_CAP}")
    ctx = BasketContext.build(model, contract)
    ystar = np.atleast_1d(np.asarray(ystar, dtype=float))
    d = model.dim
    if ystar.shape != (d - 1,):
        raise ValueError(f"ystar must have length {d - 1}")
    terms_k = _strike_exp_terms(ctx)
    w1 = float(contract.weights[0])
    exp_const = math.exp(
        -(model.rate - 0.5 * ctx.sigma**2) * model.maturity + ctx.cond.intercept
    )
    mean_rest = ctx.law.mean[1:]
    cov_rest = ctx.law.cov[1:, 1:]
    per_order = []
    for l in range(n + 1):
        acc = 0.0
        for orders in product(range(l + 1), repeat=d - 1):
            if sum(orders) != l:
                continue
            deriv = _basket_derivative(ctx, terms_k, ystar, orders)
            factorials = math.prod(math.factorial(k) for k in orders)
            moment = exp_const * mixed_exp_power_moment(
                mean_rest, cov_rest, ctx.cond.slope, ystar, orders
            )
            acc += deriv / factorials * moment
        per_order.append(w1 * acc)
    return TaylorQuote(
        order=n,
        expansion_point=tuple(float(v) for v in ystar),
        price=math.fsum(per_order),
        terms=tuple(per_order),
    )


def approx_delta(
    model: MarketModel,
    contract: BasketContract,
    n: int,
    ystar,
    asset: int,
    bump: float | None = None,
) -> float:
    """Approximate delta of the order-n price with respect to spot ``asset``.

    Central difference of the expansion price under a symmetric spot bump
    (default relative size 1e-4); the expansion point is held fixed.
    """
    if not 0 <= asset < model.dim:
        raise ValueError(f"asset index must be in [0, {model.dim})")
    spot = float(model.spots[asset])
    h = bump if bump is not None else 1e-4 * spot
    if h <= 0:
        raise ValueError("bump must be positive")

    def priced(shift: float) -> float:
        spots = model.spots.copy()
        spots[asset] = spot + shift
        bumped = replace(model, spots=spots)
        if model.dim == 2:
            return price_spread_taylor(bumped, contract, n, float(np.atleast_1d(ystar)[0])).price
        return price_basket_taylor(bumped, contract, n, ystar).price

    return (priced(h) - priced(-h)) / (2.0 * h)


def margrabe_exact(model: MarketModel, contract: BasketContract) -> float:
    """Exact price of a two-asset exchange option (strike must be zero).

    With ``sm^2 = vol1^2 + vol2^2 - 2 rho vol1 vol2`` the price is
    ``W1 N(d1) - W2 N(d2)`` for the effective legs ``W1 = w1 S1`` and
    ``W2 = -w2 S2``, ``d1 = [ln(W1/W2) + sm^2 T / 2] / (sm sqrt(T))`` and
    ``d2 = d1 - sm sqrt(T)``.
    """
    if model.dim != 2 or contract.dim != 2:
        raise PricingError("the exchange-option formula requires two assets")
    if contract.strike != 0.0:
        raise PricingError("margrabe requires strike 0")
    w1, w2 = (float(w) for w in contract.weights)
    if w2 >= 0:
        raise PricingError("the exchange-option formula requires a short second leg")
    leg1 = w1 * float(model.spots[0])
    leg2 = -w2 * float(model.spots[1])
    vol1, vol2 = (float(v) for v in model.vols)
    rho = float(model.corr[0, 1])
    sm = math.sqrt(max(vol1**2 + vol2**2 - 2.0 * rho * vol1 * vol2, 0.0))
    if sm == 0.0:
        return max(leg1 - leg2, 0.0)
    sm_sqrt_t = sm * math.sqrt(model.maturity)
    d1 = (math.log(leg1 / leg2) + 0.5 * sm_sqrt_t**2) / sm_sqrt_t
    return leg1 * float(norm_cdf(d1)) - leg2 * float(norm_cdf(d1 - sm_sqrt_t))
