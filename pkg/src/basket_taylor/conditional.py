"""Conditional one-dimensional pricing.

Fixing the log-returns of assets 2..d at ``y`` turns the basket payoff into a
plain call on asset 1 with a shifted strike ``K(y)`` and the residual
conditional volatility. This module provides that call price ``C(y)``, the
strike map and its first two derivatives, and the analytic ``D1 C``, ``D2 C``
needed by the expansions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveInput, NonpositiveStrike
from .gaussian import ConditionalLaw, condition_first, norm_cdf, norm_pdf
from .model import BasketContract, MarketModel, TerminalLaw, terminal_law


def bs_call(spot: float, strike, vol: float, rate: float, maturity: float):
    """Black-Scholes call price; a strike <= 0 is priced as a sure exercise.

    For positive strikes this is ``S N(d1) - K e^{-rT} N(d2)`` with
    ``d1 = [ln(S/K) + (r + vol^2/2) T] / (vol sqrt(T))`` and
    ``d2 = d1 - vol sqrt(T)``; otherwise the option is certainly exercised and
    the value is the discounted forward ``S - K e^{-rT}``.

    ``strike`` may be a scalar or an array; the other arguments are scalars.
    """
    if not all(np.isfinite(v) for v in (spot, vol, rate, maturity)):
        raise ValueError("bs_call inputs must be finite")
    if spot <= 0 or vol <= 0 or maturity <= 0:
        raise NonPositiveInput("spot, vol and maturity must be strictly positive")
    k = np.asarray(strike, dtype=float)
    if not np.all(np.isfinite(k)):
        raise ValueError("bs_call inputs must be finite")
    disc = math.exp(-rate * maturity)
    vol_sqrt_t = vol * math.sqrt(maturity)
    out = np.empty(k.shape, dtype=float)
    pos = k > 0.0
    if np.any(pos):
        kp = k[pos]
        d1 = (np.log(spot / kp) + (rate + 0.5 * vol * vol) * maturity) / vol_sqrt_t
        d2 = d1 - vol_sqrt_t
        out[pos] = spot * norm_cdf(d1) - kp * disc * norm_cdf(d2)
    out[~pos] = spot - k[~pos] * disc
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SpreadContext:
    """Everything the two-asset expansion needs, precomputed.

    ``sigma`` is the annualized residual volatility ``sqrt(1 - rho^2) * vol1``
    and ``a_const`` the constant absorbing the exponential prefactors, so that
    the strike map reads ``K(y) = e^{-a_const} (k_eff e^{-beta y} +
    s2_eff e^{(1 - beta) y})`` with ``beta = (vol1 / vol2) rho``. General
    weights (w1 > 0) are folded into the unit-spread kernel through
    ``k_eff = K / w1`` and ``s2_eff = -w2 S2 / w1``; kernel prices must then be
    scaled by ``w1``.
    """

    model: MarketModel
    contract: BasketContract
    cond: ConditionalLaw
    a_const: float
    sigma: float

    @classmethod
    def build(cls, model: MarketModel, contract: BasketContract) -> "SpreadContext":
        if model.dim != 2 or contract.dim != 2:
            raise ValueError("SpreadContext requires a two-asset model and contract")
        vol1, vol2 = model.vols
        rho = float(model.corr[0, 1])
        t = model.maturity
        a_const = -(0.5 * rho**2 * vol1**2
                    + model.rate * (vol1 / vol2) * rho
                    - 0.5 * vol1 * vol2 * rho) * t
        sigma = math.sqrt(1.0 - rho * rho) * vol1
        cond = condition_first(terminal_law(model))
        return cls(model=model, contract=contract, cond=cond, a_const=a_const, sigma=sigma)

    @property
    def beta(self) -> float:
        """Slope of the conditional mean in the second log-return, (vol1/vol2) rho."""
        return float(self.cond.slope[0])

    @property
    def k_eff(self) -> float:
        return self.contract.strike / float(self.contract.weights[0])

    @property
    def s2_eff(self) -> float:
        w1, w2 = self.contract.weights
        return -float(w2) * float(self.model.spots[1]) / float(w1)


def conditional_strike(ctx: SpreadContext, y):
    """Strike of the conditional call, K(y). Elementwise on arrays."""
    y = np.asarray(y, dtype=float)
    beta = ctx.beta
    out = math.exp(-ctx.a_const) * (
        ctx.k_eff * np.exp(-beta * y) + ctx.s2_eff * np.exp((1.0 - beta) * y)
    )
    return float(out) if out.ndim == 0 else out


def cond_price(ctx: SpreadContext, y):
    """Conditional call price C(y) = bs_call(S1, K(y), sigma, r, T). Elementwise on arrays."""
    return bs_call(
        float(ctx.model.spots[0]),
        conditional_strike(ctx, y),
        ctx.sigma,
        ctx.model.rate,
        ctx.model.maturity,
    )


def d1_k(ctx: SpreadContext, y: float) -> float:
    """First derivative of the strike map K(y)."""
    beta = ctx.beta
    return math.exp(-ctx.a_const) * (
        -beta * ctx.k_eff * math.exp(-beta * y)
        + (1.0 - beta) * ctx.s2_eff * math.exp((1.0 - beta) * y)
    )


def d2_k(ctx: SpreadContext, y: float) -> float:
    """Second derivative of the strike map K(y)."""
    beta = ctx.beta
    return math.exp(-ctx.a_const) * (
        beta**2 * ctx.k_eff * math.exp(-beta * y)
        + (1.0 - beta) ** 2 * ctx.s2_eff * math.exp((1.0 - beta) * y)
    )


def _d1_d2(ctx: SpreadContext, strike: float) -> tuple[float, float]:
    t = ctx.model.maturity
    vol_sqrt_t = ctx.sigma * math.sqrt(t)
    d1 = (math.log(float(ctx.model.spots[0]) / strike)
          + (ctx.model.rate + 0.5 * ctx.sigma**2) * t) / vol_sqrt_t
    return d1, d1 - vol_sqrt_t


def _a2(ctx: SpreadContext, y: float, strike: float) -> float:
    # A2(y) = S1 f(d1) + sigma sqrt(T) e^{-rT} K(y) N(d2) - e^{-rT} K(y) f(d2)
    d1, d2 = _d1_d2(ctx, strike)
    t = ctx.model.maturity
    disc = math.exp(-ctx.model.rate * t)
    spot = float(ctx.model.spots[0])
    return (spot * norm_pdf(d1)
            + ctx.sigma * math.sqrt(t) * disc * strike * norm_cdf(d2)
            - disc * strike * norm_pdf(d2))


def _d1_a2(ctx: SpreadContext, y: float, strike: float) -> float:
    d1, d2 = _d1_d2(ctx, strike)
    t = ctx.model.maturity
    disc = math.exp(-ctx.model.rate * t)
    spot = float(ctx.model.spots[0])
    vol_sqrt_t = ctx.sigma * math.sqrt(t)
    bracket = (spot * norm_pdf(d1) * d1
               + ctx.sigma**2 * t * disc * strike * norm_cdf(d2)
               - 2.0 * vol_sqrt_t * disc * strike * norm_pdf(d2)
               - disc * strike * norm_pdf(d2) * d2)
    return d1_k(ctx, y) / (strike * vol_sqrt_t) * bracket


def _positive_strike(ctx: SpreadContext, y: float) -> float:
    strike = conditional_strike(ctx, y)
    if strike <= 0.0:
        raise NonpositiveStrike(
            f"analytic derivative undefined: conditional strike K({y}) = {strike} <= 0"
        )
    return strike


def d1_c(ctx: SpreadContext, y: float) -> float:
    """Analytic first derivative of the conditional price C(y).

    Requires K(y) > 0.
    """
    strike = _positive_strike(ctx, y)
    vol_sqrt_t = ctx.sigma * math.sqrt(ctx.model.maturity)
    return float(-(d1_k(ctx, y) / (strike * vol_sqrt_t)) * _a2(ctx, y, strike))


def d2_c(ctx: SpreadContext, y: float) -> float:
    """Analytic second derivative of the conditional price C(y).

    Requires K(y) > 0.
    """
    strike = _positive_strike(ctx, y)
    vol_sqrt_t = ctx.sigma * math.sqrt(ctx.model.maturity)
    dk, ddk = d1_k(ctx, y), d2_k(ctx, y)
    return float(-(1.0 / vol_sqrt_t) * (
        _a2(ctx, y, strike) * (strike * ddk - dk * dk) / strike**2
        + _d1_a2(ctx, y, strike) * dk / strike
    ))


def b_of_ystar(ctx: SpreadContext, ystar: float) -> float:
    """Centering constant B(y*) = (r - vol2^2 / 2) T - y*."""
    vol2 = float(ctx.model.vols[1])
    return (ctx.model.rate - 0.5 * vol2**2) * ctx.model.maturity - ystar


@dataclass(frozen=True)
class BasketContext:
    """Conditional pricing data for a general basket of d >= 2 assets.

    ``sigma`` is the annualized residual volatility of the first log-return
    given the others (``cond.cond_vol / sqrt(T)``).
    """

    model: MarketModel
    contract: BasketContract
    law: TerminalLaw
    cond: ConditionalLaw
    sigma: float

    @classmethod
    def build(cls, model: MarketModel, contract: BasketContract) -> "BasketContext":
        if contract.dim != model.dim:
            raise ValueError("contract weights length must match the model dimension")
        law = terminal_law(model)
        cond = condition_first(law)
        sigma = cond.cond_vol / math.sqrt(model.maturity)
        if sigma <= 0.0:
            raise NonPositiveInput("residual conditional volatility must be positive")
        return cls(model=model, contract=contract, law=law, cond=cond, sigma=sigma)

    @property
    def strike_exponent_const(self) -> float:
        """Constant c in K(y) = e^{c - slope.y} K'(y): (r - sigma^2/2) T - intercept."""
        return (self.model.rate - 0.5 * self.sigma**2) * self.model.maturity \
            - self.cond.intercept


def basket_strike(ctx: BasketContext, y):
    """Conditional strike K(y) for the general basket.

    ``K(y) = (1/w1) e^{(r - sigma^2/2) T - mu(y)} (K - sum_{j>=2} w_j S_j e^{y_j})``
    where ``mu(y)`` is the conditional mean of the first log-return.
    ``y`` is a vector of length d-1 or an array of such rows.
    """
    y = np.asarray(y, dtype=float)
    w = ctx.contract.weights
    rest = ctx.model.spots[1:] * w[1:]
    residual = ctx.contract.strike - np.exp(y) @ rest
    out = np.exp(ctx.strike_exponent_const - y @ ctx.cond.slope) * residual / w[0]
    return float(out) if out.ndim == 0 else out


def basket_cond_price(ctx: BasketContext, y):
    """Conditional one-dimensional call price C(y) for the general basket."""
    return bs_call(
        float(ctx.model.spots[0]),
        basket_strike(ctx, y),
        ctx.sigma,
        ctx.model.rate,
        ctx.model.maturity,
    )


def basket_exp_factor(ctx: BasketContext, y):
    """Weight e^{-(r - sigma^2/2) T + mu(y)} multiplying C(y) in the outer expectation."""
    y = np.asarray(y, dtype=float)
    out = np.exp(-(ctx.model.rate - 0.5 * ctx.sigma**2) * ctx.model.maturity
                 + ctx.cond.intercept + y @ ctx.cond.slope)
    return float(out) if out.ndim == 0 else out
