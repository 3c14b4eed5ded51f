"""Basket and spread option pricing by Taylor expansion of the conditional price.

Prices European basket options under a correlated lognormal model by expanding
the one-dimensional conditional Black-Scholes price around a chosen point and
evaluating the outer Gaussian expectation in closed form. Includes full and
conditional Monte Carlo estimators and the exact exchange-option formula for
validation, a FastAPI pricing service, and a CLI client.
"""

from .conditional import (
    BasketContext,
    SpreadContext,
    b_of_ystar,
    basket_cond_price,
    basket_exp_factor,
    basket_strike,
    bs_call,
    cond_price,
    conditional_strike,
    d1_c,
    d1_k,
    d2_c,
    d2_k,
)
from .errors import (
    NonPositiveInput,
    NonpositiveStrike,
    NotPositiveDefinite,
    OrderCapExceeded,
    PricingError,
)
from .gaussian import (
    ConditionalLaw,
    MultiIndex,
    central_moment,
    cholesky,
    condition_first,
    double_factorial,
    exp_power_moment,
    mixed_exp_power_moment,
    norm_cdf,
    norm_pdf,
    norm_ppf,
    std_normal_moment,
)
from .model import BasketContract, MarketModel, TerminalLaw, payoff, terminal_law, validate
from .montecarlo import McEstimate, mc_full, mc_partial, sample_terminal
from .taylor import (
    TaylorQuote,
    approx_delta,
    e_of_m,
    margrabe_exact,
    price_basket_taylor,
    price_spread_closed12,
    price_spread_taylor,
    y_mean,
)

__version__ = "0.1.0"

__all__ = [
    "BasketContext",
    "BasketContract",
    "ConditionalLaw",
    "MarketModel",
    "McEstimate",
    "MultiIndex",
    "NonPositiveInput",
    "NonpositiveStrike",
    "NotPositiveDefinite",
    "OrderCapExceeded",
    "PricingError",
    "SpreadContext",
    "TaylorQuote",
    "TerminalLaw",
    "approx_delta",
    "b_of_ystar",
    "basket_cond_price",
    "basket_exp_factor",
    "basket_strike",
    "bs_call",
    "central_moment",
    "cholesky",
    "cond_price",
    "condition_first",
    "conditional_strike",
    "d1_c",
    "d1_k",
    "d2_c",
    "d2_k",
    "double_factorial",
    "e_of_m",
    "exp_power_moment",
    "margrabe_exact",
    "mc_full",
    "mc_partial",
    "mixed_exp_power_moment",
    "norm_cdf",
    "norm_pdf",
    "norm_ppf",
    "payoff",
    "price_basket_taylor",
    "price_spread_closed12",
    "price_spread_taylor",
    "sample_terminal",
    "std_normal_moment",
    "terminal_law",
    "validate",
    "y_mean",
]
