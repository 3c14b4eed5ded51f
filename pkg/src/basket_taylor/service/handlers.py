"""Request handlers shared by the HTTP endpoints and the CLI client."""

from __future__ import annotations

import numpy as np

from ..conditional import SpreadContext, cond_price, d1_c, d2_c
from ..model import BasketContract, MarketModel
from ..montecarlo import mc_full, mc_partial, sample_terminal
from ..taylor import (
    margrabe_exact,
    price_basket_taylor,
    price_spread_closed12,
    price_spread_taylor,
    y_mean,
)
from .schemas import (
    CurveRequest,
    CurveResponse,
    HistRequest,
    HistResponse,
    Method,
    PriceRequest,
    PriceResponse,
    TableRequest,
    TableResponse,
)

#: Reference two-asset configuration used by the built-in table sweeps.
BENCHMARK = {
    "spots": (100.0, 96.0),
    "vols": (0.3, 0.1),
    "rho": -0.3,
    "rate": 0.03,
    "strike": 1.0,
    "maturity": 1.0,
}

TABLE1_RHOS = (0.3, -0.3, 0.5, -0.5)
TABLE2_RHO = -0.7
TABLE2_YSTARS = (-0.015, -0.02, -0.05, 0.0, 0.01)
#: (spot1, spot2, strike, ystar) for the out-of-the-money sweep.
TABLE3_CASES = (
    (90.0, 100.0, 5.0, 0.065),
    (90.0, 110.0, 5.0, 0.037),
    (90.0, 100.0, 10.0, 0.05),
    (90.0, 110.0, 10.0, 0.03),
)


def build_model(req) -> MarketModel:
    return MarketModel(
        spots=req.spots, vols=req.vols, corr=req.corr, rate=req.rate, maturity=req.maturity
    )


def resolve_ystar(model: MarketModel, ystar) -> np.ndarray:
    """Turn the config value ("mean", scalar, or vector) into a length d-1 vector."""
    if ystar == "mean":
        return y_mean(model)
    arr = np.atleast_1d(np.asarray(ystar, dtype=float))
    if arr.shape != (model.dim - 1,):
        raise ValueError(f"ystar must be 'mean' or a vector of length {model.dim - 1}")
    return arr


def _benchmark_model(rho: float, spots=None) -> MarketModel:
    return MarketModel(
        spots=spots if spots is not None else BENCHMARK["spots"],
        vols=BENCHMARK["vols"],
        corr=((1.0, rho), (rho, 1.0)),
        rate=BENCHMARK["rate"],
        maturity=BENCHMARK["maturity"],
    )


def handle_price(req: PriceRequest) -> PriceResponse:
    model = build_model(req)
    contract = BasketContract(weights=req.weights, strike=req.strike)
    echo = req.model_dump()
    stderr = None
    terms = None

    if req.method in (Method.MC_FULL, Method.MC_PARTIAL):
        run = mc_full if req.method is Method.MC_FULL else mc_partial
        est = run(model, contract, req.n_samples, req.seed)
        price, stderr = est.price, est.stderr
    elif req.method is Method.MARGRABE:
        price = margrabe_exact(model, contract)
    else:
        order = 2 if req.order is None else req.order
        point = resolve_ystar(model, req.ystar)
        if req.method is Method.TAYLOR_CLOSED:
            ctx = SpreadContext.build(model, contract)
            p1, p2 = price_spread_closed12(ctx, float(point[0]))
            price = p1 if order == 1 else p2
            base = ctx.contract.weights[0] * cond_price(ctx, float(point[0]))
            terms = [float(base), float(p1 - base)] + ([float(p2 - p1)] if order == 2 else [])
        elif model.dim == 2:
            quote = price_spread_taylor(model, contract, order, float(point[0]))
            price, terms = quote.price, list(quote.terms)
        else:
            quote = price_basket_taylor(model, contract, order, point)
            price, terms = quote.price, list(quote.terms)
        echo["order"] = order
        echo["ystar"] = [float(v) for v in point]

    return PriceResponse(**echo, price=float(price), stderr=stderr, terms=terms)


def _spread_orders_12(model: MarketModel, strike: float, ystar: float) -> tuple[float, float]:
    contract = BasketContract.spread(strike)
    p1 = price_spread_taylor(model, contract, 1, ystar).price
    p2 = price_spread_taylor(model, contract, 2, ystar).price
    return p1, p2


def handle_table(req: TableRequest) -> TableResponse:
    labels: list[str] = []
    rows: list[list[float]] = []
    if req.which == 1:
        columns = ["correlation", "monte_carlo", "partial_monte_carlo",
                   "first_order", "second_order"]
        for rho in TABLE1_RHOS:
            model = _benchmark_model(rho)
            contract = BasketContract.spread(BENCHMARK["strike"])
            full = mc_full(model, contract, req.n_samples, req.seed)
            part = mc_partial(model, contract, req.n_samples, req.seed)
            p1, p2 = _spread_orders_12(model, BENCHMARK["strike"], 0.0)
            labels.append(f"{rho}")
            rows.append([full.price, part.price, p1, p2])
    elif req.which == 2:
        columns = ["ystar", "monte_carlo", "partial_monte_carlo",
                   "first_order", "second_order"]
        model = _benchmark_model(TABLE2_RHO)
        contract = BasketContract.spread(BENCHMARK["strike"])
        full = mc_full(model, contract, req.n_samples, req.seed)
        part = mc_partial(model, contract, req.n_samples, req.seed)
        for ystar in TABLE2_YSTARS:
            p1, p2 = _spread_orders_12(model, BENCHMARK["strike"], ystar)
            labels.append(f"{ystar}")
            rows.append([full.price, part.price, p1, p2])
    else:
        columns = ["parameters", "monte_carlo", "first_order", "second_order"]
        for spot1, spot2, strike, ystar in TABLE3_CASES:
            model = _benchmark_model(BENCHMARK["rho"], spots=(spot1, spot2))
            contract = BasketContract.spread(strike)
            full = mc_full(model, contract, req.n_samples, req.seed)
            p1, p2 = _spread_orders_12(model, strike, ystar)
            labels.append(f"S1={spot1:g} S2={spot2:g} K={strike:g} ystar={ystar:g}")
            rows.append([full.price, p1, p2])
    return TableResponse(
        which=req.which, n_samples=req.n_samples, seed=req.seed,
        columns=columns, labels=labels, rows=rows,
    )


def handle_curve(req: CurveRequest) -> CurveResponse:
    model = build_model(req)
    contract = BasketContract(weights=req.weights, strike=req.strike)
    ctx = SpreadContext.build(model, contract)
    point = float(resolve_ystar(model, req.ystar)[0])
    w1 = float(contract.weights[0])
    base = cond_price(ctx, point)
    slope = d1_c(ctx, point)
    curvature = d2_c(ctx, point)
    ys = np.linspace(req.y_lo, req.y_hi, req.points)
    exact = np.asarray(cond_price(ctx, ys), dtype=float)
    first = base + slope * (ys - point)
    second = first + 0.5 * curvature * (ys - point) ** 2
    rows = [
        [float(y), w1 * float(c), w1 * float(f), w1 * float(s)]
        for y, c, f, s in zip(ys, exact, first, second)
    ]
    return CurveResponse(
        ystar=point,
        columns=["y", "conditional_price", "first_order", "second_order"],
        rows=rows,
    )


def handle_hist(req: HistRequest) -> HistResponse:
    model = build_model(req)
    samples = sample_terminal(model, req.n_samples, req.seed)
    value_range = (req.lo, req.hi) if req.lo is not None else None
    rows: list[list[float]] = []
    for asset in range(model.dim):
        counts, edges = np.histogram(samples[:, asset], bins=req.bins, range=value_range)
        for k in range(req.bins):
            rows.append([float(asset), float(edges[k]), float(edges[k + 1]), float(counts[k])])
    return HistResponse(
        n_samples=req.n_samples, seed=req.seed,
        columns=["asset", "bin_left", "bin_right", "count"], rows=rows,
    )
