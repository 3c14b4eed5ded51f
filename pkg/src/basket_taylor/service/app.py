"""FastAPI application exposing the pricing operations."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import PricingError
from . import handlers
from .schemas import (
    CurveRequest,
    CurveResponse,
    HistRequest,
    HistResponse,
    PriceRequest,
    PriceResponse,
    TableRequest,
    TableResponse,
)

app = FastAPI(
    title="basket-taylor pricing service",
    version=__version__,
    description=(
        "Prices European basket and spread options by Taylor expansion of the "
        "conditional one-dimensional price, with Monte Carlo and exchange-option "
        "validation methods."
    ),
)


@app.exception_handler(PricingError)
async def pricing_error_handler(_: Request, exc: PricingError) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc), "kind": "numerical"})


@app.exception_handler(ValueError)
async def value_error_handler(_: Request, exc: ValueError) -> JSONResponse:
    return JSONResponse(status_code=422, content={"detail": str(exc), "kind": "config"})


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/price", response_model=PriceResponse)
def price(req: PriceRequest) -> PriceResponse:
    return handlers.handle_price(req)


@app.post("/table", response_model=TableResponse)
def table(req: TableRequest) -> TableResponse:
    return handlers.handle_table(req)


@app.post("/curve", response_model=CurveResponse)
def curve(req: CurveRequest) -> CurveResponse:
    return handlers.handle_curve(req)


@app.post("/histogram", response_model=HistResponse)
def histogram(req: HistRequest) -> HistResponse:
    return handlers.handle_hist(req)
