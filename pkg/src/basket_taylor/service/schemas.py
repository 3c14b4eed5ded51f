"""Request and response models shared by the HTTP service and the CLI.

``PriceRequest`` mirrors the JSON config schema accepted by the CLI:
``{spots, vols, corr, rate, maturity, weights, strike, method, order, ystar,
n_samples, seed, output}``. Responses echo the fully resolved configuration so
a JSON response can be fed back in as a config and reproduce the same result.
"""

from __future__ import annotations

from enum import Enum
from typing import Literal

from pydantic import BaseModel, Field, model_validator


class Method(str, Enum):
    TAYLOR = "taylor"
    TAYLOR_CLOSED = "taylor-closed"
    MC_FULL = "mc-full"
    MC_PARTIAL = "mc-partial"
    MARGRABE = "margrabe"


TAYLOR_METHODS = {Method.TAYLOR, Method.TAYLOR_CLOSED}


class OutputFormat(str, Enum):
    TEXT = "text"
    JSON = "json"
    CSV = "csv"


class MarketFields(BaseModel):
    spots: list[float] = Field(min_length=2)
    vols: list[float] = Field(min_length=2)
    corr: list[list[float]]
    rate: float
    maturity: float

    @model_validator(mode="after")
    def _check_shapes(self):
        d = len(self.spots)
        if len(self.vols) != d:
            raise ValueError("vols must have the same length as spots")
        if len(self.corr) != d or any(len(row) != d for row in self.corr):
            raise ValueError("corr must be a square matrix matching spots")
        return self


class PriceRequest(MarketFields):
    weights: list[float] = Field(min_length=2)
    strike: float
    method: Method = Method.TAYLOR
    order: int | None = Field(default=None, ge=0)
    ystar: Literal["mean"] | float | list[float] = "mean"
    n_samples: int = Field(default=1_000_000, ge=2)
    seed: int = Field(default=0, ge=0)
    output: OutputFormat = OutputFormat.TEXT

    @model_validator(mode="after")
    def _check_compat(self):
        if len(self.weights) != len(self.spots):
            raise ValueError("weights must have the same length as spots")
        if self.method is Method.MARGRABE:
            if self.strike != 0.0:
                raise ValueError("margrabe requires strike 0")
            if len(self.spots) != 2:
                raise ValueError("margrabe requires exactly two assets")
        if self.order is not None and self.method not in TAYLOR_METHODS:
            raise ValueError("order applies only to taylor methods")
        if self.method is Method.TAYLOR_CLOSED:
            if len(self.spots) != 2:
                raise ValueError("taylor-closed requires exactly two assets")
            if self.order not in (None, 1, 2):
                raise ValueError("taylor-closed supports orders 1 and 2 only")
        return self


class PriceResponse(PriceRequest):
    """Price result; also a valid config fragment (extra keys are ignored on input)."""

    price: float
    stderr: float | None = None
    terms: list[float] | None = None


class TableRequest(BaseModel):
    which: Literal[1, 2, 3]
    n_samples: int = Field(default=1_000_000, ge=2)
    seed: int = Field(default=0, ge=0)


class TableResponse(BaseModel):
    which: int
    n_samples: int
    seed: int
    columns: list[str]
    labels: list[str]
    rows: list[list[float]]


class CurveRequest(MarketFields):
    weights: list[float] = Field(min_length=2, max_length=2)
    strike: float
    ystar: Literal["mean"] | float | list[float] = "mean"
    y_lo: float = -1.0
    y_hi: float = 1.0
    points: int = Field(default=101, ge=2)

    @model_validator(mode="after")
    def _check_curve(self):
        if len(self.spots) != 2:
            raise ValueError("curve requires exactly two assets")
        if not self.y_lo < self.y_hi:
            raise ValueError("y_lo must be strictly below y_hi")
        return self


class CurveResponse(BaseModel):
    ystar: float
    columns: list[str]
    rows: list[list[float]]


class HistRequest(MarketFields):
    n_samples: int = Field(default=100_000, ge=1)
    seed: int = Field(default=0, ge=0)
    bins: int = Field(default=50, ge=1)
    lo: float | None = None
    hi: float | None = None

    @model_validator(mode="after")
    def _check_range(self):
        if (self.lo is None) != (self.hi is None):
            raise ValueError("lo and hi must be given together")
        if self.lo is not None and not self.lo < self.hi:
            raise ValueError("lo must be strictly below hi")
        return self


class HistResponse(BaseModel):
    n_samples: int
    seed: int
    columns: list[str]
    rows: list[list[float]]
