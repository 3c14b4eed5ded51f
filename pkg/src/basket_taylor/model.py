"""Market/contract data model and the exact joint law of terminal log-returns.

Each asset follows a lognormal diffusion under the pricing measure: the
log-return over ``[0, T]`` of asset ``i`` is normal with mean
``(r - vol_i^2 / 2) * T`` and variance ``vol_i^2 * T``, and returns of
different assets have correlation ``corr[i, j]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveInput, NotPositiveDefinite


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class MarketModel:
    """Joint market description: spots, annualized vols, correlation, rate, maturity."""

    spots: np.ndarray
    vols: np.ndarray
    corr: np.ndarray
    rate: float
    maturity: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "spots", _frozen_array(self.spots))
        object.__setattr__(self, "vols", _frozen_array(self.vols))
        object.__setattr__(self, "corr", _frozen_array(self.corr))
        object.__setattr__(self, "rate", float(self.rate))
        object.__setattr__(self, "maturity", float(self.maturity))
        validate(self)

    @property
    def dim(self) -> int:
        return int(self.spots.shape[0])


@dataclass(frozen=True)
class BasketContract:
    """Weights and strike of a European basket call: payoff ``(sum_j w_j S_T[j] - K)+``.

    The leading weight must be strictly positive (the payoff is rewritten as a
    call on the first asset conditional on the others). Remaining weights may
    have any sign, and the strike may be negative or zero.
    """

    weights: np.ndarray
    strike: float

    def __post_init__(self) -> None:
        w = _frozen_array(self.weights)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "strike", float(self.strike))
        if w.ndim != 1 or w.size < 2:
            raise ValueError("weights must be a vector of at least two entries")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if w[0] <= 0:
            raise NonPositiveInput("weights: the leading weight must be strictly positive")

    @classmethod
    def spread(cls, strike: float) -> "BasketContract":
        """Two-asset spread: weights (1, -1)."""
        return cls(weights=(1.0, -1.0), strike=strike)

    @classmethod
    def crack_spread(cls, strike: float) -> "BasketContract":
        """3:2:1 crack spread: weights (2/3, -1/3, -1)."""
        return cls(weights=(2.0 / 3.0, -1.0 / 3.0, -1.0), strike=strike)

    @property
    def dim(self) -> int:
        return int(self.weights.shape[0])


@dataclass(frozen=True)
class TerminalLaw:
    """Gaussian law of the vector of terminal log-returns: mean and covariance over [0, T]."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self) -> None:
        mean = _frozen_array(self.mean)
        cov = _frozen_array(self.cov)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] != mean.shape[0]:
            raise ValueError("cov must be square and match the mean vector length")
        if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-12):
            raise NotPositiveDefinite("cov must be symmetric")

    @property
    def dim(self) -> int:
        return int(self.mean.shape[0])


def validate(model: MarketModel) -> None:
    """Check all MarketModel invariants; raise naming the offending field.

    Raises
    ------
    NonPositiveInput
        If any spot, vol, or the maturity is not strictly positive.
    NotPositiveDefinite
        If ``corr`` is not a symmetric positive-definite correlation matrix.
    """
    spots, vols, corr = model.spots, model.vols, model.corr
    if spots.ndim != 1 or vols.ndim != 1:
        raise ValueError("spots and vols must be vectors")
    d = spots.shape[0]
    if d < 2:
        raise ValueError("model requires at least two assets")
    if vols.shape[0] != d:
        raise ValueError("vols length must match spots length")
    if not (np.all(np.isfinite(spots)) and np.all(np.isfinite(vols))
            and np.isfinite(model.rate) and np.isfinite(model.maturity)):
        raise ValueError("model inputs must be finite")
    if np.any(spots <= 0):
        raise NonPositiveInput("spots must be strictly positive")
    if np.any(vols <= 0):
        raise NonPositiveInput("vols must be strictly positive")
    if model.maturity <= 0:
        raise NonPositiveInput("maturity must be strictly positive")
    if corr.shape != (d, d):
        raise ValueError("corr must be a d x d matrix")
    if not np.allclose(corr, corr.T, rtol=0.0, atol=1e-12):
        raise NotPositiveDefinite("corr must be symmetric")
    if not np.allclose(np.diag(corr), 1.0, rtol=0.0, atol=1e-12):
        raise NotPositiveDefinite("corr must have a unit diagonal")
    if np.any(np.abs(corr) > 1.0 + 1e-12):
        raise NotPositiveDefinite("corr entries must lie in [-1, 1]")
    try:
        np.linalg.cholesky(corr)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("corr is not positive definite") from exc


def terminal_law(model: MarketModel) -> TerminalLaw:
    """Exact law of the terminal log-returns: mean (r - vol^2/2)T, cov corr*vol_i*vol_j*T."""
    mean = (model.rate - 0.5 * model.vols**2) * model.maturity
    cov = np.outer(model.vols, model.vols) * model.corr * model.maturity
    return TerminalLaw(mean=mean, cov=cov)


def payoff(contract: BasketContract, terminal_spots: np.ndarray) -> np.ndarray | float:
    """Basket call payoff ``(sum_j w_j s_j - K)+``.

    ``terminal_spots`` is a vector of length d, or an array whose last axis has
    length d (one payoff per row).
    """
    s = np.asarray(terminal_spots, dtype=float)
    if s.shape[-1] != contract.dim:
        raise ValueError(
            f"terminal_spots last axis has length {s.shape[-1]}, expected {contract.dim}"
        )
    value = np.maximum(s @ contract.weights - contract.strike, 0.0)
    return float(value) if value.ndim == 0 else value
