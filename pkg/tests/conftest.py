import numpy as np
import pytest

from basket_taylor import BasketContract, MarketModel


def two_asset_model(rho: float, spots=(100.0, 96.0), vols=(0.3, 0.1),
                    rate=0.03, maturity=1.0) -> MarketModel:
    return MarketModel(
        spots=spots, vols=vols, corr=[[1.0, rho], [rho, 1.0]], rate=rate, maturity=maturity
    )


def random_two_asset_model(rng: np.random.Generator, max_abs_rho=0.8) -> MarketModel:
    return two_asset_model(
        rho=float(rng.uniform(-max_abs_rho, max_abs_rho)),
        spots=tuple(rng.uniform(50.0, 150.0, 2)),
        vols=tuple(rng.uniform(0.1, 0.5, 2)),
    )


@pytest.fixture
def benchmark_model() -> MarketModel:
    return two_asset_model(-0.3)


@pytest.fixture
def benchmark_contract() -> BasketContract:
    return BasketContract.spread(1.0)


@pytest.fixture
def crack_model() -> MarketModel:
    return MarketModel(
        spots=[100.0, 100.0, 80.0],
        vols=[0.3, 0.25, 0.2],
        corr=[[1.0, 0.4, 0.4], [0.4, 1.0, 0.4], [0.4, 0.4, 1.0]],
        rate=0.03,
        maturity=1.0,
    )


@pytest.fixture
def crack_contract() -> BasketContract:
    return BasketContract.crack_spread(5.0)
