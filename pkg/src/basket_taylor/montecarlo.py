"""Monte Carlo validation estimators.

``mc_full`` samples the exact joint law of terminal log-returns and averages
the discounted payoff; ``mc_partial`` samples only the conditioning returns
and averages the closed-form conditional price, a Rao-Blackwellized estimator
with lower variance.

Determinism contract: samples are produced in fixed-size blocks, block ``b``
drawing from a Philox counter-based generator keyed by
``SeedSequence(seed, spawn_key=(b,))``; normals come from an inverse-CDF map
of open-interval uniforms; per-block partial sums are merged in block order.
The estimate is therefore bit-identical for a given ``(seed, n)`` regardless
of how many workers process the blocks, and stable across platforms.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .conditional import BasketContext, basket_cond_price, basket_exp_factor
from .gaussian import cholesky, norm_ppf
from .model import BasketContract, MarketModel, payoff, terminal_law

#: Number of sample rows per generation block.
BLOCK_SIZE = 1 << 18


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo price with its standard error, sample count and seed."""

    price: float
    stderr: float
    n: int
    seed: int


def _block_normals(seed: int, block: int, rows: int, cols: int) -> np.ndarray:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(block,))
    gen = np.random.Generator(np.random.Philox(ss))
    # Odd multiples of 2^-54: uniforms on the open interval (0, 1), so the
    # inverse CDF never produces an infinity.
    raw = gen.integers(0, 1 << 53, size=(rows, cols), dtype=np.int64)
    return norm_ppf((2.0 * raw + 1.0) * 2.0**-54)


def _block_ranges(n: int) -> Iterable[tuple[int, int]]:
    for block in range(0, (n + BLOCK_SIZE - 1) // BLOCK_SIZE):
        yield block, min(BLOCK_SIZE, n - block * BLOCK_SIZE)


def _accumulate(
    n: int, seed: int, chunks: int, block_stats: Callable[[int, int], tuple[float, float]]
) -> tuple[float, float]:
    if n < 2:
        raise ValueError("at least two samples are required")
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    if chunks < 1:
        raise ValueError("chunks must be at least 1")
    blocks = list(_block_ranges(n))
    if chunks == 1:
        partials = [block_stats(b, rows) for b, rows in blocks]
    else:
        with ThreadPoolExecutor(max_workers=chunks) as pool:
            partials = list(pool.map(lambda br: block_stats(*br), blocks))
    total = 0.0
    total_sq = 0.0
    for part_sum, part_sq in partials:
        total += part_sum
        total_sq += part_sq
    mean = total / n
    var = max(total_sq - n * mean * mean, 0.0) / (n - 1)
    return mean, math.sqrt(var / n)


def sample_terminal(model: MarketModel, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` i.i.d. terminal log-return vectors; returns an (n, d) array."""
    if n < 1:
        raise ValueError("at least one sample is required")
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    law = terminal_law(model)
    chol_t = cholesky(law.cov).T
    out = np.empty((n, model.dim), dtype=float)
    for block, rows in _block_ranges(n):
        z = _block_normals(seed, block, rows, model.dim)
        start = block * BLOCK_SIZE
        out[start:start + rows] = law.mean + z @ chol_t
    return out


def mc_full(
    model: MarketModel, contract: BasketContract, n: int, seed: int, chunks: int = 1
) -> McEstimate:
    """Plain Monte Carlo: discounted average payoff over the exact terminal law."""
    if contract.dim != model.dim:
        raise ValueError("contract weights length must match the model dimension")
    law = terminal_law(model)
    chol_t = cholesky(law.cov).T
    disc = math.exp(-model.rate * model.maturity)
    spots = model.spots

    def block_stats(block: int, rows: int) -> tuple[float, float]:
        z = _block_normals(seed, block, rows, model.dim)
        values = disc * payoff(contract, spots * np.exp(law.mean + z @ chol_t))
        return float(values.sum()), float((values * values).sum())

    mean, stderr = _accumulate(n, seed, chunks, block_stats)
    return McEstimate(price=mean, stderr=stderr, n=n, seed=seed)


def mc_partial(
    model: MarketModel, contract: BasketContract, n: int, seed: int, chunks: int = 1
) -> McEstimate:
    """Conditional Monte Carlo: sample only the conditioning log-returns.

    Each path draws the d-1 returns of assets 2..d (a single normal per path
    when d = 2) and contributes ``w1 * e^{-(r - sigma^2/2) T + mu(y)} C(y)``,
    the exact conditional price, so no separate discounting is applied.
    """
    ctx = BasketContext.build(model, contract)
    rest_dim = model.dim - 1
    chol_t = cholesky(ctx.law.cov[1:, 1:]).T
    mean_rest = ctx.law.mean[1:]
    w1 = float(contract.weights[0])

    def block_stats(block: int, rows: int) -> tuple[float, float]:
        z = _block_normals(seed, block, rows, rest_dim)
        y = mean_rest + z @ chol_t
        values = w1 * basket_exp_factor(ctx, y) * basket_cond_price(ctx, y)
        return float(values.sum()), float((values * values).sum())

    mean, stderr = _accumulate(n, seed, chunks, block_stats)
    return McEstimate(price=mean, stderr=stderr, n=n, seed=seed)
