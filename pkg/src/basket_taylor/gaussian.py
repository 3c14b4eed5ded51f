"""Gaussian analytics used by the expansions.

Normal CDF/PDF/quantile, double factorials, standard-normal power moments,
exponential-power moments ``E[e^{aZ} Z^m]``, Cholesky factorization, the
conditional decomposition of the first log-return given the others, and mixed
exponential-power moments of a multivariate Gaussian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np
from scipy import special

from .errors import NotPositiveDefinite, OrderCapExceeded
from .model import TerminalLaw

#: Largest total order accepted by ``mixed_exp_power_moment``.
MIXED_MOMENT_ORDER_CAP = 8


def norm_cdf(x):
    """Standard normal CDF, accurate to machine precision. Elementwise on arrays."""
    return special.ndtr(x)


def norm_pdf(x):
    """Standard normal density. Elementwise on arrays."""
    x = np.asarray(x, dtype=float)
    out = np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    return float(out) if out.ndim == 0 else out


def norm_ppf(u):
    """Inverse of the standard normal CDF. Elementwise on arrays."""
    return special.ndtri(u)


def double_factorial(n: int) -> int:
    """Product of the odd integers from 1 to ``n``; the empty product (n = -1) is 1.

    ``n`` must be odd or -1.
    """
    if n < -1 or n % 2 == 0:
        raise ValueError(f"double factorial is defined for odd n >= -1, got {n}")
    out = 1
    for k in range(3, n + 1, 2):
        out *= k
    return out


def std_normal_moment(nu: int) -> float:
    """E[Z^nu] for standard normal Z: (nu - 1)!! for even nu, 0 for odd."""
    if nu < 0:
        raise ValueError("moment order must be nonnegative")
    if nu % 2 == 1:
        return 0.0
    return float(double_factorial(nu - 1))


def exp_power_moment(a: float, m: int) -> float:
    """E[e^{aZ} Z^m] for standard normal Z, in closed form.

    Equals ``e^{a^2/2} * sum_{v=0}^{floor(m/2)} C(m, 2v) a^{m-2v} (2v-1)!!``,
    which is also the m-th derivative of the moment generating function
    ``e^{a^2/2}`` with respect to ``a``.
    """
    if m < 0:
        raise ValueError("power must be nonnegative")
    acc = 0.0
    for v in range(m // 2 + 1):
        acc += math.comb(m, 2 * v) * a ** (m - 2 * v) * double_factorial(2 * v - 1)
    return math.exp(0.5 * a * a) * acc


def cholesky(cov: np.ndarray) -> np.ndarray:
    """Lower-triangular factor L with L L' = cov.

    Raises
    ------
    NotPositiveDefinite
        If the input is not symmetric positive definite.
    """
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValueError("cov must be a square matrix")
    if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.abs(cov).max()))):
        raise NotPositiveDefinite("matrix is not symmetric")
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("matrix is not positive definite") from exc


@dataclass(frozen=True)
class ConditionalLaw:
    """Affine decomposition of the first log-return given the remaining ones.

    Given the terminal law of ``Y = (Y1, Yrest)``, the conditional law of
    ``Y1 | Yrest = y`` is normal with mean ``intercept + slope . y`` and
    standard deviation ``cond_vol`` (the full-horizon residual standard
    deviation, i.e. the square root of ``var(Y1) - slope' Cov(Yrest) slope``).
    """

    intercept: float
    slope: np.ndarray
    cond_vol: float

    def __post_init__(self) -> None:
        s = np.array(self.slope, dtype=float)
        s.setflags(write=False)
        object.__setattr__(self, "slope", s)
        object.__setattr__(self, "intercept", float(self.intercept))
        object.__setattr__(self, "cond_vol", float(self.cond_vol))

    def mean_at(self, y) -> np.ndarray | float:
        """Conditional mean of the first log-return at ``y`` (vector or rows of vectors)."""
        y = np.asarray(y, dtype=float)
        out = self.intercept + y @ self.slope
        return float(out) if out.ndim == 0 else out


def condition_first(law: TerminalLaw) -> ConditionalLaw:
    """Condition the first component of a Gaussian law on the remaining ones.

    slope = Cov(Yrest)^-1 Cov(Yrest, Y1), intercept = mean1 - slope . mean_rest,
    cond_vol^2 = var(Y1) - slope . Cov(Yrest, Y1).
    """
    if law.dim < 2:
        raise ValueError("conditioning requires at least two components")
    cov_rest = law.cov[1:, 1:]
    cov_cross = law.cov[1:, 0]
    try:
        np.linalg.cholesky(cov_rest)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("covariance of the conditioning block is singular") from exc
    slope = np.linalg.solve(cov_rest, cov_cross)
    intercept = law.mean[0] - slope @ law.mean[1:]
    cond_var = law.cov[0, 0] - slope @ cov_cross
    return ConditionalLaw(
        intercept=float(intercept),
        slope=slope,
        cond_vol=math.sqrt(max(float(cond_var), 0.0)),
    )


@dataclass(frozen=True)
class MultiIndex:
    """Vector of per-coordinate differentiation/power orders."""

    orders: tuple[int, ...]

    def __post_init__(self) -> None:
        orders = tuple(int(k) for k in self.orders)
        if any(k < 0 for k in orders):
            raise ValueError("orders must be nonnegative")
        object.__setattr__(self, "orders", orders)

    @property
    def total(self) -> int:
        return sum(self.orders)


def _pairing_sum(indices: tuple[int, ...], cov: np.ndarray) -> float:
    # Sum over perfect pairings of the index multiset of products of covariances.
    if not indices:
        return 1.0
    first, rest = indices[0], indices[1:]
    total = 0.0
    for i in range(len(rest)):
        total += cov[first, rest[i]] * _pairing_sum(rest[:i] + rest[i + 1:], cov)
    return total


def central_moment(cov: np.ndarray, orders: Sequence[int]) -> float:
    """E[prod_k X_k^{l_k}] for centered Gaussian X with covariance ``cov``.

    Zero for odd total order; otherwise the pairing (Wick) sum, evaluated by
    explicit enumeration of pair partitions.
    """
    cov = np.asarray(cov, dtype=float)
    indices = tuple(k for k, l in enumerate(orders) for _ in range(l))
    if len(indices) % 2 == 1:
        return 0.0
    return _pairing_sum(indices, cov)


def mixed_exp_power_moment(mean, cov, a, ystar, orders) -> float:
    """E[e^{a.W} prod_k (W_k - ystar_k)^{l_k}] for W ~ N(mean, cov), exactly.

    The exponential tilt is removed by the Gaussian measure shift
    ``W -> N(mean + cov a, cov)`` with prefactor ``e^{a.mean + a'cov a / 2}``;
    the remaining polynomial moment is expanded binomially around the shifted
    mean and evaluated through ``central_moment``.
    """
    if isinstance(orders, MultiIndex):
        orders = orders.orders
    orders = tuple(int(k) for k in orders)
    total_order = sum(orders)
    if total_order > MIXED_MOMENT_ORDER_CAP:
        raise OrderCapExceeded(
            f"total moment order {total_order} exceeds cap {MIXED_MOMENT_ORDER_CAP}"
        )
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    a = np.asarray(a, dtype=float)
    ystar = np.asarray(ystar, dtype=float)
    if not (mean.shape == a.shape == ystar.shape and cov.shape == (mean.size, mean.size)):
        raise ValueError("mean, a, ystar must share a length matching cov")

    shifted = mean + cov @ a
    prefactor = math.exp(float(a @ mean) + 0.5 * float(a @ cov @ a))
    delta = shifted - ystar
    acc = 0.0
    for sub in product(*(range(l + 1) for l in orders)):
        coef = 1.0
        for l_k, j_k, d_k in zip(orders, sub, delta):
            coef *= math.comb(l_k, j_k) * d_k ** (l_k - j_k)
        if coef != 0.0:
            acc += coef * central_moment(cov, sub)
    return prefactor * acc
