import math

import numpy as np
import pytest
from scipy.integrate import quad

from basket_taylor import (
    ConditionalLaw,
    MultiIndex,
    NotPositiveDefinite,
    OrderCapExceeded,
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
    terminal_law,
)

from conftest import two_asset_model


def exp_power_moment_quadrature(a: float, m: int) -> float:
    """Independent oracle: numerical integration of e^{az} z^m phi(z)."""
    import warnings

    span = 16.0 + 4.0 * abs(a)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        value, _ = quad(
            lambda z: math.exp(a * z) * z**m * math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi),
            -span, span, limit=400, epsabs=1e-14, epsrel=1e-14,
        )
    return value


class TestNormalFunctions:
    def test_cdf_center(self):
        assert norm_cdf(0.0) == pytest.approx(0.5, abs=1e-15)

    def test_pdf_center(self):
        assert norm_pdf(0.0) == pytest.approx(0.3989422804014327, abs=1e-15)

    def test_cdf_at_1_96(self):
        # High-precision erf oracle value.
        assert norm_cdf(1.96) == pytest.approx(0.9750021048517795, abs=1e-13)

    def test_cdf_symmetry(self):
        for x in np.linspace(-8.0, 8.0, 33):
            assert abs(norm_cdf(x) + norm_cdf(-x) - 1.0) <= 1e-15

    def test_ppf_round_trip(self):
        u = np.linspace(1e-12, 1 - 1e-12, 101)
        np.testing.assert_allclose(norm_cdf(norm_ppf(u)), u, rtol=0, atol=1e-12)


class TestDoubleFactorial:
    @pytest.mark.parametrize("n,expected", [(-1, 1), (1, 1), (5, 15), (9, 945)])
    def test_values(self, n, expected):
        assert double_factorial(n) == expected

    @pytest.mark.parametrize("n", [4, 0, -3])
    def test_rejects_even_or_below_minus_one(self, n):
        with pytest.raises(ValueError):
            double_factorial(n)


class TestStdNormalMoment:
    @pytest.mark.parametrize("nu,expected", [(0, 1.0), (2, 1.0), (4, 3.0),
                                             (6, 15.0), (8, 105.0)])
    def test_even_moments(self, nu, expected):
        assert std_normal_moment(nu) == expected

    @pytest.mark.parametrize("nu", [1, 3, 5, 7])
    def test_odd_moments_vanish(self, nu):
        assert std_normal_moment(nu) == 0.0


class TestExpPowerMoment:
    def test_second_moment(self):
        assert exp_power_moment(0.0, 2) == pytest.approx(1.0, rel=1e-15)

    def test_mgf(self):
        assert exp_power_moment(1.0, 0) == pytest.approx(1.6487212707001282, rel=1e-14)

    @pytest.mark.parametrize("a", [-1.0, -0.3, 0.0, 0.5, 2.0])
    @pytest.mark.parametrize("m", range(7))
    def test_against_quadrature(self, a, m):
        oracle = exp_power_moment_quadrature(a, m)
        assert exp_power_moment(a, m) == pytest.approx(oracle, rel=1e-10, abs=1e-12)

    def test_equals_mgf_derivatives(self):
        # d^m/da^m e^{a^2/2}: (a) e, (a^2+1) e, (a^3+3a) e, (a^4+6a^2+3) e.
        for a in (-0.7, 0.2, 1.3):
            e = math.exp(0.5 * a * a)
            expected = [e, a * e, (a * a + 1) * e, (a**3 + 3 * a) * e,
                        (a**4 + 6 * a * a + 3) * e]
            for m, target in enumerate(expected):
                assert exp_power_moment(a, m) == pytest.approx(target, rel=1e-10)


class TestCholesky:
    def test_identity(self):
        np.testing.assert_array_equal(cholesky(np.eye(3)), np.eye(3))

    def test_round_trip_benchmark(self, benchmark_model):
        cov = terminal_law(benchmark_model).cov
        factor = cholesky(cov)
        np.testing.assert_allclose(factor @ factor.T, cov, rtol=1e-10)

    def test_near_singular_still_factors(self):
        rho = 0.999999
        cov = np.array([[1.0, rho], [rho, 1.0]])
        factor = cholesky(cov)
        np.testing.assert_allclose(factor @ factor.T, cov, rtol=1e-10)

    def test_not_positive_definite(self):
        with pytest.raises(NotPositiveDefinite):
            cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_asymmetric_rejected(self):
        with pytest.raises(NotPositiveDefinite):
            cholesky(np.array([[1.0, 0.5], [0.2, 1.0]]))


class TestConditionFirst:
    def test_benchmark_values(self, benchmark_model):
        cond = condition_first(terminal_law(benchmark_model))
        # Hand evaluation: slope = rho vol1/vol2, intercept = 0.03*1.9 + 0.15*(-0.33).
        assert cond.slope[0] == pytest.approx(-0.9, abs=1e-12)
        assert cond.intercept == pytest.approx(0.0075, abs=1e-12)
        assert cond.cond_vol == pytest.approx(0.3 * math.sqrt(0.91), abs=1e-12)

    def test_two_asset_closed_form(self):
        for rho in (-0.7, -0.2, 0.4, 0.6):
            model = two_asset_model(rho, vols=(0.25, 0.4), rate=0.01, maturity=2.0)
            cond = condition_first(terminal_law(model))
            vol1, vol2 = model.vols
            t = model.maturity
            assert cond.slope[0] == pytest.approx(rho * vol1 / vol2, abs=1e-12)
            expected_intercept = (model.rate * (1 - (vol1 / vol2) * rho) * t
                                  + 0.5 * vol1 * (vol2 * rho - vol1) * t)
            assert cond.intercept == pytest.approx(expected_intercept, abs=1e-12)

    def test_independence(self):
        model = two_asset_model(rho=0.0)
        cond = condition_first(terminal_law(model))
        assert cond.slope[0] == 0.0
        assert cond.intercept == pytest.approx(0.03 - 0.045, abs=1e-15)
        assert cond.cond_vol == pytest.approx(0.3, abs=1e-15)

    def test_law_of_total_variance(self, crack_model):
        law = terminal_law(crack_model)
        cond = condition_first(law)
        mean_back = cond.intercept + cond.slope @ law.mean[1:]
        var_back = cond.cond_vol**2 + cond.slope @ law.cov[1:, 1:] @ cond.slope
        assert mean_back == pytest.approx(law.mean[0], abs=1e-12)
        assert var_back == pytest.approx(law.cov[0, 0], abs=1e-12)

    def test_against_sampled_regression(self, crack_model):
        # Brute-force conditional moments: OLS of Y1 on (1, Yrest) over joint
        # samples estimates the affine conditional mean; the residual standard
        # deviation estimates cond_vol.
        law = terminal_law(crack_model)
        cond = condition_first(law)
        rng = np.random.default_rng(2024)
        n, chunk = 10_000_000, 2_000_000
        factor = np.linalg.cholesky(law.cov)
        xtx = np.zeros((3, 3))
        xty = np.zeros(3)
        yty = 0.0
        for _ in range(n // chunk):
            draws = law.mean + rng.standard_normal((chunk, 3)) @ factor.T
            design = np.column_stack([np.ones(chunk), draws[:, 1:]])
            xtx += design.T @ design
            xty += design.T @ draws[:, 0]
            yty += draws[:, 0] @ draws[:, 0]
        coefs = np.linalg.solve(xtx, xty)
        rss = yty - coefs @ xty
        resid_sd = math.sqrt(rss / (n - 3))
        coef_se = resid_sd * np.sqrt(np.diag(np.linalg.inv(xtx)))
        assert abs(coefs[0] - cond.intercept) <= 3 * coef_se[0]
        assert abs(coefs[1] - cond.slope[0]) <= 3 * coef_se[1]
        assert abs(coefs[2] - cond.slope[1]) <= 3 * coef_se[2]
        assert abs(resid_sd - cond.cond_vol) <= 3 * cond.cond_vol / math.sqrt(2 * n)

    def test_singular_conditioning_block(self):
        law_like = terminal_law(two_asset_model(rho=0.3))
        broken = ConditionalLaw  # noqa: F841  (keep import exercised)
        import basket_taylor.model as model_mod

        singular = model_mod.TerminalLaw(
            mean=np.zeros(3),
            cov=np.array([[1.0, 0.5, 0.5], [0.5, 1.0, 1.0], [0.5, 1.0, 1.0]]),
        )
        with pytest.raises(NotPositiveDefinite):
            condition_first(singular)
        assert law_like.dim == 2


class TestMultiIndex:
    def test_total(self):
        assert MultiIndex(orders=(2, 0, 3)).total == 5

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            MultiIndex(orders=(1, -1))


class TestMixedExpPowerMoment:
    def test_central_second_moment(self):
        cov = np.array([[2.0, 0.3], [0.3, 1.0]])
        mean = np.array([0.1, -0.4])
        value = mixed_exp_power_moment(mean, cov, np.zeros(2), mean, (2, 0))
        assert value == pytest.approx(cov[0, 0], rel=1e-14)

    def test_pairing_cross_moment(self):
        cov = np.array([[2.0, 0.3], [0.3, 1.0]])
        mean = np.array([0.1, -0.4])
        value = mixed_exp_power_moment(mean, cov, np.zeros(2), mean, (1, 1))
        assert value == pytest.approx(cov[0, 1], rel=1e-14)

    def test_univariate_reduction(self):
        # E[e^{aW} (W - y*)^l] for W ~ N(mu, s^2), expanded through E[e^{asZ} Z^j].
        rng = np.random.default_rng(5)
        for _ in range(25):
            mu, a, ystar = rng.normal(size=3) * 0.5
            s = rng.uniform(0.2, 1.5)
            l = int(rng.integers(0, 5))
            expected = sum(
                math.comb(l, j) * (mu - ystar) ** (l - j) * s**j
                * exp_power_moment(a * s, j)
                for j in range(l + 1)
            ) * math.exp(a * mu)
            value = mixed_exp_power_moment([mu], [[s * s]], [a], [ystar], (l,))
            assert value == pytest.approx(expected, rel=1e-12, abs=1e-12)

    def test_even_central_moments_nonnegative(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            root = rng.normal(size=(3, 3))
            cov = root @ root.T + 0.1 * np.eye(3)
            mean = rng.normal(size=3)
            for orders in ((2, 0, 0), (2, 2, 0), (0, 2, 2), (4, 0, 0), (2, 2, 2)):
                assert mixed_exp_power_moment(mean, cov, np.zeros(3), mean, orders) >= 0.0

    def test_order_cap(self):
        with pytest.raises(OrderCapExceeded):
            mixed_exp_power_moment([0.0], [[1.0]], [0.0], [0.0], (9,))

    def test_accepts_multi_index(self):
        value_tuple = mixed_exp_power_moment([0.0], [[1.0]], [0.0], [0.0], (2,))
        value_mi = mixed_exp_power_moment([0.0], [[1.0]], [0.0], [0.0], MultiIndex((2,)))
        assert value_tuple == value_mi == pytest.approx(1.0, rel=1e-14)

    def test_isserlis_against_sampling(self):
        # Light version of the sampled cross-check (the acceptance suite runs
        # the full 1e7-sample variant).
        rng = np.random.default_rng(77)
        root = rng.normal(size=(3, 3))
        cov = root @ root.T + 0.5 * np.eye(3)
        n = 1_000_000
        draws = rng.standard_normal((n, 3)) @ np.linalg.cholesky(cov).T
        for orders in ((2, 1, 1), (4, 0, 0), (2, 2, 0)):
            samples = np.prod(draws ** np.asarray(orders), axis=1)
            se = samples.std(ddof=1) / math.sqrt(n)
            assert abs(central_moment(cov, orders) - samples.mean()) <= 5 * se
