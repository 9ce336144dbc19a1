"""Densities, matrix-variate law, samplers, and the limit mapping."""

import math

import numpy as np
import pytest
from scipy import stats

from sargsc import (
    G0Params,
    GammaParams,
    HermitianCovariance,
    g0_log_density,
    gamma_limit_of_g0,
    gamma_log_density,
    integrate_half_line,
    ln_multivariate_gamma,
    numerical_cdf,
    sample_g0,
    sample_gamma,
    wishart_log_density,
)

# Table-style parameter triples used throughout: textureless, moderate,
# and strong texture at four looks.
SEA = G0Params(-11.870, 0.320, 4.0)
FOREST = G0Params(-2.717, 0.179, 4.0)
URBAN = G0Params(-2.051, 0.182, 4.0)


def g0_betaprime(p: G0Params):
    """Independent oracle: the heavy-tailed law is a scaled beta-prime,
    Z = (gamma/L) * betaprime(L, -alpha)."""
    return stats.betaprime(p.looks, -p.alpha, scale=p.gamma / p.looks)


class TestParamTypes:
    def test_gamma_validation(self):
        with pytest.raises(ValueError):
            GammaParams(0.0, 4.0)
        with pytest.raises(ValueError):
            GammaParams(1.0, -1.0)

    def test_g0_validation(self):
        with pytest.raises(ValueError):
            G0Params(0.5, 1.0, 4.0)
        with pytest.raises(ValueError):
            G0Params(-2.0, 0.0, 4.0)
        with pytest.raises(ValueError):
            G0Params(-2.0, 1.0, 0.0)

    def test_g0_mean(self):
        assert G0Params(-3.0, 2.0, 4.0).mean() == pytest.approx(1.0)
        with pytest.raises(ValueError):
            G0Params(-1.0, 1.0, 4.0).mean()

    def test_hermitian_validation(self):
        with pytest.raises(ValueError):
            HermitianCovariance([[1.0, 0.5], [0.4, 1.0]])
        with pytest.raises(ValueError):
            HermitianCovariance([[1.0, 2.0], [2.0, 1.0]])  # not positive definite
        hc = HermitianCovariance(np.eye(3))
        assert hc.m == 3
        assert hc.ln_det() == pytest.approx(0.0, abs=1e-14)


class TestGammaLogDensity:
    def test_unit_exponential(self):
        assert gamma_log_density(1.0, GammaParams(1.0, 1.0)) == pytest.approx(
            -1.0, abs=1e-12
        )

    def test_hand_value_four_looks(self):
        # frozen against a 30-digit evaluation of the closed form
        got = gamma_log_density(0.2, GammaParams(0.5, 4.0))
        assert got == pytest.approx(0.097692960188987588, abs=1e-12)

    def test_zero_conventions(self):
        assert gamma_log_density(0.0, GammaParams(1.0, 4.0)) == -math.inf
        assert gamma_log_density(0.0, GammaParams(2.0, 1.0)) == pytest.approx(
            math.log(0.5), abs=1e-14
        )
        assert gamma_log_density(0.0, GammaParams(1.0, 0.5)) == math.inf

    def test_matches_scipy(self):
        z = np.linspace(0.01, 3.0, 57)
        p = GammaParams(0.7, 4.0)
        ours = gamma_log_density(z, p)
        oracle = stats.gamma(a=4.0, scale=0.7 / 4.0).logpdf(z)
        assert np.max(np.abs(ours - oracle)) <= 1e-10

    def test_domain_error(self):
        with pytest.raises(ValueError):
            gamma_log_density(-0.1, GammaParams(1.0, 4.0))

    def test_density_at_mean_normalizes(self):
        p = GammaParams(0.0983, 4.0)
        assert math.isfinite(gamma_log_density(p.sigma2, p))
        res = integrate_half_line(
            lambda z: np.exp(gamma_log_density(z, p)), scale_hint=p.sigma2
        )
        assert res.value == pytest.approx(1.0, abs=1e-8)


class TestG0LogDensity:
    def test_hand_value_small_integers(self):
        got = g0_log_density(1.0, G0Params(-2.0, 1.0, 1.0))
        assert got == pytest.approx(-2.0 * math.log(2.0), abs=1e-12)

    def test_urban_point_value(self):
        # frozen against a 30-digit evaluation of the closed form
        got = g0_log_density(0.1670, URBAN)
        assert got == pytest.approx(0.72549414847978694, abs=1e-11)

    def test_matches_betaprime(self):
        z = np.linspace(0.005, 2.0, 101)
        for p in (SEA, FOREST, URBAN):
            assert np.max(
                np.abs(g0_log_density(z, p) - g0_betaprime(p).logpdf(z))
            ) <= 1e-9

    def test_zero_conventions(self):
        assert g0_log_density(0.0, G0Params(-2.0, 1.0, 4.0)) == -math.inf
        expected = math.log(2.0) - 3.0 * math.log(1.0)  # -alpha * gamma^... at L=1
        assert g0_log_density(0.0, G0Params(-2.0, 1.0, 1.0)) == pytest.approx(
            math.log(2.0), abs=1e-12
        )
        assert g0_log_density(0.0, G0Params(-2.0, 1.0, 0.5)) == math.inf

    def test_mode_location_sea(self):
        # numeric argmax oracle; analytic mode (L-1)g/(L(1-a)) = 0.018648
        z = np.linspace(1e-6, 0.12, 1200001)
        lf = g0_log_density(z, SEA)
        mode = float(z[np.argmax(lf)])
        assert mode == pytest.approx(0.0186480, abs=2e-4)

    def test_tail_slope(self):
        # f ~ z^(L-1) * (gamma + Lz)^(alpha-L) ~ z^(alpha-1) for large z:
        # the (gamma+Lz) factor contributes its stated alpha-L exponent and
        # the z^(L-1) factor the rest
        p = FOREST
        z1, z2 = 1e4, 1e6
        slope = (g0_log_density(z2, p) - g0_log_density(z1, p)) / (
            math.log(z2) - math.log(z1)
        )
        assert slope == pytest.approx(p.alpha - 1.0, rel=0.01)
        factor_slope = slope - (p.looks - 1.0)
        assert factor_slope == pytest.approx(p.alpha - p.looks, rel=0.01)

    @pytest.mark.parametrize("alpha", [-1.5, -2.051, -2.717, -11.87])
    @pytest.mark.parametrize("looks", [1.0, 4.0, 8.0])
    def test_normalization_grid(self, alpha, looks):
        gam = {-1.5: 0.1, -2.051: 0.182, -2.717: 0.179, -11.87: 0.32}[alpha]
        p = G0Params(alpha, gam, looks)
        hint = gam / (-alpha - 1.0) if alpha < -1.0 else gam
        res = integrate_half_line(
            lambda z: np.exp(g0_log_density(z, p)), scale_hint=hint
        )
        assert res.value == pytest.approx(1.0, abs=1e-8)


class TestWishartLogDensity:
    def test_m1_reduces_to_gamma(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            z = float(rng.uniform(0.05, 2.0))
            s = float(rng.uniform(0.1, 3.0))
            looks = float(rng.integers(1, 9))
            w = wishart_log_density(
                HermitianCovariance([[z]]), HermitianCovariance([[s]]), looks
            )
            g = gamma_log_density(z, GammaParams(s, looks))
            assert abs(w - g) <= 1e-10

    def test_identity_matrices_direct_terms(self):
        got = wishart_log_density(
            HermitianCovariance(np.eye(2)), HermitianCovariance(np.eye(2)), 4.0
        )
        expected = 2 * 4 * math.log(4.0) - 4.0 * 2 - ln_multivariate_gamma(2, 4.0)
        assert got == pytest.approx(expected, abs=1e-12)

    def test_scaling_offset(self):
        z = np.array([[2.0, 0.3 + 0.1j], [0.3 - 0.1j, 1.5]])
        s = np.array([[1.0, 0.2j], [-0.2j, 0.8]])
        looks, m, c = 5.0, 2, 3.7
        base = wishart_log_density(
            HermitianCovariance(z), HermitianCovariance(s), looks
        )
        scaled = wishart_log_density(
            HermitianCovariance(c * z), HermitianCovariance(c * s), looks
        )
        # trace term is scale-free; |cZ|^(L-m) / |cS|^L contributes
        # ((L-m) - L) * m * ln c
        assert scaled - base == pytest.approx(-(m**2) * math.log(c), abs=1e-10)

    def test_dimension_and_looks_errors(self):
        with pytest.raises(ValueError):
            wishart_log_density(
                HermitianCovariance(np.eye(2)), HermitianCovariance(np.eye(3)), 4.0
            )
        with pytest.raises(ValueError):
            wishart_log_density(
                HermitianCovariance(np.eye(3)), HermitianCovariance(np.eye(3)), 1.5
            )


class TestSampleGamma:
    def test_mean_within_three_se(self):
        p = GammaParams(0.0294, 4.0)
        z = sample_gamma(p, 10**6, seed=11)
        se = math.sqrt(p.sigma2**2 / p.looks / z.size)
        assert abs(float(z.mean()) - 0.0294) <= 3.0 * se

    def test_variance_within_three_se(self):
        p = GammaParams(1.0, 4.0)
        z = sample_gamma(p, 10**6, seed=12)
        var = float(z.var())
        # SE of the sample variance from the fourth central moment
        m4 = float(np.mean((z - z.mean()) ** 4))
        se = math.sqrt((m4 - var**2) / z.size)
        assert abs(var - 0.25) <= 3.0 * se

    def test_determinism_and_streams(self):
        p = GammaParams(1.0, 4.0)
        a = sample_gamma(p, 1000, seed=5)
        b = sample_gamma(p, 1000, seed=5)
        c = sample_gamma(p, 1000, seed=5, stream=1)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_ks_against_scipy(self):
        p = GammaParams(0.7, 4.0)
        z = sample_gamma(p, 10**5, seed=21)
        d = stats.kstest(z, stats.gamma(a=4.0, scale=0.7 / 4.0).cdf).statistic
        assert d < 1.63 / math.sqrt(z.size)  # 1% critical value


class TestSampleG0:
    def test_mean_within_three_se(self):
        p = G0Params(-3.0, 2.0, 4.0)
        z = sample_g0(p, 10**6, seed=31)
        # mean gamma/(-alpha-1) = 1; variance exists for alpha < -2
        ez2 = p.gamma**2 * (p.looks + 1.0) / (
            p.looks * (-p.alpha - 1.0) * (-p.alpha - 2.0)
        )
        se = math.sqrt((ez2 - 1.0) / z.size)
        assert abs(float(z.mean()) - 1.0) <= 3.0 * se

    def test_variance_when_it_exists(self):
        p = G0Params(-5.0, 4.0, 4.0)
        z = sample_g0(p, 10**6, seed=32)
        ez2 = p.gamma**2 * (p.looks + 1.0) / (
            p.looks * (-p.alpha - 1.0) * (-p.alpha - 2.0)
        )
        var_true = ez2 - 1.0
        m4 = float(np.mean((z - z.mean()) ** 4))
        se = math.sqrt(max(m4 - float(z.var()) ** 2, 0.0) / z.size)
        assert abs(float(z.var()) - var_true) <= 4.0 * se

    def test_determinism(self):
        p = FOREST
        assert np.array_equal(sample_g0(p, 500, seed=9), sample_g0(p, 500, seed=9))

    @pytest.mark.parametrize("p", [SEA, FOREST, URBAN])
    def test_ks_against_betaprime(self, p):
        z = sample_g0(p, 10**5, seed=41)
        d = stats.kstest(z, g0_betaprime(p).cdf).statistic
        assert d < 1.63 / math.sqrt(z.size)


class TestNumericalCdf:
    def test_matches_betaprime(self):
        z = np.array([0.01, 0.05, 0.1, 0.2, 0.5, 1.0, 3.0])
        for p in (FOREST, URBAN):
            got = numerical_cdf(p, z)
            want = g0_betaprime(p).cdf(z)
            assert np.max(np.abs(got - want)) <= 1e-7

    def test_matches_scipy_gamma(self):
        p = GammaParams(0.5, 4.0)
        z = np.array([0.05, 0.25, 0.5, 1.0, 2.0])
        got = numerical_cdf(p, z)
        want = stats.gamma(a=4.0, scale=0.5 / 4.0).cdf(z)
        assert np.max(np.abs(got - want)) <= 1e-8

    def test_monotone_and_bounded(self):
        z = np.linspace(0.0, 5.0, 301)
        c = numerical_cdf(FOREST, z)
        assert np.all(np.diff(c) >= -1e-12)
        assert c[0] == pytest.approx(0.0, abs=1e-12)
        assert np.all(c <= 1.0 + 1e-9)

    def test_duplicate_points_and_errors(self):
        got = numerical_cdf(FOREST, [0.1, 0.1, 0.2])
        assert got[0] == got[1]
        with pytest.raises(ValueError):
            numerical_cdf(FOREST, [-0.5, 0.1])
        with pytest.raises(TypeError):
            numerical_cdf("not params", [0.1])


class TestGammaLimit:
    def test_unit_limit(self):
        q = gamma_limit_of_g0(G0Params(-1e6, 1e6, 4.0))
        assert q.sigma2 == pytest.approx(1.0, abs=1e-12)
        assert q.looks == 4.0

    def test_sea_limit_value(self):
        q = gamma_limit_of_g0(SEA)
        assert q.sigma2 == pytest.approx(0.320 / 11.870, abs=1e-12)

    def test_rejects_heavy_tail(self):
        with pytest.raises(ValueError):
            gamma_limit_of_g0(G0Params(-0.5, 1.0, 4.0))
        with pytest.raises(ValueError):
            gamma_limit_of_g0(G0Params(-1.0, 1.0, 4.0))
