"""Special functions and half-line quadrature."""

import math

import numpy as np
import pytest
from scipy import special as sp

from sargsc import (
    QuadratureConfig,
    QuadratureError,
    digamma,
    integrate_half_line,
    ln_gamma,
    ln_multivariate_gamma,
)
from sargsc._kernels import pykernels

# Frozen against a 40-digit arbitrary-precision evaluation.
DIGAMMA_TABLE = [
    (0.001, -1000.5755719318103),
    (0.01, -100.56088545786867),
    (0.1, -10.423754940411077),
    (0.5, -1.9635100260214235),
    (1.0, -0.57721566490153286),
    (1.5, 0.036489973978576521),
    (2.0, 0.42278433509846714),
    (3.7, 1.1671535393615114),
    (4.0, 1.2561176684318005),
    (6.0, 1.7061176684318005),
    (11.87, 2.4313001788107495),
    (50.0, 3.9019896734278922),
    (123.456, 4.8118293238289854),
    (1000.0, 6.9072551956488121),
    (10000.0, 9.2102903711428494),
]

LN_GAMMA_TABLE = [
    (0.001, 6.9071788853838537),
    (0.01, 4.5994798780420217),
    (0.1, 2.252712651734206),
    (0.5, 0.57236494292470009),
    (1.0, 0.0),
    (1.5, -0.12078223763524522),
    (2.0, 0.0),
    (3.7, 1.4280723266653879),
    (4.0, 1.791759469228055),
    (6.0, 4.787491742782046),
    (11.87, 17.185498927534765),
    (50.0, 144.56574394634489),
    (123.456, 469.60554712992947),
    (1000.0, 5905.2204232091812),
    (10000.0, 82099.717496442377),
]


class TestDigamma:
    def test_euler_mascheroni(self):
        assert abs(digamma(1.0) + 0.5772156649015329) <= 1e-12

    def test_recurrence_step_from_one(self):
        assert abs(digamma(2.0) - 0.4227843350984671) <= 1e-12

    def test_value_at_four(self):
        assert abs(digamma(4.0) - 1.2561176684318005) <= 1e-12

    @pytest.mark.parametrize("x,expected", DIGAMMA_TABLE)
    def test_table(self, x, expected):
        assert abs(digamma(x) - expected) <= 1e-12

    def test_against_scipy_grid(self):
        x = np.concatenate(
            [np.linspace(1e-3, 0.99, 301), np.linspace(1.0, 300.0, 900)]
        )
        assert np.max(np.abs(digamma(x) - sp.digamma(x))) <= 1e-12

    @pytest.mark.parametrize("x", [0.1, 1.0, 3.7, 50.0])
    def test_recurrence_identity(self, x):
        assert abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) <= 1e-10

    def test_array_shape_and_scalar_type(self):
        out = digamma(np.array([[1.0, 2.0], [3.0, 4.0]]))
        assert out.shape == (2, 2)
        assert isinstance(digamma(2.5), float)

    @pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
    def test_domain_error(self, bad):
        with pytest.raises(ValueError):
            digamma(bad)


class TestLnGamma:
    def test_at_one(self):
        assert ln_gamma(1.0) == pytest.approx(0.0, abs=1e-12)

    def test_factorial_three(self):
        assert abs(ln_gamma(4.0) - math.log(6.0)) <= 1e-12

    def test_half(self):
        assert abs(ln_gamma(0.5) - math.log(math.sqrt(math.pi))) <= 1e-12

    @pytest.mark.parametrize("x,expected", LN_GAMMA_TABLE)
    def test_table(self, x, expected):
        # absolute error contract, checked on the value itself for
        # moderate x and on matching relative precision for huge x
        tol = 1e-12 if expected == 0.0 else max(1e-12, 1e-15 * abs(expected))
        assert abs(ln_gamma(x) - expected) <= tol

    def test_against_scipy_grid(self):
        x = np.concatenate(
            [np.linspace(1e-3, 0.99, 301), np.linspace(1.0, 300.0, 900)]
        )
        assert np.max(np.abs(ln_gamma(x) - sp.gammaln(x))) <= 1e-12

    @pytest.mark.parametrize("x", [0.1, 1.0, 3.7, 50.0])
    def test_recurrence_identity(self, x):
        assert abs(ln_gamma(x + 1.0) - ln_gamma(x) - math.log(x)) <= 1e-10

    @pytest.mark.parametrize("bad", [0.0, -3.0, math.nan])
    def test_domain_error(self, bad):
        with pytest.raises(ValueError):
            ln_gamma(bad)


class TestLnMultivariateGamma:
    def test_m1_reduces_to_ln_gamma(self):
        assert ln_multivariate_gamma(1, 4.0) == pytest.approx(
            math.log(6.0), abs=1e-12
        )

    def test_m2_defining_sum(self):
        expected = math.log(math.pi) + math.log(6.0) + math.log(2.0)
        assert ln_multivariate_gamma(2, 4.0) == pytest.approx(expected, abs=1e-12)

    def test_m3_defining_sum(self):
        expected = (
            3.0 * math.log(math.pi)
            + math.log(6.0)
            + math.log(2.0)
            + math.log(1.0)
        )
        assert ln_multivariate_gamma(3, 4.0) == pytest.approx(expected, abs=1e-12)

    def test_noninteger_looks(self):
        expected = (
            3.0 * math.log(math.pi)
            + float(sp.gammaln(4.5))
            + float(sp.gammaln(3.5))
            + float(sp.gammaln(2.5))
        )
        assert ln_multivariate_gamma(3, 4.5) == pytest.approx(expected, abs=1e-11)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            ln_multivariate_gamma(0, 4.0)
        with pytest.raises(ValueError):
            ln_multivariate_gamma(2.5, 4.0)
        with pytest.raises(ValueError):
            ln_multivariate_gamma(3, 2.0)  # needs looks > m - 1


class TestGaussKronrodRule:
    def test_embedded_gauss_nodes(self):
        nodes, weights = np.polynomial.legendre.leggauss(7)
        got = pykernels.GK_NODES[1::2]
        assert np.max(np.abs(np.sort(got) - np.sort(nodes))) <= 1e-13
        assert np.max(np.abs(pykernels.GK_WG[1::2] - weights)) <= 1e-13

    def test_weights_sum_to_interval_length(self):
        assert math.fsum(pykernels.GK_WK) == pytest.approx(2.0, abs=1e-14)
        assert math.fsum(pykernels.GK_WG) == pytest.approx(2.0, abs=1e-14)

    @pytest.mark.parametrize("degree", range(0, 23))
    def test_polynomial_exactness(self, degree):
        # the 15-point nested rule is exact through degree 22
        approx = float(np.dot(pykernels.GK_WK, pykernels.GK_NODES**degree))
        exact = 0.0 if degree % 2 else 2.0 / (degree + 1)
        assert abs(approx - exact) <= 1e-13

    @pytest.mark.parametrize("degree", [7, 8, 13])
    def test_gauss_subrule_exactness(self, degree):
        approx = float(np.dot(pykernels.GK_WG, pykernels.GK_NODES**degree))
        exact = 0.0 if degree % 2 else 2.0 / (degree + 1)
        assert abs(approx - exact) <= 1e-13


class TestIntegrateHalfLine:
    def test_unit_exponential(self):
        res = integrate_half_line(lambda z: np.exp(-z))
        assert res.value == pytest.approx(1.0, abs=1e-10)
        assert abs(res.value - 1.0) <= max(res.error, 1e-13)

    def test_gamma_two(self):
        res = integrate_half_line(lambda z: z * np.exp(-z))
        assert res.value == pytest.approx(1.0, abs=1e-10)
        assert abs(res.value - 1.0) <= max(res.error, 1e-13)

    def test_half_gaussian(self):
        res = integrate_half_line(lambda z: np.exp(-z * z))
        exact = 0.5 * math.sqrt(math.pi)
        assert res.value == pytest.approx(exact, abs=1e-10)
        assert abs(res.value - exact) <= max(res.error, 1e-13)

    def test_gamma_density_normalization(self):
        sigma2, looks = 0.0294, 4.0
        const = looks * math.log(looks / sigma2) - math.lgamma(looks)

        def dens(z):
            return np.exp(const + (looks - 1.0) * np.log(z) - looks * z / sigma2)

        res = integrate_half_line(dens, scale_hint=sigma2)
        assert res.value == pytest.approx(1.0, abs=1e-9)

    def test_scale_hint_invariance(self):
        a = integrate_half_line(lambda z: np.exp(-z), scale_hint=1.0)
        b = integrate_half_line(lambda z: np.exp(-z), scale_hint=37.0)
        assert a.value == pytest.approx(b.value, abs=1e-9)

    def test_error_bound_reported(self):
        cfg = QuadratureConfig(rel_tol=1e-10, abs_tol=1e-12)
        res = integrate_half_line(lambda z: np.exp(-z), cfg)
        assert res.error <= max(cfg.rel_tol * abs(res.value), cfg.abs_tol)

    def test_nonconvergence_carries_estimate(self):
        cfg = QuadratureConfig(rel_tol=1e-15, abs_tol=1e-300, max_subdivisions=3)
        with pytest.raises(QuadratureError) as err:
            integrate_half_line(lambda z: np.exp(-z), cfg)
        assert math.isfinite(err.value.value)
        assert err.value.value == pytest.approx(1.0, abs=1e-3)
        assert err.value.error > 0.0

    def test_config_validation(self):
        with pytest.raises(ValueError):
            QuadratureConfig(rel_tol=-1.0)
        with pytest.raises(ValueError):
            QuadratureConfig(abs_tol=-1e-3)
        with pytest.raises(ValueError):
            QuadratureConfig(max_subdivisions=0)
        with pytest.raises(ValueError):
            integrate_half_line(lambda z: np.exp(-z), scale_hint=0.0)
