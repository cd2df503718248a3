"""Distribution-layer tests: coefficients, PDF/CDF/CCDF, asymptote, scaling.

Coefficient reference values come from an arbitrary-precision evaluation
of the defining double sum (scripts/reference_values.py), cross-checked
there against the positive integral form.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from ftr_secrecy import (
    FtrParams,
    LinkBudget,
    Truncation,
    TruncationError,
    d0,
    d_coeff,
    ftr_ccdf,
    ftr_cdf,
    ftr_cdf_asymptotic,
    ftr_ln_ccdf,
    ftr_pdf,
    sigma2_from_avg_snr,
)
from ftr_secrecy.ftr_model import _d_ln, _ln_weights

TRUNC = Truncation(max_terms=4000)

# the three reference fading parameter sets used throughout
SET_A = (0.5, 5.0)
SET_B = (3.5, 15.0)
SET_C = (10.0, 15.0)

D_REFERENCE = {
    SET_B: [
        2.412638772724512093e-4,
        4.124507352415725021e-5,
        9.113157439363014096e-6,
        2.474696471437588962e-6,
        7.988312776969090004e-7,
    ],
    SET_A: [
        0.7889224223032126316,
        0.07035009670580396418,
        0.01885172093860312445,
    ],
    SET_C: [
        2.816874141633410552e-8,
        8.641228854060610476e-9,
        2.939924736500315599e-9,
    ],
}
D20_REFERENCE = 7.257023925483813842e-9  # SET_B, j = 20


def params(m, k, delta=0.5, sigma2=1.0):
    return FtrParams(m=m, k_ratio=k, delta=delta, sigma2=sigma2)


def rel_err(got, want):
    return abs(got - want) / abs(want)


class TestDCoeff:
    def test_unit_when_degenerate(self):
        assert rel_err(d_coeff(params(1.0, 0.0), 0), 1.0) < 1e-14

    def test_delta_zero_collapses(self):
        p = params(2.0, 4.0, delta=0.0)
        assert rel_err(d_coeff(p, 0), 1.0 / 36.0) < 1e-13
        assert rel_err(d_coeff(p, 3), math.gamma(5.0) / 6.0 ** 5) < 1e-13

    @pytest.mark.parametrize("pset", [SET_A, SET_B, SET_C])
    def test_reference_values(self, pset):
        p = params(*pset)
        for j, want in enumerate(D_REFERENCE[pset]):
            assert rel_err(d_coeff(p, j), want) < 1e-11

    @pytest.mark.parametrize("pset", [SET_A, SET_B, SET_C])
    def test_double_sum_matches_integral_route(self, pset):
        # independent evaluation paths; the double sum loses ~0.37
        # digits per j to cancellation, hence the shallow range
        p = params(*pset)
        lnd = _d_ln(p, 13)
        for j in range(13):
            assert rel_err(d_coeff(p, j), math.exp(lnd[j])) < 2e-9

    def test_integral_route_deep_reference(self):
        p = params(*SET_B)
        assert rel_err(math.exp(_d_ln(p, 21)[20]), D20_REFERENCE) < 1e-10

    def test_rejects_negative_index(self):
        with pytest.raises(ValueError):
            d_coeff(params(*SET_B), -1)


class TestD0:
    @pytest.mark.parametrize(
        "m, k, delta, want",
        [
            (1.0, 0.0, 0.5, 1.0),
            (2.0, 4.0, 0.0, 1.0 / 36.0),
        ],
    )
    def test_trivial(self, m, k, delta, want):
        assert rel_err(d0(params(m, k, delta)), want) < 1e-13

    @pytest.mark.parametrize("pset", [SET_A, SET_B, SET_C])
    def test_matches_d_coeff(self, pset):
        p = params(*pset)
        assert rel_err(d0(p), d_coeff(p, 0)) < 1e-12


class TestPdf:
    def test_exponential_special_case(self):
        p = params(1.0, 0.0, sigma2=0.5)
        assert rel_err(ftr_pdf(p, 1.0, TRUNC), math.exp(-1.0)) < 1e-12

    def test_origin_value(self):
        p = params(*SET_B)
        want = math.exp(
            p.m * math.log(p.m) - math.lgamma(p.m) + math.log(d0(p)) - math.log(p.scale)
        )
        assert rel_err(ftr_pdf(p, 0.0, TRUNC), want) < 1e-12

    def test_matches_cdf_derivative(self):
        p = params(*SET_B, sigma2=1.0 / 32.0)  # scale 1/16
        x, h = 0.5, 2e-5
        fd = (ftr_cdf(p, x + h, TRUNC) - ftr_cdf(p, x - h, TRUNC)) / (2.0 * h)
        assert abs(ftr_pdf(p, x, TRUNC) - fd) < 1e-6

    def test_rejects_negative_x(self):
        with pytest.raises(ValueError):
            ftr_pdf(params(*SET_B), -0.1, TRUNC)


class TestCdfCcdf:
    def test_boundary_values(self):
        p = params(*SET_B)
        assert ftr_cdf(p, 0.0, TRUNC) == 0.0
        assert ftr_ccdf(p, 0.0, TRUNC) == 1.0

    def test_exponential_special_case(self):
        p = params(1.0, 0.0, sigma2=0.5)
        assert rel_err(ftr_cdf(p, 2.0, TRUNC), 1.0 - math.exp(-2.0)) < 1e-12
        assert rel_err(ftr_ccdf(p, 3.0, TRUNC), math.exp(-3.0)) < 1e-12

    @given(x=st.floats(min_value=0.0, max_value=40.0))
    @settings(max_examples=50, deadline=None)
    def test_complement(self, x):
        p = params(*SET_B)
        assert abs(ftr_cdf(p, x, TRUNC) + ftr_ccdf(p, x, TRUNC) - 1.0) < 1e-9

    @given(
        x=st.floats(min_value=0.0, max_value=30.0),
        dx=st.floats(min_value=1e-6, max_value=10.0),
    )
    @settings(max_examples=50, deadline=None)
    def test_monotone(self, x, dx):
        p = params(*SET_A)
        assert ftr_cdf(p, x + dx, TRUNC) >= ftr_cdf(p, x, TRUNC)

    @given(
        u=st.floats(min_value=1e-3, max_value=150.0),
        scale=st.floats(min_value=1e-3, max_value=1e3),
    )
    @settings(max_examples=50, deadline=None)
    def test_scale_invariance(self, u, scale):
        # the series depends on x only through x / (2 sigma^2)
        x = u * scale
        scaled = params(*SET_B, sigma2=scale / 2.0)
        unit = params(*SET_B, sigma2=0.5)
        lhs = ftr_cdf(scaled, x, TRUNC)
        rhs = ftr_cdf(unit, x / scale, TRUNC)
        assert abs(lhs - rhs) <= 1e-12

    def test_deep_tail_keeps_relative_precision(self):
        p = params(*SET_B)
        ln_tail = ftr_ln_ccdf(p, 2000.0, TRUNC)
        assert -200.0 < ln_tail < -100.0  # far beyond double underflow

    def test_truncation_failure_raises(self):
        with pytest.raises(TruncationError):
            ftr_ccdf(params(*SET_B), 1.0, Truncation(max_terms=5))


@pytest.mark.parametrize("pset", [SET_A, SET_B, SET_C])
def test_pdf_normalization(pset):
    p = params(*pset)
    x_max = 40.0
    while ftr_ccdf(p, x_max, TRUNC) > 1e-10:
        x_max *= 2.0
    total, _ = quad(lambda x: ftr_pdf(p, x, TRUNC), 0.0, x_max, limit=300)
    assert abs(total - 1.0) < 1e-6


def test_cdf_matches_pdf_quadrature():
    p = params(*SET_B)
    for x in np.linspace(0.25, 12.0, 20):
        total, _ = quad(lambda u: ftr_pdf(p, u, TRUNC), 0.0, x, limit=300, epsabs=1e-11)
        assert abs(total - ftr_cdf(p, x, TRUNC)) < 1e-8


def test_weights_normalize():
    for pset in (SET_A, SET_B, SET_C):
        w = np.exp(_ln_weights(params(*pset), 1500))
        assert abs(w.sum() - 1.0) < 1e-12


class TestAsymptoticCdf:
    def test_zero_at_origin(self):
        assert ftr_cdf_asymptotic(params(*SET_B), 0.0) == 0.0

    def test_exponential_slope(self):
        p = params(1.0, 0.0, sigma2=50.0)  # scale 100, d_0 = 1
        assert rel_err(ftr_cdf_asymptotic(p, 1.0), 0.01) < 1e-12

    @pytest.mark.parametrize("pset", [SET_A, SET_B, SET_C])
    def test_ratio_tends_to_one(self, pset):
        x = 2.0
        p = params(*pset, sigma2=1e4 * x / 2.0)  # scale = 1e4 * x
        ratio = ftr_cdf_asymptotic(p, x) / ftr_cdf(p, x, TRUNC)
        assert 0.98 < ratio < 1.02


class TestSigma2FromAvgSnr:
    def test_examples(self):
        p15 = params(1.0, 15.0)
        assert sigma2_from_avg_snr(0.0, LinkBudget(1.0), p15) == 1.0 / 32.0
        p0 = params(1.0, 0.0)
        assert rel_err(sigma2_from_avg_snr(10.0, LinkBudget(1.0), p0), 5.0) < 1e-12
        want = 10.0 ** 0.5 / 32.0
        assert rel_err(sigma2_from_avg_snr(5.0, LinkBudget(1.0), p15), want) < 1e-12


class TestValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(m=0.0, k_ratio=1.0, delta=0.5, sigma2=1.0),
            dict(m=1.0, k_ratio=-1.0, delta=0.5, sigma2=1.0),
            dict(m=1.0, k_ratio=1.0, delta=1.5, sigma2=1.0),
            dict(m=1.0, k_ratio=1.0, delta=0.5, sigma2=0.0),
        ],
    )
    def test_bad_params_rejected(self, kwargs):
        with pytest.raises(ValueError):
            FtrParams(**kwargs)

    def test_bad_truncation_rejected(self):
        with pytest.raises(ValueError):
            Truncation(max_terms=0)
        with pytest.raises(ValueError):
            Truncation(rel_tol=0.0)
