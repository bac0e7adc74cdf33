import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from blindquant.dist import Exponential, Lognormal, Normal, Uniform, from_spec, moments, pdf, sample
from blindquant.exceptions import DomainError

ALL = [Normal(0.3, 1.7), Uniform(-2.0, 3.0), Exponential(0.8), Lognormal(0.2, 0.6)]


def test_normal_density_at_mean():
    assert pdf(Normal(0, 1), 0.0) == pytest.approx(1 / math.sqrt(2 * math.pi), abs=1e-15)


@pytest.mark.parametrize("d", ALL, ids=lambda d: d.spec())
def test_pdf_integrates_to_one(d):
    lo, hi = d.effective_support()
    total, _ = integrate.quad(d.pdf, lo, hi, limit=200, points=[d.moments()[0]])
    assert total == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("d", ALL, ids=lambda d: d.spec())
def test_quantile_inverts_cdf(d):
    # interior: where the cdf itself is not rounded to 0 or 1
    lo, hi = d.quantile(1e-6), d.quantile(1 - 1e-6)
    x = np.linspace(lo, hi, 201)
    np.testing.assert_allclose(d.quantile(d.cdf(x)), x, atol=1e-9, rtol=1e-9)


@pytest.mark.parametrize("d", ALL, ids=lambda d: d.spec())
def test_cdf_plus_sf_is_one(d):
    x = np.linspace(*d.effective_support(), 101)
    np.testing.assert_allclose(d.cdf(x) + d.sf(x), 1.0, atol=1e-15)


@pytest.mark.parametrize("u", [0.0, 1.0, -0.1, 1.5])
def test_quantile_rejects_closed_endpoints(u):
    with pytest.raises(DomainError):
        Normal(0, 1).quantile(u)


def test_uniform_moments_use_standard_deviation():
    mean, sd = moments(Uniform(-1, 1))
    assert mean == 0.0
    assert sd == pytest.approx(2 / math.sqrt(12))


def test_exponential_moments():
    assert moments(Exponential(2.0)) == (0.5, 0.5)


def test_lognormal_moments_match_quadrature():
    d = Lognormal(0.1, 0.5)
    m1, _ = integrate.quad(lambda x: x * d.pdf(x), 0, np.inf)
    m2, _ = integrate.quad(lambda x: x * x * d.pdf(x), 0, np.inf)
    mean, sd = d.moments()
    assert mean == pytest.approx(m1, rel=1e-9)
    assert sd == pytest.approx(math.sqrt(m2 - m1 * m1), rel=1e-8)


@pytest.mark.parametrize("bad", [
    lambda: Normal(0, 0), lambda: Normal(0, -1), lambda: Uniform(1, 1), lambda: Uniform(2, 1),
    lambda: Exponential(0), lambda: Lognormal(0, 0), lambda: Normal(float("nan"), 1),
])
def test_invalid_parameters(bad):
    with pytest.raises(DomainError):
        bad()


@pytest.mark.parametrize("d", ALL, ids=lambda d: d.spec())
def test_partial_moments_match_quadrature(d):
    lo, hi = d.effective_support(1e-6)
    cuts = np.linspace(lo, hi, 6)
    m0, m1, m2 = d.partial_moments(cuts[:-1], cuts[1:])
    for k, got in enumerate((m0, m1, m2)):
        ref = [integrate.quad(lambda x: x ** k * d.pdf(x), a, b)[0] for a, b in zip(cuts[:-1], cuts[1:])]
        np.testing.assert_allclose(got, ref, rtol=1e-8, atol=1e-13)


def test_sampling_is_seed_deterministic():
    a = sample(Normal(0, 1), np.random.default_rng(5), 100)
    b = sample(Normal(0, 1), np.random.default_rng(5), 100)
    np.testing.assert_array_equal(a, b)


def test_sample_means_within_clt_bounds():
    n = 10 ** 6
    rng = np.random.default_rng(20)
    assert abs(Uniform(-1, 1).sample(rng, n).mean()) <= 4 * (2 / math.sqrt(12)) / math.sqrt(n)
    assert abs(Exponential(1.0).sample(rng, n).mean() - 1.0) <= 4 / math.sqrt(n)


@pytest.mark.parametrize("d", ALL, ids=lambda d: d.spec())
def test_empirical_cdf_close_to_analytic(d):
    n = 10 ** 6
    x = np.sort(d.sample(np.random.default_rng(3), n))
    F = d.cdf(x)
    ks = max(np.max(np.arange(1, n + 1) / n - F), np.max(F - np.arange(n) / n))
    assert ks <= 2 / math.sqrt(n) * 2


def test_spec_round_trip():
    for d in ALL:
        assert from_spec(*d.spec().split()) == d
    with pytest.raises(DomainError):
        from_spec("cauchy", 0, 1)
    with pytest.raises(DomainError):
        from_spec("normal", 0)


@given(st.floats(-5, 5), st.floats(0.1, 5), st.floats(1e-6, 1 - 1e-6))
def test_normal_quantile_cdf_roundtrip(mu, sigma, u):
    d = Normal(mu, sigma)
    assert d.cdf(d.quantile(u)) == pytest.approx(u, rel=1e-9, abs=1e-15)


@given(st.floats(0.05, 20), st.floats(0, 30), st.floats(0, 30))
def test_exponential_cdf_monotone(rate, x, y):
    d = Exponential(rate)
    lo, hi = min(x, y), max(x, y)
    assert d.cdf(lo) <= d.cdf(hi)
