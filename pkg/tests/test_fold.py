import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from blindquant.dist import Exponential, Lognormal, Normal, Uniform
from blindquant.exceptions import DomainError, TruncationError
from blindquant.fold import (
    FoldedDistribution,
    FoldParams,
    fold,
    folded_cdf_exponential,
    folded_cdf_series,
    folded_pdf_gaussian,
    folded_pdf_series,
    folded_pdf_uniform,
)

# 40-digit references evaluated independently with mpmath series
GAUSS_A1_THETA0 = 0.5071918860311143567
EXP1_A1_CDF_MINUS_HALF = 0.1674050972784433199
EXP1_A1_CDF_ZERO = 1 / (math.e + 1)


def test_fold_examples():
    assert fold(-0.3, FoldParams(10, 1)) == -1.0
    assert fold(1.5, FoldParams(1, 1)) == pytest.approx(-0.5)
    assert fold(1.0, FoldParams(1, 1)) == -1.0
    assert fold(0.25, FoldParams(2, 1)) == 0.5


@given(st.floats(-1e6, 1e6), st.floats(0.01, 100), st.floats(0.01, 10))
def test_fold_range_is_half_open(x, a, lam):
    y = fold(x, FoldParams(a, lam))
    assert -lam <= y < lam


@given(st.floats(-100, 100), st.floats(0.1, 10), st.integers(-20, 20))
def test_fold_is_periodic(x, a, k):
    p = FoldParams(a, 1.0)
    y0, y1 = fold(x, p), fold(x + k * p.period, p)
    # equal up to rounding, allowing the seam to jump by a full period
    d = abs(y0 - y1)
    assert min(d, abs(d - 2.0)) < 1e-9 * (1 + abs(a * x) + abs(k))


@given(st.floats(-0.99, 0.99))
def test_fold_is_identity_inside_range(x):
    assert fold(x, FoldParams(1, 1)) == pytest.approx(x, abs=1e-15)


def test_fold_params_validation():
    with pytest.raises(DomainError):
        FoldParams(0, 1)
    with pytest.raises(DomainError):
        FoldParams(1, -1)
    assert FoldParams(4, 1).period == 0.5


def test_gaussian_fold_density_at_zero():
    fd = FoldedDistribution(Normal(0, 1), FoldParams(1, 1))
    assert folded_pdf_series(fd, 0.0) == pytest.approx(GAUSS_A1_THETA0, abs=1e-13)
    assert folded_pdf_gaussian(0, 1, FoldParams(1, 1), 0.0) == pytest.approx(GAUSS_A1_THETA0, abs=1e-13)


def test_exponential_fold_cdf_values():
    p = FoldParams(1, 1)
    fd = FoldedDistribution(Exponential(1.0), p)
    for theta, ref in ((-0.5, EXP1_A1_CDF_MINUS_HALF), (0.0, EXP1_A1_CDF_ZERO)):
        assert folded_cdf_series(fd, theta) == pytest.approx(ref, abs=1e-13)
        assert folded_cdf_exponential(1.0, p, theta) == pytest.approx(ref, abs=1e-13)


def test_uniform_spanning_two_periods_is_flat():
    theta = np.linspace(-1, 1, 101)[:-1]
    off_seam = theta != 0.0
    f = folded_pdf_uniform(0, 4, FoldParams(1, 1), theta)
    np.testing.assert_allclose(f[off_seam], 0.5)
    # both folded endpoints sit at 0 and the closed indicators overlap there
    assert folded_pdf_uniform(0, 4, FoldParams(1, 1), 0.0) == 0.75


def test_uniform_single_sheet_is_rescaled_interval():
    p = FoldParams(1, 1)
    theta = np.array([-0.9, -0.5, 0.0, 0.3, 0.5, 0.9])
    np.testing.assert_allclose(folded_pdf_uniform(-0.5, 0.5, p, theta), [0, 1, 1, 1, 1, 0])


def test_truncation_requires_positive_tolerance():
    with pytest.raises(TruncationError):
        FoldedDistribution(Normal(0, 1), FoldParams(1, 1), tol=0.0)


def test_half_width_grows_with_gain():
    small = FoldedDistribution(Normal(0, 1), FoldParams(1, 1)).half_width
    large = FoldedDistribution(Normal(0, 1), FoldParams(100, 1)).half_width
    assert large > small


@pytest.mark.parametrize("base", [Normal(0.4, 0.7), Exponential(1.3), Uniform(-0.7, 2.2), Lognormal(0, 0.5)],
                         ids=lambda d: d.spec())
@pytest.mark.parametrize("a", [1.0, 3.0])
def test_folded_pdf_normalised(base, a):
    fd = FoldedDistribution(base, FoldParams(a, 1.0))
    points = None
    if isinstance(base, Uniform):
        points = [fold(base.lo, fd.params), fold(base.hi, fd.params)]
    total, _ = integrate.quad(fd.pdf, -1, 1, points=points, limit=200, epsabs=1e-12)
    assert total == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("base", [Normal(0, 1), Exponential(2.0), Uniform(-3, 1)], ids=lambda d: d.spec())
def test_folded_cdf_endpoints_and_monotone(base):
    fd = FoldedDistribution(base, FoldParams(2.5, 1.0))
    theta = np.linspace(-1.5, 1.5, 601)
    F = fd.cdf(theta)
    assert np.all(np.diff(F) >= -1e-15)
    assert fd.cdf(-1.0001) == 0.0
    assert fd.cdf(1.0) == 1.0


@given(st.floats(-3, 3), st.floats(0.2, 3), st.floats(0.5, 30), st.floats(-0.999, 0.999))
def test_gaussian_closed_form_matches_series(mu, sigma, a, theta):
    p = FoldParams(a, 1.0)
    fd = FoldedDistribution(Normal(mu, sigma), p)
    assert folded_pdf_gaussian(mu, sigma, p, theta) == pytest.approx(fd.pdf(theta), abs=1e-9)


@given(st.floats(0.1, 5), st.floats(0.5, 30), st.floats(-0.999, 0.999))
def test_exponential_closed_form_matches_series(rate, a, theta):
    p = FoldParams(a, 1.0)
    fd = FoldedDistribution(Exponential(rate), p)
    assert folded_cdf_exponential(rate, p, theta) == pytest.approx(fd.cdf(theta), abs=1e-9)


def test_sample_lies_in_range_and_matches_cdf():
    fd = FoldedDistribution(Normal(0.2, 0.8), FoldParams(3, 1))
    x = np.sort(fd.sample(np.random.default_rng(11), 200_000))
    assert x.min() >= -1 and x.max() < 1
    F = fd.cdf(x)
    n = x.size
    ks = max(np.max(np.arange(1, n + 1) / n - F), np.max(F - np.arange(n) / n))
    assert ks < 4 / math.sqrt(n)


@pytest.mark.parametrize("base", [Normal(0, 1), Exponential(1.0), Uniform(-0.7, 1.9)], ids=lambda d: d.spec())
@pytest.mark.parametrize("a", [1.0, 4.0])
def test_folded_histogram_chi_square(base, a):
    from scipy.stats import chi2

    fd = FoldedDistribution(base, FoldParams(a, 1))
    n = 10 ** 6
    edges = np.linspace(-1, 1, 101)
    counts = np.histogram(fd.sample(np.random.default_rng(17), n), edges)[0]
    prob = np.diff(np.append(fd.cdf(edges[:-1]), 1.0))
    keep = prob > 0
    stat = np.sum((counts[keep] - n * prob[keep]) ** 2 / (n * prob[keep]))
    assert chi2.sf(stat, keep.sum() - 1) > 1e-4
