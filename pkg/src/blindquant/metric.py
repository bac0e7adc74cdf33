"""One-dimensional Wasserstein distances.

``w1_numeric`` integrates ``|F - G|`` over the real line; ``w2_numeric``
integrates the squared quantile difference over (0, 1).  Closed forms cover
Gaussian pairs, uniform/exponential and exponential/exponential pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from ._validation import check_finite, check_positive
from .dist import Distribution, Uniform
from .exceptions import DomainError, QuadratureError
from .fold import FoldedDistribution, FoldParams


@dataclass(frozen=True)
class CdfCurve:
    """A CDF together with a finite interval carrying all but ``tol`` mass."""

    func: Callable[[float], float]
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.hi > self.lo):
            raise DomainError(f"effective support must be a finite interval, got [{self.lo}, {self.hi}]")

    def __call__(self, x):
        return self.func(x)

    @classmethod
    def from_distribution(cls, d: Distribution, tail=1e-13):
        lo, hi = d.effective_support(tail)
        return cls(d.cdf, lo, hi)

    @classmethod
    def from_folded(cls, fd: FoldedDistribution):
        lo, hi = fd.support
        return cls(fd.cdf, lo, hi)


def _quad(func, a, b, epsabs, points=None, what="integral"):
    with np.errstate(all="ignore"):
        val, err, *rest = integrate.quad(
            func, a, b, epsabs=epsabs, epsrel=1e-10, limit=1000, points=points, full_output=1
        )
    if not math.isfinite(val) or err > 10 * epsabs + 1e-8 * abs(val):
        raise QuadratureError(f"{what}: estimate {val}, error {err}")
    return val


def w1_numeric(F: CdfCurve, G: CdfCurve, epsabs=1e-10) -> float:
    """Earth mover's distance ``integral |F - G|`` over the union support."""
    lo, hi = min(F.lo, G.lo), max(F.hi, G.hi)
    inner = sorted({x for x in (F.lo, F.hi, G.lo, G.hi) if lo < x < hi})
    return _quad(lambda t: abs(float(F(t)) - float(G(t))), lo, hi, epsabs,
                 points=inner or None, what="W1")


def w2_numeric(qx: Callable, qy: Callable, epsabs=1e-12) -> float:
    """``sqrt(integral_0^1 (qx(u) - qy(u))^2 du)`` for quantile functions.

    The two halves of the unit interval are integrated separately so each
    endpoint singularity is handled by the extrapolating quadrature alone.
    """
    def integrand(u):
        diff = float(qx(u)) - float(qy(u))
        return diff * diff

    total = 0.0
    for a, b in ((0.0, 0.5), (0.5, 1.0)):
        total += _quad(integrand, a, b, epsabs, what="W2")
    if not math.isfinite(total):
        raise QuadratureError("divergent W2 integral")
    return math.sqrt(max(total, 0.0))


def w2_between(x: Distribution, y: Distribution) -> float:
    return w2_numeric(x.quantile, y.quantile)


def w1_between(x: Distribution, y: Distribution) -> float:
    return w1_numeric(CdfCurve.from_distribution(x), CdfCurve.from_distribution(y))


def w2_gaussian(mu1, sigma1, mu2, sigma2) -> float:
    for v, n in ((mu1, "mu1"), (mu2, "mu2")):
        check_finite(v, n)
    check_positive(sigma1, "sigma1")
    check_positive(sigma2, "sigma2")
    return math.hypot(mu2 - mu1, sigma2 - sigma1)


def w2_uniform_exponential(width, rate) -> float:
    """W2 between ``U[0, width]`` and an exponential with the given rate."""
    c = check_positive(width, "width")
    p = check_positive(rate, "rate")
    radicand = 2.0 / p**2 - 1.5 * c / p + c * c / 3.0
    # squared L2 norm; only rounding can make it negative
    return math.sqrt(max(radicand, 0.0))


def w2_exponential(rate1, rate2) -> float:
    """W2 between two exponentials: ``sqrt(2) * |1/rate1 - 1/rate2|``."""
    p1 = check_positive(rate1, "rate1")
    p2 = check_positive(rate2, "rate2")
    return math.sqrt(2.0) * abs(1.0 / p1 - 1.0 / p2)


def w2_exponential_tabulated(rate1, rate2) -> float:
    """The tabulated value ``|1/rate1 - 1/rate2|`` (lacks the sqrt(2) factor)."""
    return abs(1.0 / check_positive(rate1, "rate1") - 1.0 / check_positive(rate2, "rate2"))


def w1_folded_to_uniform(base: Distribution, params: FoldParams, tol=1e-13) -> float:
    """W1 between ``fold(X)`` and ``U[-half_range, half_range]``."""
    fd = FoldedDistribution(base, params, tol=tol)
    lam = params.half_range
    uniform = Uniform(-lam, lam)
    return w1_numeric(CdfCurve.from_folded(fd), CdfCurve(uniform.cdf, -lam, lam))
