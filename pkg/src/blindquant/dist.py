"""Amplitude distributions: Normal, Uniform, Exponential and Lognormal.

Each distribution is an immutable value exposing vectorised ``pdf``, ``cdf``,
``sf`` and ``quantile`` together with exact moments and the partial moments
``E[X^k; lo < X <= hi]`` (k = 0, 1, 2) used by quantizer design.  Sampling
goes through the quantile function for every variant.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import gammainc, ndtr, ndtri

from ._rng import make_rng
from ._validation import (
    as_float_array,
    check_count,
    check_finite,
    check_interval,
    check_positive,
    scalar_or_array,
)
from .exceptions import DomainError, QuadratureError

_SQRT_2PI = math.sqrt(2.0 * math.pi)
# Offset that moves ``Generator.random`` output from [0, 1) into (0, 1).
_HALF_ULP = 2.0**-54


class Distribution(ABC):
    """Base class of the catalog.  Subclasses are frozen dataclasses."""

    kind: str = ""

    # -- evaluation -----------------------------------------------------
    def pdf(self, x):
        x = as_float_array(x)
        return scalar_or_array(self._pdf(x), x)

    def cdf(self, x):
        x = as_float_array(x)
        return scalar_or_array(self._cdf(x), x)

    def sf(self, x):
        """Survival function ``1 - cdf(x)`` without cancellation."""
        x = as_float_array(x)
        return scalar_or_array(self._sf(x), x)

    def quantile(self, u):
        """Inverse CDF on the open interval (0, 1)."""
        u = as_float_array(u, "u")
        if np.any((u <= 0.0) | (u >= 1.0)):
            raise DomainError("quantile requires 0 < u < 1")
        return scalar_or_array(self._ppf(u), u)

    # -- summaries --------------------------------------------------------
    @property
    @abstractmethod
    def support(self) -> tuple[float, float]:
        """Closure of the support, possibly infinite."""

    @abstractmethod
    def moments(self) -> tuple[float, float]:
        """Exact ``(mean, stddev)``."""

    def partial_moments(self, lo, hi):
        """Arrays ``(M0, M1, M2)`` with ``Mk = E[X^k; lo < X <= hi]``.

        The generic version integrates the density numerically; variants with
        closed forms override it.
        """
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        out = np.zeros((3, lo.size))
        s_lo, s_hi = self.support
        for i, (a, b) in enumerate(zip(lo, hi)):
            a, b = max(a, s_lo), min(b, s_hi)
            if not b > a:
                continue
            for k in range(3):
                val, err = integrate.quad(
                    lambda t: t**k * self._pdf(np.array(t)),
                    a, b, epsabs=1e-13, epsrel=1e-10, limit=200,
                )
                if not np.isfinite(val) or err > 1e-8 * max(1.0, abs(val)):
                    raise QuadratureError(f"partial moment {k} on [{a}, {b}]")
                out[k, i] = val
        return out[0], out[1], out[2]

    def effective_support(self, tail=1e-13):
        """Finite interval outside which each tail holds at most ``tail`` mass.

        Starts from mean +/- 12 stddev and widens to the tail quantiles.
        """
        mean, sd = self.moments()
        s_lo, s_hi = self.support
        lo = min(mean - 12.0 * sd, float(self._ppf(np.array(tail))))
        hi = max(mean + 12.0 * sd, float(self._ppf(np.array(1.0 - tail))))
        return max(lo, s_lo), min(hi, s_hi)

    def sample(self, rng, n):
        """``n`` i.i.d. draws by inverse transform."""
        n = check_count(n, "n")
        u = make_rng(rng).random(n) + _HALF_ULP
        return self._ppf(u)

    # -- variant hooks ------------------------------------------------------
    @abstractmethod
    def _pdf(self, x): ...

    @abstractmethod
    def _cdf(self, x): ...

    def _sf(self, x):
        return 1.0 - self._cdf(x)

    @abstractmethod
    def _ppf(self, u): ...

    def _coerce(self, *names):
        for name in names:
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def params(self) -> tuple[float, ...]:
        return tuple(getattr(self, f) for f in self.__dataclass_fields__)

    def spec(self) -> str:
        """Compact text form, e.g. ``normal 0 1``; inverse of :func:`from_spec`."""
        return " ".join([self.kind] + [repr(p) for p in self.params])


@dataclass(frozen=True)
class Normal(Distribution):
    mu: float = 0.0
    sigma: float = 1.0
    kind = "normal"

    def __post_init__(self):
        self._coerce("mu", "sigma")
        check_finite(self.mu, "mu")
        check_positive(self.sigma, "sigma")

    @property
    def support(self):
        return (-math.inf, math.inf)

    def moments(self):
        return (float(self.mu), float(self.sigma))

    def _pdf(self, x):
        z = (x - self.mu) / self.sigma
        return np.exp(-0.5 * z * z) / (self.sigma * _SQRT_2PI)

    def _cdf(self, x):
        return ndtr((x - self.mu) / self.sigma)

    def _sf(self, x):
        return ndtr((self.mu - x) / self.sigma)

    def _ppf(self, u):
        return self.mu + self.sigma * ndtri(u)

    def partial_moments(self, lo, hi):
        za = (np.asarray(lo, dtype=float) - self.mu) / self.sigma
        zb = (np.asarray(hi, dtype=float) - self.mu) / self.sigma
        za, zb = np.broadcast_arrays(np.atleast_1d(za), np.atleast_1d(zb))
        # mass from whichever tail keeps the difference well conditioned
        upper = za > 0
        m0 = np.where(upper, ndtr(-za) - ndtr(-zb), ndtr(zb) - ndtr(za))
        pa = np.exp(-0.5 * za * za) / _SQRT_2PI
        pb = np.exp(-0.5 * zb * zb) / _SQRT_2PI
        j1 = pa - pb
        za_pa = np.where(np.isfinite(za), np.nan_to_num(za) * pa, 0.0)
        zb_pb = np.where(np.isfinite(zb), np.nan_to_num(zb) * pb, 0.0)
        j2 = m0 + za_pa - zb_pb
        mu, s = self.mu, self.sigma
        m1 = mu * m0 + s * j1
        m2 = mu * mu * m0 + 2.0 * mu * s * j1 + s * s * j2
        return m0, m1, m2


@dataclass(frozen=True)
class Uniform(Distribution):
    lo: float = 0.0
    hi: float = 1.0
    kind = "uniform"

    def __post_init__(self):
        self._coerce("lo", "hi")
        check_interval(self.lo, self.hi, "lo", "hi")

    @property
    def support(self):
        return (float(self.lo), float(self.hi))

    def moments(self):
        return (0.5 * (self.lo + self.hi), (self.hi - self.lo) / math.sqrt(12.0))

    def _pdf(self, x):
        inside = (x >= self.lo) & (x <= self.hi)
        return np.where(inside, 1.0 / (self.hi - self.lo), 0.0)

    def _cdf(self, x):
        return np.clip((x - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def _sf(self, x):
        return np.clip((self.hi - x) / (self.hi - self.lo), 0.0, 1.0)

    def _ppf(self, u):
        return self.lo + u * (self.hi - self.lo)

    def partial_moments(self, lo, hi):
        a = np.clip(np.atleast_1d(np.asarray(lo, dtype=float)), self.lo, self.hi)
        b = np.clip(np.atleast_1d(np.asarray(hi, dtype=float)), self.lo, self.hi)
        a, b = np.broadcast_arrays(a, b)
        b = np.maximum(a, b)
        beta = 1.0 / (self.hi - self.lo)
        return beta * (b - a), beta * (b * b - a * a) / 2.0, beta * (b**3 - a**3) / 3.0


@dataclass(frozen=True)
class Exponential(Distribution):
    rate: float = 1.0
    kind = "exp"

    def __post_init__(self):
        self._coerce("rate")
        check_positive(self.rate, "rate")

    @property
    def support(self):
        return (0.0, math.inf)

    def moments(self):
        return (1.0 / self.rate, 1.0 / self.rate)

    def _pdf(self, x):
        return np.where(x >= 0.0, self.rate * np.exp(-self.rate * np.maximum(x, 0.0)), 0.0)

    def _cdf(self, x):
        return np.where(x >= 0.0, -np.expm1(-self.rate * np.maximum(x, 0.0)), 0.0)

    def _sf(self, x):
        return np.where(x >= 0.0, np.exp(-self.rate * np.maximum(x, 0.0)), 1.0)

    def _ppf(self, u):
        return -np.log1p(-u) / self.rate

    def partial_moments(self, lo, hi):
        # E[X^k; a < X <= b] = e^{-pa} sum_j C(k,j) a^{k-j} j!/p^j P(j+1, p(b-a))
        # with P the regularised lower incomplete gamma, exact on short cells.
        p = self.rate
        a = np.maximum(np.atleast_1d(np.asarray(lo, dtype=float)), 0.0)
        b = np.maximum(np.atleast_1d(np.asarray(hi, dtype=float)), 0.0)
        a, b = np.broadcast_arrays(a, b)
        b = np.maximum(a, b)
        scale = np.exp(-p * a)
        a_fin = np.where(np.isfinite(a), a, 0.0)
        span = np.where(np.isfinite(b), p * (b - a_fin), np.inf)
        g = [gammainc(j + 1, span) * math.factorial(j) / p**j for j in range(3)]
        m0 = scale * g[0]
        m1 = scale * (a_fin * g[0] + g[1])
        m2 = scale * (a_fin * a_fin * g[0] + 2.0 * a_fin * g[1] + g[2])
        return m0, m1, m2


@dataclass(frozen=True)
class Lognormal(Distribution):
    mu: float = 0.0
    sigma: float = 1.0
    kind = "lognormal"

    def __post_init__(self):
        self._coerce("mu", "sigma")
        check_finite(self.mu, "mu")
        check_positive(self.sigma, "sigma")

    @property
    def support(self):
        return (0.0, math.inf)

    def moments(self):
        s2 = self.sigma**2
        mean = math.exp(self.mu + 0.5 * s2)
        return (mean, mean * math.sqrt(math.expm1(s2)))

    def _z(self, x):
        with np.errstate(divide="ignore"):
            return (np.log(np.maximum(x, 0.0)) - self.mu) / self.sigma

    def _pdf(self, x):
        pos = x > 0.0
        xs = np.where(pos, x, 1.0)
        z = (np.log(xs) - self.mu) / self.sigma
        return np.where(pos, np.exp(-0.5 * z * z) / (xs * self.sigma * _SQRT_2PI), 0.0)

    def _cdf(self, x):
        return ndtr(self._z(x))

    def _sf(self, x):
        return ndtr(-self._z(x))

    def _ppf(self, u):
        return np.exp(self.mu + self.sigma * ndtri(u))

    def partial_moments(self, lo, hi):
        za = self._z(np.atleast_1d(np.asarray(lo, dtype=float)))
        zb = self._z(np.atleast_1d(np.asarray(hi, dtype=float)))
        za, zb = np.broadcast_arrays(za, zb)
        out = []
        for k in range(3):
            shift = k * self.sigma
            a, b = za - shift, zb - shift
            mass = np.where(a > 0, ndtr(-a) - ndtr(-b), ndtr(b) - ndtr(a))
            out.append(math.exp(k * self.mu + 0.5 * k * k * self.sigma**2) * mass)
        return tuple(out)


_KINDS = {
    "normal": Normal,
    "gaussian": Normal,
    "uniform": Uniform,
    "exp": Exponential,
    "exponential": Exponential,
    "lognormal": Lognormal,
}


def from_spec(kind, *params):
    """Build a distribution from a family name and numeric parameters.

    >>> from_spec("normal", 0, 2)
    Normal(mu=0.0, sigma=2.0)
    """
    try:
        cls = _KINDS[kind.lower()]
    except KeyError:
        raise DomainError(f"unknown distribution {kind!r}; expected one of {sorted(_KINDS)}") from None
    n_expected = len(cls.__dataclass_fields__)
    if len(params) != n_expected:
        raise DomainError(f"{kind} takes {n_expected} parameter(s), got {len(params)}")
    return cls(*(float(p) for p in params))


# Functional aliases mirroring the method API.

def pdf(d: Distribution, x):
    return d.pdf(x)


def cdf(d: Distribution, x):
    return d.cdf(x)


def quantile(d: Distribution, u):
    return d.quantile(u)


def sample(d: Distribution, rng, n):
    return d.sample(rng, n)


def moments(d: Distribution):
    return d.moments()
