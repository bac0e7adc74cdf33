"""Scalar quantizers, Lloyd-Max design and distortion measures.

A :class:`Quantizer` has ``N`` cells delimited by ``N + 1`` increasing
boundaries and one representation level per cell.  Cell ``i`` is the
half-open interval ``(c[i-1], c[i]]`` and inputs beyond the outer boundaries
saturate to the first or last level.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from sklearn.exceptions import ConvergenceWarning

from ._validation import (
    as_float_array,
    check_count,
    check_interval,
    check_positive,
    scalar_or_array,
)
from .dist import Distribution
from .exceptions import DomainError, QuadratureError


@dataclass(frozen=True, eq=False)
class Quantizer:
    boundaries: np.ndarray
    levels: np.ndarray

    def __post_init__(self):
        c = np.array(self.boundaries, dtype=float)
        b = np.array(self.levels, dtype=float)
        if c.ndim != 1 or b.ndim != 1 or c.size != b.size + 1 or b.size < 1:
            raise DomainError("need N >= 1 levels and N + 1 boundaries")
        if not np.all(np.isfinite(c)) or not np.all(np.isfinite(b)):
            raise DomainError("boundaries and levels must be finite")
        if np.any(np.diff(c) <= 0):
            raise DomainError("boundaries must be strictly increasing")
        # first level may sit on c[0]; every other level must be inside its cell
        inside = (b > c[:-1]) & (b <= c[1:])
        inside[0] = c[0] <= b[0] <= c[1]
        if not inside.all():
            raise DomainError("each level must lie inside its own cell")
        c.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "boundaries", c)
        object.__setattr__(self, "levels", b)

    @property
    def n_levels(self) -> int:
        return self.levels.size

    @property
    def steps(self) -> np.ndarray:
        return np.diff(self.boundaries)

    def cell_index(self, x):
        """0-based cell index of each input, saturating at both ends."""
        return np.searchsorted(self.boundaries[1:-1], x, side="left")

    def __call__(self, x):
        return quantize(self, x)

    def __eq__(self, other):
        if not isinstance(other, Quantizer):
            return NotImplemented
        return np.array_equal(self.boundaries, other.boundaries) and np.array_equal(
            self.levels, other.levels
        )

    __hash__ = None


def uniform_quantizer(n_levels, lo, hi) -> Quantizer:
    """``n_levels`` equal cells on ``[lo, hi]`` with midpoint levels."""
    n = check_count(n_levels, "n_levels")
    lo, hi = check_interval(lo, hi)
    c = lo + (hi - lo) * np.arange(n + 1) / n
    c[-1] = hi
    return Quantizer(c, 0.5 * (c[:-1] + c[1:]))


def quantize(q: Quantizer, x):
    x = as_float_array(x)
    return scalar_or_array(q.levels[q.cell_index(x)], x)


def nmse(signal, q: Quantizer) -> float:
    """Quantization error energy over signal energy."""
    x = as_float_array(signal, "signal", allow_empty=False).ravel()
    energy = float(np.dot(x, x))
    if energy == 0.0:
        raise DomainError("signal has zero energy")
    err = x - q.levels[q.cell_index(x)]
    return float(np.dot(err, err)) / energy


def to_db(value):
    """``10 log10(value)``."""
    return 10.0 * np.log10(value)


# -- distortion ------------------------------------------------------------------

def _cell_edges(q: Quantizer):
    """Cell edges with the saturation tails folded into the end cells."""
    edges = q.boundaries.copy()
    edges[0], edges[-1] = -np.inf, np.inf
    return edges


def expected_distortion(q: Quantizer, d: Distribution, r=2, *, epsabs=1e-14, epsrel=1e-10) -> float:
    """``E|X - Q(X)|^r`` by adaptive quadrature over each cell and both tails."""
    r = check_count(r, "r")
    edges = _cell_edges(q)
    s_lo, s_hi = d.support
    total = 0.0
    for i, level in enumerate(q.levels):
        a, b = max(edges[i], s_lo), min(edges[i + 1], s_hi)
        if not b > a:
            continue
        val, err = integrate.quad(
            lambda u: abs(u - level) ** r * d._pdf(np.array(u)),
            a, b, epsabs=epsabs, epsrel=epsrel, limit=200,
        )
        if not math.isfinite(val) or err > max(1e3 * epsabs, 1e-6 * abs(val)):
            raise QuadratureError(f"cell {i} on [{a}, {b}]: estimate {val}, error {err}")
        total += val
    return total


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def _cell_mse(d: Distribution, c, b, moments):
    """Total squared error of the saturating quantizer ``(c, b)`` under ``d``.

    Cells whose overlap with the support is bounded are integrated in centred
    form with Gauss-Legendre, which avoids the cancellation of the moment
    identity on narrow cells; unbounded end cells use the partial moments.
    """
    m0, m1, m2 = moments
    s_lo, s_hi = d.support
    edges = c.copy()
    edges[0], edges[-1] = -np.inf, np.inf
    lo = np.maximum(edges[:-1], s_lo)
    hi = np.minimum(edges[1:], s_hi)
    bounded = np.isfinite(lo) & np.isfinite(hi)
    total = float(np.sum((m2 - 2.0 * b * m1 + b * b * m0)[~bounded]))
    lo, hi, lv = lo[bounded], hi[bounded], b[bounded]
    width = np.maximum(hi - lo, 0.0)
    u = 0.5 * (lo + hi)[:, None] + 0.5 * width[:, None] * _GL_NODES[None, :]
    err = u - lv[:, None]
    total += float(np.sum(0.5 * width * ((err * err * d._pdf(u)) @ _GL_WEIGHTS)))
    return total


def _companded_boundaries(d: Distribution, n, lo, hi):
    """Boundaries equally spaced in the point density ``pdf ** (1/3)``."""
    grid = np.linspace(lo, hi, 20001)
    dens = np.cbrt(d._pdf(grid))
    dens = dens + 1e-6 * max(dens.max(), 1e-300)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(grid))])
    targets = cum[-1] * np.arange(1, n) / n
    inner = np.interp(targets, cum, grid)
    return np.concatenate([[lo], inner, [hi]])


@dataclass
class LloydMaxInfo:
    n_iter: int
    converged: bool
    distortion_history: list


def lloyd_max(d: Distribution, n_levels, lo, hi, tol=1e-9, max_iter=100_000, *,
              init=None, return_info=False):
    """Design an MSE quantizer for ``d`` by Lloyd iteration.

    The outer boundaries stay at ``lo`` and ``hi``; probability mass beyond
    them belongs to the end cells, matching the saturating quantizer.  Each
    iteration moves every level to the conditional mean of its cell (clamped
    into the cell; empty cells take the midpoint) and then every interior
    boundary to the midpoint of its neighbouring levels.  Iteration stops when
    the largest level movement falls below ``tol``.

    Boundaries start equally spaced in ``pdf ** (1/3)`` unless ``init`` gives
    the ``n_levels + 1`` boundaries.  A ``ConvergenceWarning`` is issued when
    ``max_iter`` is exhausted.
    """
    n = check_count(n_levels, "n_levels")
    lo, hi = check_interval(lo, hi)
    tol = check_positive(tol, "tol")
    max_iter = check_count(max_iter, "max_iter")
    if init is None:
        c = _companded_boundaries(d, n, lo, hi)
    else:
        c = np.array(init, dtype=float)
        if c.shape != (n + 1,) or c[0] != lo or c[-1] != hi:
            raise DomainError("init must hold n_levels + 1 boundaries from lo to hi")

    def centroids(c):
        edges = c.copy()
        edges[0], edges[-1] = -np.inf, np.inf
        m0, m1, m2 = d.partial_moments(edges[:-1], edges[1:])
        with np.errstate(invalid="ignore", divide="ignore"):
            b = np.where(m0 > 0, m1 / m0, 0.5 * (c[:-1] + c[1:]))
        b = np.clip(b, c[:-1], c[1:])
        # interior cells exclude their left edge
        b[1:] = np.maximum(b[1:], np.nextafter(c[1:-1], np.inf))
        return b, (m0, m1, m2)

    b, moments = centroids(c)
    history = [_cell_mse(d, c, b, moments)]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        c_new = c.copy()
        c_new[1:-1] = 0.5 * (b[:-1] + b[1:])
        b_new, moments = centroids(c_new)
        history.append(_cell_mse(d, c_new, b_new, moments))
        shift = float(np.max(np.abs(b_new - b)))
        c, b = c_new, b_new
        if shift < tol:
            converged = True
            break
    if not converged:
        warnings.warn(
            f"Lloyd-Max did not converge in {max_iter} iterations", ConvergenceWarning, stacklevel=2
        )

    m0 = moments[0]
    empty = np.flatnonzero(m0 <= 0)
    if empty.size:
        c, b = _spread_empty_cells(c, b, empty)
    q = Quantizer(c, b)
    if return_info:
        return q, LloydMaxInfo(n_iter=it, converged=converged, distortion_history=history)
    return q


def _spread_empty_cells(c, b, empty):
    """Respace each run of zero-mass cells uniformly across its span."""
    c, b = c.copy(), b.copy()
    runs = np.split(empty, np.flatnonzero(np.diff(empty) > 1) + 1)
    for run in runs:
        first, last = run[0], run[-1]
        span = np.linspace(c[first], c[last + 1], run.size + 1)
        c[first:last + 2] = span
        b[first:last + 1] = 0.5 * (span[:-1] + span[1:])
    return c, b


# -- bounds -------------------------------------------------------------------------

def mismatch_bound(distortion_matched, distance, r=2) -> float:
    """Upper bound ``(E_Y^(1/r) + W_r)^r`` on the mismatched distortion."""
    r = check_count(r, "r")
    if distortion_matched < 0 or distance < 0:
        raise DomainError("distortion and distance must be non-negative")
    return (distortion_matched ** (1.0 / r) + distance) ** r


def gaussian_uniform_bound(sigma, n_levels) -> float:
    """Distortion bound for ``N(0, sigma)`` under the ``n_levels`` uniform
    quantizer on ``[-1/2, 1/2]``.

    ``sigma**2 + 1/12 - sigma/sqrt(pi)`` enters as the squared transport
    distance to ``U[-1/2, 1/2]``.
    """
    sigma = check_positive(sigma, "sigma")
    n = check_count(n_levels, "n_levels")
    w2_sq = sigma * sigma + 1.0 / 12.0 - sigma / math.sqrt(math.pi)
    # minimum over sigma is 1/12 - 1/(4 pi) > 0
    if w2_sq < 0:
        raise DomainError(f"negative squared distance {w2_sq}")
    return w2_sq + 1.0 / (12.0 * n * n) + 2.0 * math.sqrt(w2_sq) / (n * math.sqrt(12.0))


def compander(x, source: Distribution, target: Distribution):
    """Map ``x`` through ``target.quantile(source.cdf(x))``.

    Probabilities are clipped into the open unit interval so points in the
    far tails land on the extreme representable target quantiles.
    """
    x = as_float_array(x)
    u = source._cdf(x)
    u = np.clip(u, np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0))
    return scalar_or_array(target._ppf(u), x)
