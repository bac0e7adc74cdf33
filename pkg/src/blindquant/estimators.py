"""scikit-learn style wrappers around the functional core.

Each transformer works column-wise on 2-D arrays.  Hyper-parameters are
stored verbatim by ``__init__``; fitted state ends in an underscore.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .dist import Distribution, Normal, Uniform
from .fold import FoldParams, fold
from .quant import compander, lloyd_max, quantize, uniform_quantizer
from .signal import unfold


def _as_2d(X):
    return check_array(X, dtype=np.float64, ensure_all_finite=True)


class ModuloFolder(BaseEstimator, TransformerMixin):
    """Scale by ``gain`` and fold into ``[-half_range, half_range)``.

    ``inverse_transform`` unfolds every column as an oversampled sequence
    and divides by the gain, so it only recovers data that was sampled
    finely enough for difference-based unfolding; the result is exact up to
    one multiple of ``2 * half_range / gain`` per column.
    """

    def __init__(self, gain=1.0, half_range=1.0, order=2, oversampling=None):
        self.gain = gain
        self.half_range = half_range
        self.order = order
        self.oversampling = oversampling

    def fit(self, X, y=None):
        X = _as_2d(X)
        self.params_ = FoldParams(self.gain, self.half_range)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        return fold(_as_2d(X), self.params_)

    def inverse_transform(self, X):
        check_is_fitted(self, "params_")
        X = _as_2d(X)
        cols = [unfold(col, self.half_range, self.order, self.oversampling) for col in X.T]
        return np.column_stack(cols) / self.gain


class UniformQuantizer(BaseEstimator, TransformerMixin):
    """Uniform ``n_levels`` quantizer on ``[lo, hi]`` with saturation."""

    def __init__(self, n_levels=256, lo=-1.0, hi=1.0):
        self.n_levels = n_levels
        self.lo = lo
        self.hi = hi

    def fit(self, X=None, y=None):
        self.quantizer_ = uniform_quantizer(self.n_levels, self.lo, self.hi)
        if X is not None:
            self.n_features_in_ = _as_2d(X).shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "quantizer_")
        return quantize(self.quantizer_, _as_2d(X))


class LloydMaxQuantizer(BaseEstimator, TransformerMixin):
    """MSE-optimal quantizer for a source distribution.

    With ``distribution=None`` a normal law is matched to the pooled mean
    and standard deviation of the training data.
    """

    def __init__(self, n_levels=256, lo=-5.0, hi=5.0, distribution: Distribution | None = None,
                 tol=1e-9, max_iter=100_000):
        self.n_levels = n_levels
        self.lo = lo
        self.hi = hi
        self.distribution = distribution
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X=None, y=None):
        d = self.distribution
        if d is None:
            if X is None:
                raise ValueError("either X or distribution is required")
            data = _as_2d(X)
            self.n_features_in_ = data.shape[1]
            d = Normal(float(data.mean()), float(data.std()))
        self.distribution_ = d
        self.quantizer_, self.info_ = lloyd_max(d, self.n_levels, self.lo, self.hi, self.tol,
                                                 self.max_iter, return_info=True)
        self.n_iter_ = self.info_.n_iter
        return self

    def transform(self, X):
        check_is_fitted(self, "quantizer_")
        return quantize(self.quantizer_, _as_2d(X))


class InverseQuantileCompander(BaseEstimator, TransformerMixin):
    """Map data through ``target.quantile(source.cdf(x))``.

    The default target is the uniform law on ``[-1, 1]``; ``source`` defaults
    to a normal law fitted to the training data.
    """

    def __init__(self, source: Distribution | None = None, target: Distribution | None = None):
        self.source = source
        self.target = target

    def fit(self, X=None, y=None):
        src = self.source
        if src is None:
            if X is None:
                raise ValueError("either X or source is required")
            data = _as_2d(X)
            src = Normal(float(data.mean()), float(data.std()))
        self.source_ = src
        self.target_ = self.target if self.target is not None else Uniform(-1.0, 1.0)
        return self

    def transform(self, X):
        check_is_fitted(self, "source_")
        return compander(_as_2d(X), self.source_, self.target_)

    def inverse_transform(self, X):
        check_is_fitted(self, "source_")
        return compander(_as_2d(X), self.target_, self.source_)


class BlindAdaptiveQuantizer(BaseEstimator, TransformerMixin):
    """Fold with gain ``gain`` then quantize uniformly on ``[-half_range, half_range]``.

    No source statistics are learned, which is the point: the fold makes
    the quantizer input close to uniform whatever the input law.
    ``inverse_transform`` unfolds the codes and rescales.
    """

    def __init__(self, gain=4.0, half_range=1.0, n_levels=256, order=2, oversampling=None):
        self.gain = gain
        self.half_range = half_range
        self.n_levels = n_levels
        self.order = order
        self.oversampling = oversampling

    def fit(self, X=None, y=None):
        self.params_ = FoldParams(self.gain, self.half_range)
        self.quantizer_ = uniform_quantizer(self.n_levels, -self.half_range, self.half_range)
        if X is not None:
            self.n_features_in_ = _as_2d(X).shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "quantizer_")
        return quantize(self.quantizer_, fold(_as_2d(X), self.params_))

    def inverse_transform(self, X):
        check_is_fitted(self, "quantizer_")
        X = _as_2d(X)
        cols = [unfold(col, self.half_range, self.order, self.oversampling) for col in X.T]
        return np.column_stack(cols) / self.gain
