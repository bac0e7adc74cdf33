"""Blind-adaptive quantization: modulo folding ahead of a uniform quantizer.

Submodules
----------
dist        amplitude distributions with exact cdf/quantile/partial moments
fold        the scale-and-fold transform and folded-distribution evaluation
quant       quantizers, Lloyd-Max design, distortion and mismatch bounds
metric      Wasserstein distances, numeric and closed form
signal      bandlimited signals, sampling, reconstruction, unfolding
estimators  scikit-learn style transformers over the above
"""

from .dist import Distribution, Exponential, Lognormal, Normal, Uniform, from_spec
from .exceptions import (
    DomainError,
    NumericalError,
    QuadratureError,
    TruncationError,
    UnfoldingError,
)
from .fold import (
    FoldedDistribution,
    FoldParams,
    fold,
    folded_cdf_exponential,
    folded_cdf_series,
    folded_pdf_gaussian,
    folded_pdf_series,
    folded_pdf_uniform,
)
from .metric import (
    CdfCurve,
    w1_folded_to_uniform,
    w1_numeric,
    w2_exponential,
    w2_exponential_tabulated,
    w2_gaussian,
    w2_numeric,
    w2_uniform_exponential,
)
from .quant import (
    Quantizer,
    compander,
    expected_distortion,
    gaussian_uniform_bound,
    lloyd_max,
    mismatch_bound,
    nmse,
    quantize,
    to_db,
    uniform_quantizer,
)
from .signal import (
    BandlimitedSignal,
    SampledSignal,
    generate_bandlimited,
    pipeline,
    sample_signal,
    sinc_reconstruct,
    unfold,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
