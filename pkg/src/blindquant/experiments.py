"""Computations behind the CLI subcommands, free of any file handling."""

from __future__ import annotations

import math

import numpy as np

from ._rng import substream
from .config import ExperimentConfig
from .dist import Distribution, Exponential, Lognormal, Normal, Uniform, from_spec
from .exceptions import DomainError, UnfoldingError
from .fold import FoldedDistribution, FoldParams
from .metric import (
    w1_between,
    w1_folded_to_uniform,
    w2_between,
    w2_exponential,
    w2_exponential_tabulated,
    w2_gaussian,
    w2_uniform_exponential,
)
from .quant import expected_distortion, lloyd_max, quantize, to_db, uniform_quantizer
from .signal import generate_bandlimited, pipeline

# (family, parameter label, distribution, reference dB under Q_N, reference dB under Q_U).
# Exponential rows are labelled by their mean, so the rate is its reciprocal.
TABLE2_ROWS = (
    ("normal", "mu=0 sigma=1", Normal(0.0, 1.0), -43.9, -38.6),
    ("normal", "mu=0 sigma=0.5", Normal(0.0, 0.5), -39.8, -32.2),
    ("normal", "mu=0 sigma=2", Normal(0.0, 2.0), -23.3, -26.2),
    ("uniform", "a=-5 b=5", Uniform(-5.0, 5.0), -20.0, -48.1),
    ("uniform", "a=-3 b=3", Uniform(-3.0, 3.0), -44.8, -43.6),
    ("uniform", "a=-1 b=1", Uniform(-1.0, 1.0), -41.0, -33.7),
    ("exponential", "p=1", Exponential(1.0), -31.4, -21.8),
    ("exponential", "p=0.5", Exponential(2.0), -38.1, -34.5),
    ("exponential", "p=2", Exponential(0.5), -10.0, -10.9),
    ("lognormal", "mu=0 sigma=1", Lognormal(0.0, 1.0), -6.08, -6.43),
    ("lognormal", "mu=0 sigma=0.5", Lognormal(0.0, 0.5), -30.7, -32.5),
    ("lognormal", "mu=0 sigma=2", Lognormal(0.0, 2.0), -0.09, -0.09),
)


def _chunked_nmse(d: Distribution, quantizers, cfg: ExperimentConfig, row: int):
    """Monte Carlo NMSE of ``d`` under each quantizer, drawing chunk ``j`` of
    row ``row`` from substream ``(seed, row, j)`` and summing in chunk order."""
    err = np.zeros(len(quantizers))
    energy = 0.0
    n_chunks = -(-cfg.n_samples // cfg.chunk_size)
    for j in range(n_chunks):
        m = min(cfg.chunk_size, cfg.n_samples - j * cfg.chunk_size)
        x = d.sample(substream(cfg.seed, row, j), m)
        energy += float(np.dot(x, x))
        for i, q in enumerate(quantizers):
            e = x - quantize(q, x)
            err[i] += float(np.dot(e, e))
    return err / energy


def table2(cfg: ExperimentConfig):
    lo, hi = cfg.range
    q_n, info = lloyd_max(Normal(0.0, 1.0), cfg.levels, lo, hi, cfg.lloyd_tol, cfg.lloyd_max_iter,
                          return_info=True)
    q_u = uniform_quantizer(cfg.levels, lo, hi)
    rows = []
    for i, (family, label, d, ref_n, ref_u) in enumerate(TABLE2_ROWS):
        e_n, e_u = _chunked_nmse(d, (q_n, q_u), cfg, i)
        db_n, db_u = to_db(e_n), to_db(e_u)
        rows.append({
            "family": family, "parameters": label, "distribution": d.spec(),
            "nmse_db_qn": db_n, "reference_db_qn": ref_n, "delta_db_qn": db_n - ref_n,
            "nmse_db_qu": db_u, "reference_db_qu": ref_u, "delta_db_qu": db_u - ref_u,
        })
    meta = {"lloyd_iterations": info.n_iter, "lloyd_converged": info.converged,
            "lloyd_distortion": info.distortion_history[-1]}
    return rows, meta


def theta_grid(lam, n):
    """``n`` equally spaced points covering ``[-lam, lam)``."""
    return -lam + (2.0 * lam / n) * np.arange(n)


def fold_pdf(cfg: ExperimentConfig, base: Distribution | None = None):
    """Rows ``(a, theta, density)`` for each gain in the grid."""
    base = base if base is not None else from_spec(*cfg.base.split())
    theta = theta_grid(cfg.lam, cfg.theta_points)
    rows = []
    for a in cfg.a_grid:
        fd = FoldedDistribution(base, FoldParams(a, cfg.lam), cfg.tol)
        rows.extend(zip([a] * theta.size, theta.tolist(), fd.pdf(theta).tolist()))
    return rows


def w1_heatmaps(cfg: ExperimentConfig):
    """Distance of the folded Gaussian to the uniform law on ``[-lam, lam)``.

    Returns two row lists: varying ``sigma`` at ``mu = 0`` and varying ``mu``
    at ``sigma = 1``; each row is ``(value, [distance for a in a_grid])``.
    """
    def row(mu, sigma):
        return [w1_folded_to_uniform(Normal(mu, sigma), FoldParams(a, cfg.lam), cfg.tol)
                for a in cfg.a_grid]

    by_sigma = [(s, row(0.0, s)) for s in cfg.sigma_grid]
    by_mu = [(m, row(m, 1.0)) for m in cfg.mu_grid]
    return by_sigma, by_mu


def pipeline_runs(cfg: ExperimentConfig):
    """Fold/quantize/unfold versus direct quantization over ``n_seeds`` signals."""
    params = FoldParams(cfg.gain, cfg.lam)
    duration = (cfg.n_anchors - 1) * math.pi
    runs = []
    for k in range(cfg.n_seeds):
        s = generate_bandlimited(1.0, duration, rng=substream(cfg.seed, k),
                                 coefficient_dist=Normal(0.0, cfg.coef_sigma))
        rep = pipeline(s, params, cfg.levels, cfg.oversampling, cfg.order)
        runs.append({
            "index": k, "unfolded": rep.unfolded, "error": rep.error,
            "nmse_db_folded": to_db(rep.nmse_folded) if rep.unfolded else None,
            "nmse_db_direct": to_db(rep.nmse_direct),
            "offset_periods": rep.offset_periods,
        })
    ok = [r for r in runs if r["unfolded"]]
    folded = np.array([r["nmse_db_folded"] for r in ok])
    direct = np.array([r["nmse_db_direct"] for r in runs])
    summary = {
        "success_rate": len(ok) / len(runs),
        "folded_db_mean": float(folded.mean()) if ok else None,
        "folded_db_std": float(folded.std()) if ok else None,
        "direct_db_mean": float(direct.mean()),
        "direct_db_std": float(direct.std()),
        "folded_wins": sum(1 for r in ok if r["nmse_db_folded"] < r["nmse_db_direct"]),
    }
    return runs, summary


def parse_dist(text: str) -> Distribution:
    parts = text.replace(",", " ").split()
    if not parts:
        raise DomainError("empty distribution spec")
    return from_spec(parts[0], *parts[1:])


def closed_form_w2(x: Distribution, y: Distribution):
    """Return ``(value, note)`` for pairs with a known W2 formula, else ``(None, None)``."""
    if isinstance(x, Normal) and isinstance(y, Normal):
        return w2_gaussian(x.mu, x.sigma, y.mu, y.sigma), None
    if isinstance(x, Exponential) and isinstance(y, Exponential):
        tab = w2_exponential_tabulated(x.rate, y.rate)
        return w2_exponential(x.rate, y.rate), f"tabulated form without sqrt(2) gives {tab!r}"
    for u, e in ((x, y), (y, x)):
        if isinstance(u, Uniform) and isinstance(e, Exponential) and u.lo == 0.0:
            return w2_uniform_exponential(u.hi, e.rate), None
    return None, None


def wasserstein(x: Distribution, y: Distribution, order=2):
    if order not in (1, 2):
        raise DomainError("order must be 1 or 2")
    numeric = w2_between(x, y) if order == 2 else w1_between(x, y)
    closed, note = closed_form_w2(x, y) if order == 2 else (None, None)
    return {
        "x": x.spec(), "y": y.spec(), "order": order, "numeric": numeric,
        "closed_form": closed,
        "abs_difference": None if closed is None else abs(closed - numeric),
        "note": note,
    }


def lloyd(cfg: ExperimentConfig, d: Distribution):
    lo, hi = cfg.range
    q, info = lloyd_max(d, cfg.levels, lo, hi, cfg.lloyd_tol, cfg.lloyd_max_iter, return_info=True)
    rows = [(i, float(q.boundaries[i]), float(q.boundaries[i + 1]), float(q.levels[i]))
            for i in range(q.n_levels)]
    meta = {"iterations": info.n_iter, "converged": info.converged,
            "distortion": expected_distortion(q, d)}
    return rows, meta
