"""Experiment configuration: defaults, flat ``key = value`` files, overrides."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

OUT_ENV = "BLINDQUANT_OUT"

_FIG_A_GRID = (1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0)


class ConfigError(ValueError):
    """Bad configuration file or option value."""


@dataclass
class ExperimentConfig:
    seed: int = 0
    n_samples: int = 1_000_000
    chunk_size: int = 1 << 18
    levels: int = 256
    range: tuple = (-5.0, 5.0)
    lam: float = 1.0
    a_grid: tuple = _FIG_A_GRID
    sigma_grid: tuple = (0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0)
    mu_grid: tuple = (-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0)
    theta_points: int = 400
    base: str = "normal 0 1"
    tol: float = 1e-13
    lloyd_tol: float = 1e-9
    lloyd_max_iter: int = 100_000
    # pipeline
    gain: float = 4.0
    coef_sigma: float = 2.0
    oversampling: float = 16.0
    order: int = 2
    n_anchors: int = 64
    n_seeds: int = 20
    out: str = field(default_factory=lambda: os.environ.get(OUT_ENV, "results"))

    def validate(self):
        for name in ("n_samples", "chunk_size", "levels", "theta_points", "order", "n_anchors",
                     "n_seeds", "lloyd_max_iter"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        lo, hi = self.range
        if not lo < hi:
            raise ConfigError("range needs lo < hi")
        for name in ("lam", "tol", "lloyd_tol", "gain", "coef_sigma", "oversampling"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("a_grid", "sigma_grid", "mu_grid"):
            grid = getattr(self, name)
            if not grid:
                raise ConfigError(f"{name} must be non-empty")
        if any(a <= 0 for a in self.a_grid) or any(s <= 0 for s in self.sigma_grid):
            raise ConfigError("a_grid and sigma_grid entries must be positive")
        return self

    def as_dict(self):
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d


_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _coerce(key, raw):
    if key not in _TYPES:
        raise ConfigError(f"unknown config key {key!r}")
    kind = _TYPES[key]
    try:
        if kind == "int":
            return int(float(raw)) if isinstance(raw, str) else int(raw)
        if kind == "float":
            return float(raw)
        if kind == "tuple":
            items = raw.replace(",", " ").split() if isinstance(raw, str) else raw
            return tuple(float(v) for v in items)
        return str(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment, lists are comma or space separated."""
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        values[key] = _coerce(key, raw)
    return values


def build_config(file_values=None, overrides=None) -> ExperimentConfig:
    """Defaults, then file values, then overrides (``None`` entries skipped)."""
    cfg = ExperimentConfig()
    for source in (file_values or {}, overrides or {}):
        for key, raw in source.items():
            if raw is not None:
                setattr(cfg, key, _coerce(key, raw))
    return cfg.validate()
