"""Per-coordinate transforms onto the unit interval (copula domain)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr
from scipy.stats import rankdata

from .errors import ConfigError, DegenerateColumn, SampleTooSmall
from .ingest import SampleMatrix

# keeps CDF outputs strictly inside (0, 1)
CDF_EPS = 2.0**-52


@dataclass(frozen=True)
class NormalizedSample:
    """``n x d`` matrix with every entry in the open interval (0, 1)."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise ValueError("normalized sample must be 2-D")
        if not np.all((values > 0.0) & (values < 1.0)):
            raise ValueError("normalized values must lie in (0, 1)")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class CdfSpec:
    """Per-column Gaussian parameters for :func:`cdf_normalize`."""

    mu: tuple
    sigma: tuple
    family: str = "gaussian"

    def __post_init__(self):
        mu = tuple(float(v) for v in np.atleast_1d(self.mu))
        sigma = tuple(float(v) for v in np.atleast_1d(self.sigma))
        if len(mu) != len(sigma):
            raise ConfigError("mu and sigma must have the same length")
        if self.family != "gaussian":
            raise ConfigError(f"unsupported family {self.family!r}")
        if any(not s > 0 for s in sigma):
            raise ConfigError("sigma must be positive for every column")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)


def _values(sample) -> np.ndarray:
    if isinstance(sample, SampleMatrix):
        return sample.values
    values = np.asarray(sample, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    return values


def edf_normalize(sample) -> NormalizedSample:
    """Replace each value by ``(i - 1/2) / n`` where ``i`` is its rank in its column.

    Ties get the average of the ranks they span, so a tie group keeps the
    mean of the positions it occupies.
    """
    values = _values(sample)
    n = values.shape[0]
    if n < 2:
        raise SampleTooSmall(f"EDF normalization needs n >= 2, got {n}")
    ranks = rankdata(values, method="average", axis=0)
    return NormalizedSample((ranks - 0.5) / n)


def cdf_normalize(sample, spec: CdfSpec) -> NormalizedSample:
    """Map ``x`` to ``Phi((x - mu) / sigma)`` per column, clamped to ``[eps, 1 - eps]``."""
    values = _values(sample)
    if len(spec.mu) != values.shape[1]:
        raise ConfigError(f"spec covers {len(spec.mu)} columns, sample has {values.shape[1]}")
    mu = np.asarray(spec.mu)
    sigma = np.asarray(spec.sigma)
    u = ndtr((values - mu) / sigma)
    return NormalizedSample(np.clip(u, CDF_EPS, 1.0 - CDF_EPS))


def fit_gaussian_params(sample) -> CdfSpec:
    """Column means and standard deviations (divisor ``n - 1``)."""
    values = _values(sample)
    if values.shape[0] < 2:
        raise SampleTooSmall("need at least two rows to estimate a standard deviation")
    mu = values.mean(axis=0)
    sigma = values.std(axis=0, ddof=1)
    for col, s in enumerate(sigma):
        if not s > 0:
            raise DegenerateColumn(f"column {col} has zero variance")
    return CdfSpec(tuple(mu), tuple(sigma))
