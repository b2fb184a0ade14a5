"""HSIC baseline: Gaussian Gram matrices, the biased V-statistic and its calibrations.

Everything here is ``O(n^2)`` in time and memory.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from scipy.spatial.distance import pdist, squareform

from .errors import ConfigError, DegenerateSample, DimError
from .ingest import PairedSample, SampleMatrix
from .parallel import parallel_map

EXPONENTS = ("squared", "linear")


@dataclass(frozen=True)
class KernelMatrix:
    k: np.ndarray
    sigma: float

    @property
    def n(self) -> int:
        return self.k.shape[0]


@dataclass
class HsicResult:
    statistic: float
    p_value: float
    calibration: str
    sigma_x: float
    sigma_y: float
    alpha: float = 0.05
    meta: dict = field(default_factory=dict)

    @property
    def reject(self) -> bool:
        return bool(self.p_value < self.alpha)

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "p_value": self.p_value,
            "calibration": self.calibration,
            "sigma_x": self.sigma_x,
            "sigma_y": self.sigma_y,
            "alpha": self.alpha,
            "reject": self.reject,
            "meta": self.meta,
        }


def _points(sample) -> np.ndarray:
    x = np.asarray(getattr(sample, "values", sample), dtype=float)
    return x[:, None] if x.ndim == 1 else x


def median_heuristic(sample) -> float:
    """Median of the nonzero pairwise Euclidean distances."""
    x = _points(sample)
    if x.shape[0] < 2:
        raise ConfigError("median heuristic needs n >= 2")
    d = pdist(x)
    d = d[d > 0]
    if d.size == 0:
        raise DegenerateSample("all points coincide")
    return float(np.median(d))


def gaussian_kernel(sample, sigma: float, exponent: str = "squared") -> KernelMatrix:
    """``K_ij = exp(-||x_i - x_j||^2 / (2 sigma^2))``.

    ``exponent="linear"`` uses the unsquared distance in the numerator.
    """
    if not sigma > 0:
        raise ConfigError(f"bandwidth must be positive, got {sigma}")
    if exponent not in EXPONENTS:
        raise ConfigError(f"unknown kernel exponent {exponent!r}")
    x = _points(sample)
    d = pdist(x, "sqeuclidean" if exponent == "squared" else "euclidean")
    k = squareform(np.exp(-d / (2.0 * sigma * sigma)))
    np.fill_diagonal(k, 1.0)
    return KernelMatrix(k, float(sigma))


def _raw(k):
    return k.k if isinstance(k, KernelMatrix) else np.asarray(k, dtype=float)


def double_center(k: np.ndarray) -> np.ndarray:
    """``H K H`` without forming ``H``."""
    col = k.mean(axis=0)
    row = k.mean(axis=1)
    return k - col[None, :] - row[:, None] + k.mean()


def hsic_vstat(k, l) -> float:
    """``Tr(K H L H) / n^2`` computed as ``sum((H K H) * L) / n^2``."""
    k = _raw(k)
    l = _raw(l)
    if k.shape != l.shape or k.shape[0] != k.shape[1]:
        raise DimError(f"kernel matrices must be square and equal in size, got {k.shape} and {l.shape}")
    n = k.shape[0]
    return float(np.vdot(double_center(k), l)) / (n * n)


def _bandwidths(pair: PairedSample, bandwidth):
    if bandwidth == "median":
        return median_heuristic(pair.x), median_heuristic(pair.y)
    if bandwidth == "median_x2":
        return 2.0 * median_heuristic(pair.x), 2.0 * median_heuristic(pair.y)
    if isinstance(bandwidth, (tuple, list)) and len(bandwidth) == 2:
        sx, sy = float(bandwidth[0]), float(bandwidth[1])
        if not (sx > 0 and sy > 0):
            raise ConfigError("fixed bandwidths must be positive")
        return sx, sy
    raise ConfigError(f"bandwidth must be 'median', 'median_x2' or (sigma_x, sigma_y), got {bandwidth!r}")


def _permuted_traces(kc32, l32, seed, count, threads):
    # float32 halves memory traffic of the n^2 gathers; used only for null draws
    def one(rng):
        p = rng.permutation(l32.shape[0])
        return float(np.einsum("ij,ij->", kc32, l32.take(p, axis=0).take(p, axis=1)))

    rngs = [np.random.default_rng([seed, b]) for b in range(count)]
    return np.array(parallel_map(one, rngs, threads))


def _prepare(pair, bandwidth, exponent):
    if not isinstance(pair, PairedSample):
        raise ConfigError("expected a PairedSample")
    sx, sy = _bandwidths(pair, bandwidth)
    k = gaussian_kernel(pair.x, sx, exponent)
    l = gaussian_kernel(pair.y, sy, exponent)
    return sx, sy, double_center(k.k), l.k


def hsic_gamma_test(pair: PairedSample, alpha: float = 0.05, bandwidth="median", n_null: int = 200,
                    seed: int = 0, exponent: str = "squared", threads: int = 1) -> HsicResult:
    """Gamma-approximated HSIC test.

    The null mean ``E`` and variance ``V`` of the V-statistic are estimated
    from ``n_null`` permutations of ``y``; ``n * HSIC`` is then compared with a
    gamma law of shape ``E^2 / V`` and scale ``n V / E``.
    """
    n = pair.n
    if n < 20:
        raise ConfigError(f"gamma approximation needs n >= 20, got {n}")
    if n_null < 2:
        raise ConfigError("need at least two null permutations")
    sx, sy, kc, l = _prepare(pair, bandwidth, exponent)
    stat = float(np.vdot(kc, l)) / (n * n)
    null = _permuted_traces(kc.astype(np.float32), l.astype(np.float32), seed, n_null, threads) / (n * n)
    mean = float(null.mean())
    var = float(null.var(ddof=1))
    shape = mean * mean / var
    scale = n * var / mean
    p = float(stats.gamma.sf(n * stat, shape, scale=scale))
    meta = {"gamma_shape": shape, "gamma_scale": scale, "null_mean": mean, "null_var": var,
            "n_null": n_null, "seed": seed, "bandwidth": bandwidth if isinstance(bandwidth, str) else "fixed",
            "exponent": exponent}
    return HsicResult(stat, p, "gamma", sx, sy, alpha, meta)


def hsic_permutation_test(pair: PairedSample, alpha: float = 0.05, B: int = 400, seed: int = 0,
                          bandwidth="median", exponent: str = "squared", threads: int = 1) -> HsicResult:
    """Permutation HSIC test with add-one p-value ``(1 + #{null >= observed}) / (B + 1)``."""
    if B < 100:
        raise ConfigError(f"need at least 100 permutations, got {B}")
    n = pair.n
    sx, sy, kc, l = _prepare(pair, bandwidth, exponent)
    kc32 = kc.astype(np.float32)
    l32 = l.astype(np.float32)
    # observed value evaluated at the same precision as the null draws
    observed32 = float(np.einsum("ij,ij->", kc32, l32))
    null = _permuted_traces(kc32, l32, seed, B, threads)
    p = (1.0 + np.count_nonzero(null >= observed32)) / (B + 1.0)
    stat = float(np.vdot(kc, l)) / (n * n)
    meta = {"B_perm": B, "seed": seed, "bandwidth": bandwidth if isinstance(bandwidth, str) else "fixed",
            "exponent": exponent}
    return HsicResult(stat, float(p), "permutation", sx, sy, alpha, meta)
