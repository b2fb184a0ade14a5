"""SVD of the score matrix and an empirical singular-value null.

Asymptotic Marchenko-Pastur bounds are poor for matrices as small as 4x4,
so significance is judged against singular values simulated from N(0, 1)
matrices of the same shape.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class SvdDecomposition:
    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    @property
    def shape(self):
        return self.u.shape[0], self.v.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.sigma) @ self.v.T


@dataclass(frozen=True)
class SingularNull:
    """``trials x min(p, q)`` sorted singular values of random N(0, 1) matrices."""

    shape: tuple
    trials: int
    seed: int
    sorted_samples: np.ndarray

    def save(self, path) -> None:
        """Write to ``.npz`` (binary) or ``.json`` according to the suffix."""
        path = Path(path)
        if path.suffix == ".json":
            path.write_text(json.dumps({
                "shape": list(self.shape),
                "trials": self.trials,
                "seed": self.seed,
                "sorted_samples": self.sorted_samples.tolist(),
            }))
        else:
            np.savez_compressed(path, shape=np.array(self.shape), trials=self.trials, seed=self.seed,
                                sorted_samples=self.sorted_samples)

    @classmethod
    def load(cls, path) -> "SingularNull":
        path = Path(path)
        if path.suffix == ".json":
            d = json.loads(path.read_text())
            return cls(tuple(d["shape"]), int(d["trials"]), int(d["seed"]), np.asarray(d["sorted_samples"]))
        with np.load(path) as d:
            return cls(tuple(int(s) for s in d["shape"]), int(d["trials"]), int(d["seed"]), d["sorted_samples"])


def svd_coefficients(z) -> SvdDecomposition:
    """Thin SVD with each ``u`` column's largest-magnitude entry made positive."""
    z = np.asarray(getattr(z, "z", z), dtype=float)
    if z.ndim != 2 or min(z.shape) < 1:
        raise ConfigError("svd_coefficients needs a non-empty 2-D matrix")
    if not np.all(np.isfinite(z)):
        raise ValueError("score matrix contains non-finite entries")
    u, s, vt = np.linalg.svd(z, full_matrices=False)
    v = vt.T
    idx = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[idx, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return SvdDecomposition(u * signs, s, v * signs)


def simulate_singular_null(p: int, q: int, trials: int = 100_000, seed: int = 0,
                           chunk: int = 50_000) -> SingularNull:
    """Sorted singular values of ``trials`` independent ``p x q`` N(0, 1) matrices."""
    if trials < 1000:
        raise ConfigError(f"need at least 1000 trials, got {trials}")
    if p < 1 or q < 1:
        raise ConfigError("matrix shape must be positive")
    rng = np.random.default_rng(seed)
    parts = []
    done = 0
    while done < trials:
        c = min(chunk, trials - done)
        parts.append(np.linalg.svd(rng.standard_normal((c, p, q)), compute_uv=False))
        done += c
    return SingularNull((p, q), trials, seed, np.concatenate(parts))


def svd_significance(decomp: SvdDecomposition, null: SingularNull, alpha: float = 0.01):
    """Ranks whose singular value beats the matching null order statistic.

    Returns ``(rank, sigma, p)`` for every rank with ``p < alpha``, where
    ``p = (1 + #{null_i >= sigma_i}) / (trials + 1)``; ranks are 1-based.
    """
    if tuple(null.shape) != tuple(decomp.shape):
        raise ConfigError(f"null shape {tuple(null.shape)} does not match decomposition shape {decomp.shape}")
    out = []
    for i, s in enumerate(decomp.sigma):
        p = (1.0 + np.count_nonzero(null.sorted_samples[:, i] >= s)) / (null.trials + 1.0)
        if p < alpha:
            out.append((i + 1, float(s), float(p)))
    return out


def svd_pvalues(decomp: SvdDecomposition, null: SingularNull) -> np.ndarray:
    """Per-rank p-values without thresholding."""
    if tuple(null.shape) != tuple(decomp.shape):
        raise ConfigError("null shape does not match decomposition shape")
    return np.array([
        (1.0 + np.count_nonzero(null.sorted_samples[:, i] >= s)) / (null.trials + 1.0)
        for i, s in enumerate(decomp.sigma)
    ])
