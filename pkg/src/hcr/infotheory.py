"""Entropy and mutual-information approximations from mixed moments (in nits)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coeffs import CoefficientTable


@dataclass(frozen=True)
class MiEstimate:
    raw: float
    corrected: float
    per_feature: np.ndarray

    def to_dict(self) -> dict:
        return {"raw": self.raw, "corrected": self.corrected, "per_feature": self.per_feature.tolist()}


def entropy_deficit(a) -> float:
    """Entropy relative to the uniform density: ``-sum a_j^2`` over nontrivial ``j``."""
    a = np.asarray(a, dtype=float)
    return -float(np.sum(a * a))


def _check_nontrivial(table: CoefficientTable):
    for basis in (table.bx, table.by):
        if any(not any(j) for j in basis.members):
            raise ValueError("coefficient table must exclude the all-zero multi-index")


def mi_raw(table: CoefficientTable) -> MiEstimate:
    """Sum of squared nontrivial mixed moments."""
    _check_nontrivial(table)
    sq = table.a * table.a
    raw = float(sq.sum())
    return MiEstimate(raw=raw, corrected=raw, per_feature=sq)


def mi_corrected(table: CoefficientTable) -> MiEstimate:
    """``sum (a^2 - v/n)``; the subtracted term removes the squared-mean bias.

    The corrected value is not clamped and can be negative under independence.
    """
    _check_nontrivial(table)
    sq = table.a * table.a
    corr = sq - table.v / table.n
    return MiEstimate(raw=float(sq.sum()), corrected=float(corr.sum()), per_feature=sq)


def feature_kernels(fx: np.ndarray, fy: np.ndarray):
    """``K^X = Xb Xb^T`` and ``K^Y = Yb Yb^T`` with ``Xb = fx / sqrt(n)``.

    ``trace(K^X K^Y)`` equals the raw MI proxy; materializes ``n x n``
    matrices, so only meant for small ``n``.
    """
    n = fx.shape[0]
    xb = fx / np.sqrt(n)
    yb = fy / np.sqrt(n)
    return xb @ xb.T, yb @ yb.T
