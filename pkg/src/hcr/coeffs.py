"""Mixed-moment coefficients between two normalized samples."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .basis import BasisIndexSet
from .errors import ConfigError, DegenerateFeature, DimError, PairingError

VARIANCE_RULES = ("unit", "empirical")


@dataclass(frozen=True)
class CoefficientTable:
    """Raw means ``a``, product variances ``v`` and scores ``z`` over ``B_x+ x B_y+``.

    ``z`` is ``None`` until :func:`normalize_scores` fills it.
    """

    a: np.ndarray
    v: np.ndarray
    n: int
    bx: BasisIndexSet
    by: BasisIndexSet
    z: np.ndarray = None
    variance_rule: str = None

    @property
    def shape(self):
        return self.a.shape

    @property
    def M(self) -> int:
        return self.a.size

    def pairs(self):
        """Index pairs ``(j, k)`` in row-major order, matching ``a.ravel()``."""
        return [(j, k) for j in self.bx.members for k in self.by.members]

    def to_dict(self) -> dict:
        out = {
            "bx": self.bx.to_list(),
            "by": self.by.to_list(),
            "n": int(self.n),
            "a": self.a.tolist(),
            "v": self.v.tolist(),
            "z": None if self.z is None else self.z.tolist(),
        }
        if self.variance_rule is not None:
            out["variance_rule"] = self.variance_rule
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _features(sample, basis: BasisIndexSet) -> np.ndarray:
    values = np.asarray(getattr(sample, "values", sample), dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if values.shape[1] != basis.dim:
        raise DimError(f"basis dimension {basis.dim} does not match sample dimension {values.shape[1]}")
    return basis.features(values)


def moments(fx: np.ndarray, fy: np.ndarray):
    """Means and population variances of all products ``fx[:, j] * fy[:, k]``."""
    n = fx.shape[0]
    a = fx.T @ fy / n
    v = (fx * fx).T @ (fy * fy) / n - a * a
    # cancellation can leave tiny negatives
    np.maximum(v, 0.0, out=v)
    return a, v


def estimate(xn, yn, bx: BasisIndexSet, by: BasisIndexSet) -> CoefficientTable:
    """``a_jk = mean_i f_j(x_i) f_k(y_i)`` with the per-feature variance of the products.

    Cost is ``O(n |B_x| |B_y|)``; only the two ``n x |B|`` feature matrices
    are held in memory.
    """
    fx = _features(xn, bx)
    fy = _features(yn, by)
    if fx.shape[0] != fy.shape[0]:
        raise PairingError(f"row counts differ: {fx.shape[0]} vs {fy.shape[0]}")
    a, v = moments(fx, fy)
    return CoefficientTable(a=a, v=v, n=fx.shape[0], bx=bx, by=by)


def scores(a, v, n, variance_rule="unit"):
    if variance_rule == "unit":
        return np.sqrt(n) * a
    if variance_rule == "empirical":
        return np.sqrt(n) * a / np.sqrt(v)
    raise ConfigError(f"unknown variance rule {variance_rule!r}")


def normalize_scores(table: CoefficientTable, variance_rule: str = "unit") -> CoefficientTable:
    """Fill ``z``: ``sqrt(n) a`` under ``"unit"``, ``sqrt(n) a / sqrt(v)`` under ``"empirical"``.

    The unit rule is exact under independence for pairwise features only;
    features with two or more nonzero components need ``"empirical"``.
    """
    if variance_rule == "empirical":
        zero = np.argwhere(table.v <= 0.0)
        if len(zero):
            r, c = zero[0]
            raise DegenerateFeature(table.bx.members[r], table.by.members[c])
    z = scores(table.a, table.v, table.n, variance_rule)
    return replace(table, z=z, variance_rule=variance_rule)


def default_variance_rule(bx: BasisIndexSet, by: BasisIndexSet) -> str:
    """``"unit"`` when every feature is pairwise, otherwise ``"empirical"``."""
    higher = any(sum(c > 0 for c in j) > 1 for j in bx.members) or any(
        sum(c > 0 for c in k) > 1 for k in by.members
    )
    return "empirical" if higher else "unit"
