"""Orthonormal shifted-Legendre polynomials on [0, 1] and product-basis index sets.

``f_j(x) = sqrt(2j + 1) * P_j(2x - 1)`` where ``P_j`` is the Legendre
polynomial, so that ``int_0^1 f_k f_l dx = delta_kl``.  The first few are::

    f_0 = 1
    f_1 = sqrt(3) (2x - 1)
    f_2 = sqrt(5) (6x^2 - 6x + 1)
    f_3 = sqrt(7) (20x^3 - 30x^2 + 12x - 1)
    f_4 = 3 (70x^4 - 140x^3 + 90x^2 - 20x + 1)
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimError, DomainError

KINDS = ("full", "pairwise", "triplewise", "custom")


def legendre_table(x, m: int) -> np.ndarray:
    """Values ``f_0(x) .. f_m(x)`` stacked along a new leading axis.

    Uses the three-term recurrence ``(j+1) P_{j+1} = (2j+1) t P_j - j P_{j-1}``
    with ``t = 2x - 1``; no monomial expansion.
    """
    x = np.asarray(x, dtype=float)
    if m < 0:
        raise ConfigError("degree must be non-negative")
    if np.any((x < 0.0) | (x > 1.0)) or np.any(np.isnan(x)):
        raise DomainError("basis functions are defined on [0, 1]")
    t = 2.0 * x - 1.0
    out = np.empty((m + 1,) + x.shape)
    out[0] = 1.0
    if m >= 1:
        out[1] = t
    for j in range(1, m):
        out[j + 1] = ((2 * j + 1) * t * out[j] - j * out[j - 1]) / (j + 1)
    scale = np.sqrt(2.0 * np.arange(m + 1) + 1.0)
    return out * scale.reshape((-1,) + (1,) * x.ndim)


def legendre_eval(j: int, x):
    """Orthonormal shifted-Legendre polynomial ``f_j`` evaluated at ``x`` in [0, 1]."""
    if int(j) != j or j < 0:
        raise ConfigError(f"degree must be a non-negative integer, got {j}")
    val = legendre_table(x, int(j))[int(j)]
    return float(val) if np.ndim(val) == 0 else val


def sup_norm(j: int) -> float:
    """``max |f_j|`` on [0, 1], attained at the endpoints."""
    return float(np.sqrt(2 * j + 1))


def product_eval(j, x):
    """``f_{j_1}(x_1) * ... * f_{j_d}(x_d)``.

    ``x`` may be a single point of length ``d`` or an ``n x d`` array of points.
    """
    j = tuple(int(v) for v in j)
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != len(j):
        raise DimError(f"multi-index has {len(j)} components, point has {x.shape[-1]}")
    out = np.ones(x.shape[:-1])
    for q, jq in enumerate(j):
        if jq:
            out = out * legendre_eval(jq, x[..., q])
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class BasisIndexSet:
    """Ordered set of multi-indices in ``{0..m}^d`` selecting mixed moments."""

    dim: int
    degree: int
    members: tuple
    kind: str = "custom"

    def __post_init__(self):
        members = tuple(tuple(int(v) for v in j) for j in self.members)
        if self.kind not in KINDS:
            raise ConfigError(f"unknown basis kind {self.kind!r}")
        if len(set(members)) != len(members):
            raise ConfigError("basis contains duplicate multi-indices")
        for j in members:
            if len(j) != self.dim:
                raise DimError(f"multi-index {j} does not have dimension {self.dim}")
            if any(v < 0 or v > self.degree for v in j):
                raise ConfigError(f"multi-index {j} has a component outside 0..{self.degree}")
        nonzero = [sum(v > 0 for v in j) for j in members]
        if self.kind == "pairwise" and any(c != 1 for c in nonzero):
            raise ConfigError("pairwise basis members need exactly one nonzero component")
        if self.kind == "triplewise" and any(c not in (1, 2) for c in nonzero):
            raise ConfigError("triplewise basis members need one or two nonzero components")
        object.__setattr__(self, "members", members)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def to_list(self):
        return [list(j) for j in self.members]

    def features(self, u) -> np.ndarray:
        """``n x |B|`` matrix of ``f_j(u_i)`` for rows ``u_i`` of a normalized sample."""
        u = np.asarray(getattr(u, "values", u), dtype=float)
        if u.ndim == 1:
            u = u[:, None]
        if u.shape[1] != self.dim:
            raise DimError(f"basis has dimension {self.dim}, sample has {u.shape[1]} columns")
        tables = [legendre_table(u[:, q], self.degree) for q in range(self.dim)]
        out = np.ones((u.shape[0], len(self.members)))
        for b, j in enumerate(self.members):
            for q, jq in enumerate(j):
                if jq:
                    out[:, b] *= tables[q][jq]
        return out


def build_basis(d: int, m: int, kind: str = "pairwise") -> BasisIndexSet:
    """Nontrivial multi-indices with one (pairwise) or one or two (triplewise) nonzero components.

    Pairwise has ``d*m`` members, triplewise ``d*m + C(d,2)*m^2``; both in
    lexicographic order.
    """
    if d < 1 or m < 1:
        raise ConfigError(f"need d >= 1 and m >= 1, got d={d}, m={m}")
    if kind == "pairwise":
        allowed = (1,)
    elif kind == "triplewise":
        allowed = (1, 2)
    else:
        raise ConfigError(f"build_basis supports 'pairwise' or 'triplewise', got {kind!r}")
    members = []
    for nz in allowed:
        for coords in itertools.combinations(range(d), nz):
            for degs in itertools.product(range(1, m + 1), repeat=nz):
                j = [0] * d
                for q, deg in zip(coords, degs):
                    j[q] = deg
                members.append(tuple(j))
    members.sort()
    return BasisIndexSet(d, m, tuple(members), kind)
