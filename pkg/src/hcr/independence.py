"""HCR independence tests built on normalized mixed-moment scores.

Under independence each score ``z = sqrt(n) a`` is approximately N(0, 1).
The extreme-value tests compare sorted scores with the order-statistic
null; the chi-square, log-likelihood and permutation tests use all of them.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import orderstats
from .basis import BasisIndexSet, build_basis, product_eval
from .coeffs import CoefficientTable, estimate, moments, normalize_scores, scores
from .errors import ConfigError, DimError, EmptyFeatures
from .ingest import PairedSample
from .normalize import edf_normalize
from .parallel import parallel_map

METHODS = ("minmax", "sorted_extremes", "loglik", "chi2", "perm_sum_z2", "perm_max_z")

# E[ln phi(Z)] for Z ~ N(0, 1); the null variance of ln phi(Z) is 1/2
LOGLIK_NULL_MEAN = -0.5 * (1.0 + math.log(2.0 * math.pi))


@dataclass
class TestReport:
    """Outcome of one test; ``reject`` is ``p_or_pr < alpha``."""

    __test__ = False

    method: str
    statistic: float
    p_or_pr: float
    alpha: float
    meta: dict = field(default_factory=dict)

    @property
    def reject(self) -> bool:
        return bool(self.p_or_pr < self.alpha)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "statistic": self.statistic,
            "p_or_pr": self.p_or_pr,
            "alpha": self.alpha,
            "reject": self.reject,
            "meta": self.meta,
        }


@dataclass(frozen=True)
class SignificantModel:
    """Coefficients kept by the order-statistic significance filter.

    ``kept`` holds ``(j, k, a)`` triples; ``bx``/``by`` fix the dimensions
    the model is evaluated in.
    """

    kept: tuple
    alpha: float
    bx: BasisIndexSet
    by: BasisIndexSet

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "kept": [{"j": list(j), "k": list(k), "a": a} for j, k, a in self.kept],
        }


def _flat(z) -> np.ndarray:
    z = np.asarray(getattr(z, "z", z), dtype=float).ravel()
    if z.size == 0:
        raise EmptyFeatures("no scores to test")
    return z


def _check_alpha(alpha):
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError(f"alpha must lie in [0, 1], got {alpha}")


def _extreme_product(z: np.ndarray, k: int) -> float:
    zs = np.sort(z)
    M = zs.size
    prod = 1.0
    for i in range(1, k + 1):
        lower = orderstats.order_cdf(M, i, zs[i - 1])
        upper = orderstats.order_sf(M, M + 1 - i, zs[M - i])
        prod *= lower * upper
    return prod


def test_minmax(z, alpha: float = 0.05) -> TestReport:
    """Product of the lower tail of the minimum and the upper tail of the maximum.

    The score is an uncalibrated index, not a p-value; see
    :func:`calibrate_extremes` for a Monte-Carlo p-value.
    """
    _check_alpha(alpha)
    z = _flat(z)
    pr = _extreme_product(z, 1)
    return TestReport(
        "minmax",
        float(pr),
        float(pr),
        alpha,
        {"M": int(z.size), "min": float(z.min()), "max": float(z.max())},
    )


def test_sorted_extremes(z, k: int = 1, alpha: float = 0.05) -> TestReport:
    """``2^(2k) prod_{i<=k} CDF_i(z_(i)) (1 - CDF_{M+1-i}(z_(M+1-i)))``.

    ``k = 1`` is exactly four times the minmax score.
    """
    _check_alpha(alpha)
    z = _flat(z)
    if k < 0 or 2 * k > z.size:
        raise ConfigError(f"need 0 <= 2k <= M, got k={k}, M={z.size}")
    score = 4.0**k * _extreme_product(z, k)
    return TestReport("sorted_extremes", float(score), float(score), alpha, {"M": int(z.size), "k": int(k)})


def test_loglik(z, alpha: float = 0.05) -> TestReport:
    """Two-sided test on ``mean ln phi(z)`` standardized by its null law ``N(-1.4189, 1/(2M))``."""
    _check_alpha(alpha)
    z = _flat(z)
    M = z.size
    stat = float(np.mean(-0.5 * z * z) - 0.5 * math.log(2.0 * math.pi))
    dev = (stat - LOGLIK_NULL_MEAN) * math.sqrt(2.0 * M)
    p = math.erfc(abs(dev) / math.sqrt(2.0))
    return TestReport("loglik", stat, p, alpha, {"M": M, "standardized": dev})


def test_chi2(z, alpha: float = 0.05) -> TestReport:
    """``T = sum z^2`` against chi-square with ``M`` degrees of freedom."""
    _check_alpha(alpha)
    z = _flat(z)
    T = float(np.sum(z * z))
    return TestReport("chi2", T, float(stats.chi2.sf(T, z.size)), alpha, {"M": int(z.size)})


for _fn in (test_minmax, test_sorted_extremes, test_loglik, test_chi2):
    _fn.__test__ = False


def replicate_rngs(seed: int, count: int):
    """Independent generator per replicate, keyed by ``(seed, index)``."""
    return [np.random.default_rng([seed, b]) for b in range(count)]


def _perm_stats(fx, fy, rng, variance_rule):
    p = rng.permutation(fy.shape[0])
    if variance_rule == "unit":
        z = np.sqrt(fx.shape[0]) * (fx.T @ fy[p]) / fx.shape[0]
    else:
        a, v = moments(fx, fy[p])
        z = scores(a, v, fx.shape[0], variance_rule)
    return float(np.sum(z * z)), float(np.max(np.abs(z)))


def permutation_null(fx, fy, B: int, seed: int, variance_rule: str = "unit", threads: int = 1) -> np.ndarray:
    """``B x 2`` array of ``(sum z^2, max |z|)`` over random row permutations of ``fy``."""
    fn = functools.partial(_perm_stats, fx, fy, variance_rule=variance_rule)
    return np.array(parallel_map(fn, replicate_rngs(seed, B), threads))


def hcr_scores(pair: PairedSample, m: int = 4, basis: str = "pairwise", variance_rule=None):
    """EDF-normalize both samples and return the scored coefficient table."""
    from .coeffs import default_variance_rule

    bx = build_basis(pair.x.d, m, basis)
    by = build_basis(pair.y.d, m, basis)
    table = estimate(edf_normalize(pair.x), edf_normalize(pair.y), bx, by)
    rule = variance_rule or default_variance_rule(bx, by)
    return normalize_scores(table, rule)


def _perm_p(null: np.ndarray, observed: float, B: int) -> float:
    return (1.0 + np.count_nonzero(null >= observed)) / (B + 1.0)


def permutation_pvalues(pair: PairedSample, bx: BasisIndexSet, by: BasisIndexSet, B: int, seed: int,
                        variance_rule: str = "unit", threads: int = 1) -> dict:
    """Both permutation p-values (``sum_z2``, ``max_abs_z``) from one shared set of permutations."""
    if B < 100:
        raise ConfigError(f"need at least 100 permutations, got {B}")
    fx = bx.features(edf_normalize(pair.x))
    fy = by.features(edf_normalize(pair.y))
    a, v = moments(fx, fy)
    z = scores(a, v, pair.n, variance_rule)
    obs_sum = float(np.sum(z * z))
    obs_max = float(np.max(np.abs(z)))
    null = permutation_null(fx, fy, B, seed, variance_rule, threads)
    return {
        "sum_z2": (obs_sum, _perm_p(null[:, 0], obs_sum, B)),
        "max_abs_z": (obs_max, _perm_p(null[:, 1], obs_max, B)),
    }


def test_permutation(pair: PairedSample, bx: BasisIndexSet = None, by: BasisIndexSet = None, m: int = 4,
                     stat: str = "sum_z2", B: int = 400, seed: int = 0, alpha: float = 0.05,
                     variance_rule: str = "unit", threads: int = 1) -> TestReport:
    """Permutation test: recompute the statistic with the rows of ``y`` shuffled.

    p-value uses the add-one convention ``(1 + #{null >= observed}) / (B + 1)``.
    """
    _check_alpha(alpha)
    if stat not in ("sum_z2", "max_abs_z"):
        raise ConfigError(f"unknown permutation statistic {stat!r}")
    bx = bx or build_basis(pair.x.d, m, "pairwise")
    by = by or build_basis(pair.y.d, m, "pairwise")
    observed, p = permutation_pvalues(pair, bx, by, B, seed, variance_rule, threads)[stat]
    method = "perm_sum_z2" if stat == "sum_z2" else "perm_max_z"
    meta = {"m": bx.degree, "M": len(bx) * len(by), "B_perm": B, "seed": seed, "variance_rule": variance_rule}
    return TestReport(method, observed, p, alpha, meta)


test_permutation.__test__ = False


@functools.lru_cache(maxsize=64)
def _extremes_null(M: int, k: int, reps: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((reps, M))
    return np.sort([_extreme_product(row, k) for row in g])


def calibrate_extremes(score: float, M: int, k: int = 1, reps: int = 10_000, seed: int = 0) -> float:
    """Monte-Carlo p-value of an extreme-value score (``k = 1`` for minmax, unscaled).

    The null is simulated from ``M`` i.i.d. N(0, 1) features; smaller scores
    are more extreme.  Pass the score without the ``4^k`` factor.
    """
    null = _extremes_null(int(M), int(k), int(reps), int(seed))
    count = np.searchsorted(null, score, side="right")
    return (1.0 + count) / (reps + 1.0)


def significance_filter(table: CoefficientTable, alpha: float = 0.01) -> SignificantModel:
    """Keep sorted position ``i`` iff ``min(CDF_i(z_(i)), 1 - CDF_i(z_(i))) < alpha``."""
    if table.z is None:
        raise ValueError("table has no scores; call normalize_scores first")
    z = table.z.ravel()
    a = table.a.ravel()
    M = z.size
    if M == 0:
        raise EmptyFeatures("no scores to filter")
    pairs = table.pairs()
    order = np.argsort(z, kind="stable")
    kept = []
    for i, idx in enumerate(order, start=1):
        lower = orderstats.order_cdf(M, i, z[idx])
        upper = orderstats.order_sf(M, i, z[idx])
        if min(lower, upper) < alpha:
            j, k = pairs[idx]
            kept.append((j, k, float(a[idx])))
    return SignificantModel(tuple(kept), alpha, table.bx, table.by)


def joint_density_eval(model: SignificantModel, x, y) -> float:
    """Copula density ``1 + sum_kept a_jk f_j(x) f_k(y)``; may be negative."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape[-1] != model.bx.dim or y.shape[-1] != model.by.dim:
        raise DimError(f"model expects points of dimension ({model.bx.dim}, {model.by.dim})")
    out = 1.0
    for j, k, a in model.kept:
        out = out + a * product_eval(j, x) * product_eval(k, y)
    return out


def run_test(pair: PairedSample, method: str, m: int = 4, alpha: float = 0.05, k: int = 1,
             B: int = 400, seed: int = 0, basis: str = "pairwise", variance_rule=None,
             calibrate: bool = False, calibration_reps: int = 10_000, threads: int = 1) -> TestReport:
    """Full pipeline: EDF, basis, coefficients, scores, then the selected test."""
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    table = hcr_scores(pair, m, basis, variance_rule)
    if method in ("perm_sum_z2", "perm_max_z"):
        stat = "sum_z2" if method == "perm_sum_z2" else "max_abs_z"
        report = test_permutation(pair, table.bx, table.by, m, stat, B, seed, alpha, table.variance_rule, threads)
    elif method == "minmax":
        report = test_minmax(table.z, alpha)
    elif method == "sorted_extremes":
        report = test_sorted_extremes(table.z, k, alpha)
    elif method == "loglik":
        report = test_loglik(table.z, alpha)
    else:
        report = test_chi2(table.z, alpha)
    report.meta.update({"m": m, "basis": basis, "variance_rule": table.variance_rule})
    if calibrate and method in ("minmax", "sorted_extremes"):
        kk = 1 if method == "minmax" else k
        raw = report.p_or_pr / (4.0**kk if method == "sorted_extremes" else 1.0)
        report.meta["score"] = report.p_or_pr
        report.meta["calibration_reps"] = calibration_reps
        report.meta["seed"] = seed
        report.p_or_pr = calibrate_extremes(raw, table.M, kk, calibration_reps, seed)
    return report
