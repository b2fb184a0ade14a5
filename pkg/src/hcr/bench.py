"""Synthetic mixture data and the rotation-sweep sensitivity benchmark.

A sweep starts from independent ``x`` and ``y`` blocks, applies a fixed
within-block rotation (which keeps ``x`` independent of ``y``), and then a
Givens rotation that couples the blocks by a growing cumulative angle.
Every configured method is run at every angle.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from . import independence as ind
from .basis import build_basis
from .coeffs import moments, scores
from .errors import ConfigError
from .hsic import hsic_gamma_test, hsic_permutation_test
from .ingest import PairedSample, SampleMatrix
from .normalize import edf_normalize

METHOD_IDS = (
    "hsic_gamma",
    "hsic_gamma_x2",
    "hsic_perm",
    "hcr_chi2",
    "hcr_perm_sum_z2",
    "hcr_perm_max_z",
    "hcr_minmax",
)
DEFAULT_METHODS = ("hsic_gamma", "hcr_chi2", "hcr_perm_sum_z2", "hcr_perm_max_z", "hcr_minmax")


@dataclass(frozen=True)
class MixtureSpec:
    """One-dimensional Gaussian mixture."""

    means: tuple = (-1.0, 1.0)
    sds: tuple = (0.5, 0.5)
    weights: tuple = (0.5, 0.5)

    def __post_init__(self):
        k = len(self.weights)
        if k == 0 or len(self.means) != k or len(self.sds) != k:
            raise ConfigError("means, sds and weights must have the same non-zero length")
        w = np.asarray(self.weights, dtype=float)
        if np.any(w <= 0) or not math.isclose(w.sum(), 1.0, rel_tol=0, abs_tol=1e-9):
            raise ConfigError(f"mixture weights must be positive and sum to 1, got {self.weights}")
        if any(not s > 0 for s in self.sds):
            raise ConfigError("component standard deviations must be positive")

    def scaled(self, factor: float) -> "MixtureSpec":
        return MixtureSpec(tuple(factor * m for m in self.means), tuple(factor * s for s in self.sds), self.weights)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        comp = rng.choice(len(self.weights), size=n, p=np.asarray(self.weights))
        means = np.asarray(self.means)[comp]
        sds = np.asarray(self.sds)[comp]
        return means + sds * rng.standard_normal(n)


DEFAULT_X_MIXTURE = MixtureSpec()
# y coordinates are 3x wider: a rotation then moves variance between blocks,
# which couples them already at the covariance level
DEFAULT_Y_MIXTURE = DEFAULT_X_MIXTURE.scaled(3.0)


def generate_mixture_pair(n: int, seed: int, spec=None, dims: Sequence[int] = (2, 2)) -> PairedSample:
    """Independent coordinates, each drawn from its own 1-D Gaussian mixture.

    ``spec`` is ``None`` (block defaults), one :class:`MixtureSpec` for every
    coordinate, or a sequence with one spec per coordinate of ``[x | y]``.
    """
    dx, dy = int(dims[0]), int(dims[1])
    if dx < 1 or dy < 1:
        raise ConfigError("both blocks need at least one coordinate")
    if spec is None:
        specs = [DEFAULT_X_MIXTURE] * dx + [DEFAULT_Y_MIXTURE] * dy
    elif isinstance(spec, MixtureSpec):
        specs = [spec] * (dx + dy)
    else:
        specs = [s if isinstance(s, MixtureSpec) else MixtureSpec(**s) for s in spec]
        if len(specs) != dx + dy:
            raise ConfigError(f"need {dx + dy} mixture specs, got {len(specs)}")
    rng = np.random.default_rng(seed)
    z = np.column_stack([s.sample(n, rng) for s in specs])
    return PairedSample(SampleMatrix(z[:, :dx]), SampleMatrix(z[:, dx:]))


def rotate(pair: PairedSample, theta_deg: float, plane=(0, 1)) -> PairedSample:
    """Givens rotation by ``theta_deg`` in one coordinate plane of ``[x | y]``."""
    dx = pair.x.d
    z = pair.joint()
    i, j = (int(v) for v in plane)
    if i == j or not (0 <= i < z.shape[1] and 0 <= j < z.shape[1]):
        raise ConfigError(f"invalid rotation plane {plane} for {z.shape[1]} coordinates")
    t = math.radians(theta_deg)
    c, s = math.cos(t), math.sin(t)
    zi = z[:, i].copy()
    zj = z[:, j].copy()
    z[:, i] = c * zi - s * zj
    z[:, j] = s * zi + c * zj
    return PairedSample(SampleMatrix(z[:, :dx], pair.x.column_names), SampleMatrix(z[:, dx:], pair.y.column_names))


@dataclass
class RotationSweepConfig:
    n: int = 1000
    dims: tuple = (2, 2)
    delta_theta_deg: float = 0.25
    max_theta_deg: float = 6.0
    within_block_deg: float = 50.0
    m: int = 6
    B_perm: int = 400
    alpha: float = 0.05
    seed: int = 0
    methods: tuple = DEFAULT_METHODS
    # default coupling plane: last x coordinate against first y coordinate
    plane: Optional[tuple] = None
    within_plane: tuple = (0, 1)
    n_hsic_null: int = 200
    calibration_reps: int = 10_000
    mixture: Optional[tuple] = None

    def __post_init__(self):
        if not self.delta_theta_deg > 0:
            raise ConfigError("delta_theta_deg must be positive")
        if not 0 < self.alpha < 1:
            raise ConfigError("alpha must lie in (0, 1)")
        if self.max_theta_deg < 0:
            raise ConfigError("max_theta_deg must be non-negative")
        unknown = [mth for mth in self.methods if mth not in METHOD_IDS]
        if unknown:
            raise ConfigError(f"unknown method id(s) {unknown}; choose from {', '.join(METHOD_IDS)}")
        self.dims = tuple(int(d) for d in self.dims)
        self.methods = tuple(self.methods)
        if self.plane is None:
            self.plane = (self.dims[0] - 1, self.dims[0])
        self.plane = tuple(self.plane)
        self.within_plane = tuple(self.within_plane)

    def angles(self) -> np.ndarray:
        steps = int(math.floor(self.max_theta_deg / self.delta_theta_deg + 1e-9))
        return np.round(np.arange(steps + 1) * self.delta_theta_deg, 10)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mixture"] = None if self.mixture is None else [asdict(s) if isinstance(s, MixtureSpec) else s
                                                          for s in self.mixture]
        return d


@dataclass
class SweepResult:
    rows: list
    first_reject: dict
    config: RotationSweepConfig

    def pvalues(self, method: str) -> np.ndarray:
        return np.array([p for _, mth, p in self.rows if mth == method])

    def angles(self) -> np.ndarray:
        return self.config.angles()

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["theta_deg", "method", "p_value"])
            for theta, method, p in self.rows:
                w.writerow([f"{theta:g}", method, repr(p)])

    def summary(self) -> dict:
        return {"schema": 1, "config": self.config.to_dict(), "first_reject": self.first_reject}

    def to_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.summary(), indent=2, sort_keys=True))

    def to_gnuplot(self, path) -> None:
        methods = self.config.methods
        with open(path, "w") as fh:
            fh.write("# theta_deg " + " ".join(methods) + "\n")
            for a in self.angles():
                vals = [p for th, mth, p in self.rows if th == a]
                fh.write(f"{a:g} " + " ".join(f"{v:.6e}" for v in vals) + "\n")


def _hcr_pvalues(pair: PairedSample, config: RotationSweepConfig, perm_seed: int) -> dict:
    methods = config.methods
    bx = build_basis(pair.x.d, config.m, "pairwise")
    by = build_basis(pair.y.d, config.m, "pairwise")
    fx = bx.features(edf_normalize(pair.x))
    fy = by.features(edf_normalize(pair.y))
    a, v = moments(fx, fy)
    z = scores(a, v, pair.n, "unit").ravel()
    out = {}
    if "hcr_chi2" in methods:
        out["hcr_chi2"] = ind.test_chi2(z, config.alpha).p_or_pr
    if "hcr_minmax" in methods:
        score = ind.test_minmax(z, config.alpha).p_or_pr
        out["hcr_minmax"] = ind.calibrate_extremes(score, z.size, 1, config.calibration_reps, 0)
    if "hcr_perm_sum_z2" in methods or "hcr_perm_max_z" in methods:
        null = ind.permutation_null(fx, fy, config.B_perm, perm_seed)
        obs_sum = float(np.sum(z * z))
        obs_max = float(np.max(np.abs(z)))
        out["hcr_perm_sum_z2"] = (1.0 + np.count_nonzero(null[:, 0] >= obs_sum)) / (config.B_perm + 1.0)
        out["hcr_perm_max_z"] = (1.0 + np.count_nonzero(null[:, 1] >= obs_max)) / (config.B_perm + 1.0)
    return out


def evaluate_methods(pair: PairedSample, config: RotationSweepConfig, perm_seed: int) -> dict:
    """p-value of every configured method on one dataset."""
    out = _hcr_pvalues(pair, config, perm_seed)
    if "hsic_gamma" in config.methods:
        out["hsic_gamma"] = hsic_gamma_test(pair, config.alpha, "median", config.n_hsic_null, perm_seed).p_value
    if "hsic_gamma_x2" in config.methods:
        out["hsic_gamma_x2"] = hsic_gamma_test(pair, config.alpha, "median_x2", config.n_hsic_null,
                                               perm_seed).p_value
    if "hsic_perm" in config.methods:
        out["hsic_perm"] = hsic_permutation_test(pair, config.alpha, config.B_perm, perm_seed).p_value
    return {mth: float(out[mth]) for mth in config.methods}


def base_dataset(config: RotationSweepConfig) -> PairedSample:
    """Mixture sample after the independence-preserving within-block rotation."""
    pair = generate_mixture_pair(config.n, config.seed, config.mixture, config.dims)
    if config.within_block_deg:
        pair = rotate(pair, config.within_block_deg, config.within_plane)
    return pair


def run_rotation_sweep(config: RotationSweepConfig) -> SweepResult:
    """Run every method at every cumulative angle ``k * delta_theta_deg``."""
    base = base_dataset(config)
    rows = []
    first = {mth: None for mth in config.methods}
    for step, theta in enumerate(config.angles()):
        pair = rotate(base, float(theta), config.plane)
        perm_seed = config.seed * 100_003 + step
        pvals = evaluate_methods(pair, config, perm_seed)
        for mth in config.methods:
            rows.append((float(theta), mth, pvals[mth]))
            if first[mth] is None and pvals[mth] < config.alpha:
                first[mth] = float(theta)
    return SweepResult(rows, first, config)


def run_seeds(config: RotationSweepConfig, seeds: Sequence[int], progress=None) -> list:
    results = []
    for s in seeds:
        cfg = RotationSweepConfig(**{**config.__dict__, "seed": int(s)})
        results.append(run_rotation_sweep(cfg))
        if progress is not None:
            progress(s, results[-1])
    return results


def first_reject_matrix(results: Sequence[SweepResult], method: str) -> np.ndarray:
    """First-reject angle per seed; ``inf`` where the method never rejected."""
    return np.array([np.inf if r.first_reject[method] is None else r.first_reject[method] for r in results])


def median_pvalue_curve(results: Sequence[SweepResult], method: str) -> np.ndarray:
    return np.median(np.vstack([r.pvalues(method) for r in results]), axis=0)


def angle_spearman(results: Sequence[SweepResult], method: str) -> float:
    """Spearman correlation between angle and the across-seed median p-value."""
    angles = results[0].angles()
    rho = stats.spearmanr(angles, median_pvalue_curve(results, method))[0]
    return float(rho)


def bootstrap_median_diff(a, b, reps: int = 2000, seed: int = 0, level: float = 0.95):
    """Paired bootstrap interval for ``median(a) - median(b)`` over seeds."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, a.size, size=(reps, a.size))
    diffs = np.median(a[idx], axis=1) - np.median(b[idx], axis=1)
    diffs = diffs[np.isfinite(diffs)]
    if diffs.size == 0:
        return (float("nan"), float("nan"))
    lo, hi = np.quantile(diffs, [(1 - level) / 2, (1 + level) / 2])
    return float(lo), float(hi)


def aggregate(results: Sequence[SweepResult]) -> dict:
    """Per-method median first-reject angle and angle/p Spearman correlation."""
    methods = results[0].config.methods
    out = {}
    for mth in methods:
        fr = first_reject_matrix(results, mth)
        med = float(np.median(fr))
        out[mth] = {
            "median_first_reject": None if math.isinf(med) else med,
            "never_rejected": int(np.isinf(fr).sum()),
            "spearman_angle_p": angle_spearman(results, mth),
        }
    return out
