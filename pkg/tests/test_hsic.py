import math

import numpy as np
import pytest
from scipy import stats

from hcr.bench import DEFAULT_X_MIXTURE, RotationSweepConfig, base_dataset, rotate
from hcr.errors import ConfigError, DegenerateSample, DimError
from hcr.hsic import (
    gaussian_kernel,
    hsic_gamma_test,
    hsic_permutation_test,
    hsic_vstat,
    median_heuristic,
)
from hcr.ingest import PairedSample, SampleMatrix


def explicit_hsic(k, l):
    n = k.shape[0]
    h = np.eye(n) - np.ones((n, n)) / n
    return np.trace(k @ h @ l @ h) / n**2


def _pair(x, y):
    return PairedSample(SampleMatrix(x), SampleMatrix(y))


def test_median_heuristic_examples():
    assert median_heuristic(np.array([0.0, 1.0, 2.0])) == 1.0
    assert median_heuristic(np.array([0.0, 3.0])) == 3.0
    assert median_heuristic(np.array([0.0, 0.0, 3.0])) == 3.0
    with pytest.raises(DegenerateSample):
        median_heuristic(np.array([1.5, 1.5]))


def test_kernel_values():
    k = gaussian_kernel(np.array([0.0, math.sqrt(2) * 0.7]), 0.7)
    np.testing.assert_allclose(np.diag(k.k), 1.0)
    assert k.k[0, 1] == pytest.approx(math.exp(-1), abs=1e-15)
    lin = gaussian_kernel(np.array([0.0, 2.0]), 1.0, "linear")
    assert lin.k[0, 1] == pytest.approx(math.exp(-1), abs=1e-15)
    wide = gaussian_kernel(np.random.default_rng(0).standard_normal(10), 1e8)
    np.testing.assert_allclose(wide.k, 1.0, atol=1e-12)
    with pytest.raises(ConfigError):
        gaussian_kernel(np.zeros(3), 0.0)


def test_kernel_invariants(rng):
    k = gaussian_kernel(rng.standard_normal((30, 3)), 1.3).k
    np.testing.assert_array_equal(k, k.T)
    assert np.all((k > 0) & (k <= 1))


def test_vstat_constant_kernel():
    j = np.ones((6, 6))
    assert hsic_vstat(j, j) == pytest.approx(0.0, abs=1e-15)


def test_vstat_two_points():
    for a in (0.0, 0.3, 0.9):
        k = np.array([[1.0, a], [a, 1.0]])
        assert hsic_vstat(k, k) == pytest.approx((1 - a) ** 2 / 4, abs=1e-15)


def test_vstat_self_is_frobenius(rng):
    k = gaussian_kernel(rng.standard_normal((25, 2)), 1.0).k
    n = 25
    h = np.eye(n) - 1 / n
    assert hsic_vstat(k, k) == pytest.approx(np.linalg.norm(h @ k @ h) ** 2 / n**2, abs=1e-14)
    assert hsic_vstat(k, k) > 0


def test_vstat_symmetric_and_brute_force(rng):
    for n in (3, 10, 30):
        k = gaussian_kernel(rng.standard_normal((n, 2)), 0.8).k
        l = gaussian_kernel(rng.standard_normal((n, 1)), 1.7).k
        assert hsic_vstat(k, l) == hsic_vstat(l, k) or abs(hsic_vstat(k, l) - hsic_vstat(l, k)) < 1e-16
        assert hsic_vstat(k, l) == pytest.approx(explicit_hsic(k, l), abs=1e-12)
        assert hsic_vstat(k, l) >= -1e-12


def test_vstat_size_mismatch():
    with pytest.raises(DimError):
        hsic_vstat(np.eye(3), np.eye(4))


def test_relabeling_and_translation_invariance(rng):
    x, y = rng.standard_normal((40, 2)), rng.standard_normal((40, 1))
    p = rng.permutation(40)

    def stat(xx, yy):
        return hsic_vstat(gaussian_kernel(xx, 1.0), gaussian_kernel(yy, 1.0))

    assert stat(x[p], y[p]) == pytest.approx(stat(x, y), abs=1e-14)
    assert stat(x + np.array([5.0, -3.0]), y) == pytest.approx(stat(x, y), abs=1e-12)


def test_gamma_strong_dependence():
    rng = np.random.default_rng(30)
    x = rng.random(500)
    res = hsic_gamma_test(_pair(x, x + 0.05 * rng.standard_normal(500)), 0.05)
    assert res.p_value < 0.01 and res.reject
    assert res.calibration == "gamma"


def test_gamma_requires_n20():
    with pytest.raises(ConfigError):
        hsic_gamma_test(_pair(np.arange(10.0), np.arange(10.0)))


@pytest.mark.slow
def test_gamma_null_rejection_rate():
    rng = np.random.default_rng(31)
    rej = sum(hsic_gamma_test(_pair(rng.random(500), rng.random(500)), 0.05, seed=s).reject for s in range(100))
    assert 0.02 <= rej / 100 <= 0.09


def test_permutation_identical():
    x = np.random.default_rng(32).standard_normal(200)
    res = hsic_permutation_test(_pair(x, x.copy()), B=200, seed=1)
    assert res.p_value == pytest.approx(1 / 201)


def test_permutation_deterministic_and_needs_B(small_pair):
    a = hsic_permutation_test(small_pair, B=120, seed=4)
    b = hsic_permutation_test(small_pair, B=120, seed=4, threads=2)
    assert a.to_dict() == b.to_dict()
    with pytest.raises(ConfigError):
        hsic_permutation_test(small_pair, B=99)


def test_permutation_null_uniform():
    rng = np.random.default_rng(33)
    ps = [hsic_permutation_test(_pair(rng.standard_normal(40), rng.standard_normal(40)), B=100, seed=s).p_value
          for s in range(150)]
    assert stats.kstest(ps, "uniform").pvalue > 0.001


def test_fixed_bandwidth(small_pair):
    res = hsic_gamma_test(small_pair, bandwidth=(0.5, 2.0))
    assert (res.sigma_x, res.sigma_y) == (0.5, 2.0)
    with pytest.raises(ConfigError):
        hsic_gamma_test(small_pair, bandwidth="silverman")


@pytest.mark.slow
def test_doubled_bandwidth_is_more_conservative():
    # Unscaled mixture on both blocks; with the benchmark's wider y block the ordering reverses.
    cfg = RotationSweepConfig(seed=0, delta_theta_deg=0.5, mixture=(DEFAULT_X_MIXTURE,) * 4)
    base = base_dataset(cfg)
    wins = 0
    angles = cfg.angles()
    for theta in angles:
        pair = rotate(base, float(theta), cfg.plane)
        p1 = hsic_gamma_test(pair, bandwidth="median", seed=1).p_value
        p2 = hsic_gamma_test(pair, bandwidth="median_x2", seed=1).p_value
        wins += p2 >= p1
    assert wins > len(angles) / 2
