import csv
import json

import numpy as np
import pytest

from hcr.bench import (
    DEFAULT_X_MIXTURE,
    MixtureSpec,
    RotationSweepConfig,
    aggregate,
    base_dataset,
    bootstrap_median_diff,
    first_reject_matrix,
    generate_mixture_pair,
    rotate,
    run_rotation_sweep,
    run_seeds,
)
from hcr.errors import ConfigError
from hcr.independence import test_chi2
from hcr.independence import hcr_scores

FAST = dict(n=200, m=3, B_perm=100, delta_theta_deg=2.0, max_theta_deg=4.0, n_hsic_null=50,
            calibration_reps=500)


def test_mixture_validation():
    with pytest.raises(ConfigError):
        MixtureSpec(weights=(0.5, 0.6))
    with pytest.raises(ConfigError):
        MixtureSpec(sds=(0.5, -0.1))
    one = MixtureSpec(means=(2.0,), sds=(0.1,), weights=(1.0,))
    x = one.sample(5000, np.random.default_rng(0))
    assert abs(x.mean() - 2.0) < 0.01 and abs(x.std() - 0.1) < 0.01


def test_mixture_moments():
    x = DEFAULT_X_MIXTURE.sample(200_000, np.random.default_rng(1))
    assert abs(x.mean()) < 0.01
    assert x.var() == pytest.approx(1.25, rel=0.02)
    assert DEFAULT_X_MIXTURE.scaled(3.0).means == (-3.0, 3.0)


def test_generate_shapes_and_determinism():
    a = generate_mixture_pair(100, 3)
    b = generate_mixture_pair(100, 3)
    assert (a.x.d, a.y.d, a.n) == (2, 2, 100)
    np.testing.assert_array_equal(a.joint(), b.joint())
    assert not np.array_equal(a.joint(), generate_mixture_pair(100, 4).joint())


def test_rotation_identities(small_pair):
    z = small_pair.joint()
    np.testing.assert_array_equal(rotate(small_pair, 0.0, (0, 1)).joint(), z)
    np.testing.assert_allclose(rotate(small_pair, 360.0, (0, 1)).joint(), z, atol=1e-12)
    back = rotate(rotate(small_pair, 17.0, (0, 1)), -17.0, (0, 1))
    np.testing.assert_allclose(back.joint(), z, atol=1e-12)


def test_rotation_preserves_norms_and_other_columns():
    pair = generate_mixture_pair(50, 0)
    r = rotate(pair, 33.0, (1, 2))
    z, zr = pair.joint(), r.joint()
    np.testing.assert_allclose(np.linalg.norm(zr, axis=1), np.linalg.norm(z, axis=1), atol=1e-12)
    np.testing.assert_array_equal(zr[:, [0, 3]], z[:, [0, 3]])


@pytest.mark.parametrize("plane", [(0, 0), (0, 4), (-1, 2)])
def test_invalid_plane(small_pair, plane):
    with pytest.raises(ConfigError):
        rotate(small_pair, 10.0, plane)


def test_unrotated_default_is_independent():
    rej = 0
    for s in range(100):
        pair = base_dataset(RotationSweepConfig(n=1000, seed=s))
        rej += test_chi2(hcr_scores(pair, 4).z.ravel(), 0.05).reject
    assert rej <= 10


def test_config_validation():
    with pytest.raises(ConfigError):
        RotationSweepConfig(methods=("nope",))
    with pytest.raises(ConfigError):
        RotationSweepConfig(delta_theta_deg=0.0)
    assert RotationSweepConfig().angles().size == 25


def test_sweep_determinism_and_outputs(tmp_path):
    cfg = RotationSweepConfig(seed=2, **FAST)
    a, b = run_rotation_sweep(cfg), run_rotation_sweep(cfg)
    assert a.rows == b.rows and a.first_reject == b.first_reject
    assert len(a.rows) == 3 * len(cfg.methods)
    assert all(0 < p <= 1 for _, _, p in a.rows)
    a.to_csv(tmp_path / "s.csv")
    a.to_json(tmp_path / "s.json")
    a.to_gnuplot(tmp_path / "s.dat")
    rows = list(csv.reader(open(tmp_path / "s.csv")))
    assert rows[0] == ["theta_deg", "method", "p_value"] and len(rows) == 1 + len(a.rows)
    summary = json.loads((tmp_path / "s.json").read_text())
    assert summary["schema"] == 1 and set(summary["first_reject"]) == set(cfg.methods)
    dat = (tmp_path / "s.dat").read_text().splitlines()
    assert dat[0].startswith("#") and len(dat) == 4 and len(dat[1].split()) == 1 + len(cfg.methods)


def test_aggregate_and_never_rejected():
    results = run_seeds(RotationSweepConfig(methods=("hcr_chi2",), **FAST), [0, 1])
    fr = first_reject_matrix(results, "hcr_chi2")
    assert fr.shape == (2,)
    agg = aggregate(results)["hcr_chi2"]
    assert set(agg) == {"median_first_reject", "never_rejected", "spearman_angle_p"}
    assert agg["never_rejected"] == int(np.isinf(fr).sum())


def test_bootstrap_interval():
    a = np.arange(25.0)
    lo, hi = bootstrap_median_diff(a, a)
    assert lo == hi == 0.0
    lo, hi = bootstrap_median_diff(a + 10, a)
    assert lo <= 10 <= hi and lo > 0
