import itertools
import math

import numpy as np
import pytest
from numpy.polynomial.legendre import leggauss
from scipy.special import eval_legendre

from hcr.basis import BasisIndexSet, build_basis, legendre_eval, legendre_table, product_eval
from hcr.errors import ConfigError, DimError, DomainError

EXPLICIT = [
    lambda x: np.ones_like(x),
    lambda x: math.sqrt(3) * (2 * x - 1),
    lambda x: math.sqrt(5) * (6 * x**2 - 6 * x + 1),
    lambda x: math.sqrt(7) * (20 * x**3 - 30 * x**2 + 12 * x - 1),
    lambda x: 3 * (70 * x**4 - 140 * x**3 + 90 * x**2 - 20 * x + 1),
]


def unit_quadrature(nodes=40):
    t, w = leggauss(nodes)
    return (t + 1) / 2, w / 2


@pytest.mark.parametrize("j, x, expected", [(0, 0.37, 1.0), (1, 0.5, 0.0), (2, 0.0, math.sqrt(5)), (4, 0.0, 3.0)])
def test_known_values(j, x, expected):
    assert legendre_eval(j, x) == pytest.approx(expected, abs=1e-14)


def test_matches_explicit_low_degree_formulas():
    x = np.linspace(0, 1, 101)
    for j, f in enumerate(EXPLICIT):
        np.testing.assert_allclose(legendre_eval(j, x), f(x), atol=1e-12)


def test_matches_scipy_legendre_up_to_degree_12():
    x = np.linspace(0, 1, 57)
    table = legendre_table(x, 12)
    for j in range(13):
        np.testing.assert_allclose(table[j], math.sqrt(2 * j + 1) * eval_legendre(j, 2 * x - 1), atol=1e-12)


def test_orthonormal_by_quadrature():
    x, w = unit_quadrature(40)
    tab = legendre_table(x, 8)
    gram = (tab * w) @ tab.T
    np.testing.assert_allclose(gram, np.eye(9), atol=1e-10)


def test_product_basis_orthogonal_on_cube():
    x, w = unit_quadrature(20)
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    W = np.outer(w, w)
    pts = np.stack([X1.ravel(), X2.ravel()], axis=1)
    idx = list(itertools.product(range(4), repeat=2))
    vals = np.array([product_eval(j, pts) for j in idx])
    gram = (vals * W.ravel()) @ vals.T
    np.testing.assert_allclose(gram, np.eye(len(idx)), atol=1e-9)


def test_domain_error():
    with pytest.raises(DomainError):
        legendre_eval(2, 1.5)
    with pytest.raises(DomainError):
        legendre_eval(1, -0.01)


@pytest.mark.parametrize("j, x, expected", [((0, 0), (0.3, 0.9), 1.0), ((1, 0), (0.5, 0.2), 0.0), ((1, 1), (1, 1), 3.0)])
def test_product_eval(j, x, expected):
    assert product_eval(j, x) == pytest.approx(expected, abs=1e-14)


def test_product_eval_dimension_mismatch():
    with pytest.raises(DimError):
        product_eval((1, 0), (0.5,))


def test_pairwise_examples():
    b = build_basis(1, 4, "pairwise")
    assert b.members == ((1,), (2,), (3,), (4,))
    assert len(b) * len(b) == 16
    assert set(build_basis(2, 1, "pairwise").members) == {(1, 0), (0, 1)}


def brute_force(d, m, allowed):
    return sorted(j for j in itertools.product(range(m + 1), repeat=d) if sum(v > 0 for v in j) in allowed)


@pytest.mark.parametrize("d", range(1, 6))
@pytest.mark.parametrize("m", range(1, 9))
def test_pairwise_enumeration(d, m):
    b = build_basis(d, m, "pairwise")
    assert len(b) == d * m
    assert list(b.members) == brute_force(d, m, {1})


@pytest.mark.parametrize("d, m", [(2, 2), (3, 2), (3, 3), (4, 1)])
def test_triplewise_enumeration(d, m):
    b = build_basis(d, m, "triplewise")
    assert len(b) == d * m + math.comb(d, 2) * m * m
    assert list(b.members) == brute_force(d, m, {1, 2})


def test_triplewise_size_example():
    assert len(build_basis(2, 2, "triplewise")) == 8


def test_basis_set_invariants():
    with pytest.raises(ConfigError):
        BasisIndexSet(2, 2, ((1, 0), (1, 0)))
    with pytest.raises(ConfigError):
        BasisIndexSet(2, 2, ((1, 1),), "pairwise")
    with pytest.raises(ConfigError):
        BasisIndexSet(2, 2, ((3, 0),))
    with pytest.raises(DimError):
        BasisIndexSet(2, 2, ((1,),))


def test_features_match_product_eval(rng):
    u = rng.random((30, 3))
    b = build_basis(3, 3, "triplewise")
    f = b.features(u)
    for col, j in enumerate(b.members):
        np.testing.assert_allclose(f[:, col], product_eval(j, u), atol=1e-13)
