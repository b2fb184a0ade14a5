"""Distribution of the i-th smallest of M i.i.d. standard normal draws.

The density is ``M C(M-1, i-1) phi(x) Phi(x)^(i-1) (1 - Phi(x))^(M-i)`` and
the CDF is the regularized incomplete beta ``I_{Phi(x)}(i, M - i + 1)``.
Upper tails are evaluated through ``Phi(-x)`` so they stay accurate far
from the mode.
"""

from __future__ import annotations

import math

import numpy as np

_FPMIN = 1e-300
_EPS = 1e-15
_MAXITER = 10_000

_SQRT2 = math.sqrt(2.0)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def norm_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x - _LOG_SQRT_2PI)


def norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / _SQRT2)


def _betacf(a: float, b: float, x: float) -> float:
    # modified Lentz evaluation of the continued fraction for I_x(a, b)
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAXITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise RuntimeError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def _front(a: float, b: float, x: float) -> float:
    log_beta = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    return math.exp(a * math.log(x) + b * math.log1p(-x) - log_beta)


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function ``I_x(a, b)`` for ``a, b > 0``."""
    if a <= 0 or b <= 0:
        raise ValueError("betainc needs a > 0 and b > 0")
    if not 0.0 <= x <= 1.0:
        raise ValueError("betainc needs x in [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    # the fraction converges fast below the mean; use symmetry above it
    if x < (a + 1.0) / (a + b + 2.0):
        return _front(a, b, x) * _betacf(a, b, x) / a
    return 1.0 - _front(b, a, 1.0 - x) * _betacf(b, a, 1.0 - x) / b


def _check(M: int, i: int):
    if int(M) != M or M < 1:
        raise IndexError(f"M must be a positive integer, got {M}")
    if int(i) != i or not 1 <= i <= M:
        raise IndexError(f"order index i must be in 1..{M}, got {i}")


def _vectorize(fn, M, i, x):
    if np.ndim(x) == 0:
        return fn(M, i, float(x))
    x = np.asarray(x, dtype=float)
    return np.array([fn(M, i, float(v)) for v in x.ravel()]).reshape(x.shape)


def _pdf(M, i, x):
    if math.isinf(x):
        return 0.0
    p = norm_cdf(x)
    q = norm_cdf(-x)
    log_coef = math.log(M) + math.lgamma(M) - math.lgamma(i) - math.lgamma(M - i + 1)
    logs = log_coef - 0.5 * x * x - _LOG_SQRT_2PI
    if i > 1:
        if p == 0.0:
            return 0.0
        logs += (i - 1) * math.log(p)
    if M > i:
        if q == 0.0:
            return 0.0
        logs += (M - i) * math.log(q)
    return math.exp(logs)


def _cdf(M, i, x):
    return betainc(i, M - i + 1, norm_cdf(x))


def _sf(M, i, x):
    return betainc(M - i + 1, i, norm_cdf(-x))


def order_pdf(M: int, i: int, x):
    """Density of the i-th smallest of ``M`` standard normal draws."""
    _check(M, i)
    return _vectorize(_pdf, M, i, x)


def order_cdf(M: int, i: int, x):
    """``P(X_(i) <= x)`` for the i-th smallest of ``M`` standard normal draws."""
    _check(M, i)
    return _vectorize(_cdf, M, i, x)


def order_sf(M: int, i: int, x):
    """``1 - order_cdf(M, i, x)`` computed without cancellation."""
    _check(M, i)
    return _vectorize(_sf, M, i, x)


def order_quantile(M: int, i: int, p: float, tol: float = 1e-13) -> float:
    """``x`` with ``order_cdf(M, i, x) == p``, by bisection on a widening bracket."""
    _check(M, i)
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    lo, hi = -1.0, 1.0
    while _cdf(M, i, lo) > p:
        lo *= 2.0
    while _cdf(M, i, hi) < p:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _cdf(M, i, mid) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)
