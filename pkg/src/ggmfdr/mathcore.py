"""Scalar and small dense kernels shared by the rest of the package.

Everything here is a pure function of its inputs. Functions of a real
argument accept scalars or numpy arrays and return the same shape.
"""
from __future__ import annotations

import numpy as np
from scipy.special import ndtr

from .errors import DefinitenessError, DomainError, InsufficientDataError

# Rational seed for the normal quantile (P. J. Acklam), relative error ~1.2e-9.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549671010139431e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425
_INV_SQRT_2PI = 0.3989422804014327


def _scalar_or_array(values, like):
    return float(values) if np.ndim(like) == 0 else values


def gaussian_cdf(x):
    """Standard normal CDF, absolute error below 1e-12 everywhere."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("gaussian_cdf requires finite input")
    return _scalar_or_array(ndtr(arr), x)


def gaussian_pdf(x):
    arr = np.asarray(x, dtype=float)
    return _scalar_or_array(_INV_SQRT_2PI * np.exp(-0.5 * arr * arr), x)


def _lower_seed(p):
    # valid for 0 < p <= 0.5
    out = np.empty_like(p)
    tail = p < _P_LOW
    q = np.sqrt(-2.0 * np.log(p[tail]))
    c, d = _C, _D
    out[tail] = ((((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
                 / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0))
    mid = ~tail
    q = p[mid] - 0.5
    r = q * q
    a, b = _A, _B
    out[mid] = ((((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q
                / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0))
    return out


def gaussian_quantile(p, newton_steps=2):
    """Inverse of :func:`gaussian_cdf` on (0, 1).

    Rational seed followed by Newton refinement. The upper half is obtained
    by symmetry from ``1 - p``, which is exact in floating point for
    ``p >= 0.5``, so both tails keep full relative precision.
    """
    arr = np.asarray(p, dtype=float)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise DomainError("gaussian_quantile requires 0 < p < 1")
    flat = np.atleast_1d(arr).ravel()
    upper = flat > 0.5
    lower_p = np.where(upper, 1.0 - flat, flat)
    x = _lower_seed(lower_p)
    for _ in range(newton_steps):
        x = x - (ndtr(x) - lower_p) / (_INV_SQRT_2PI * np.exp(-0.5 * x * x))
    x = np.where(upper, -x, x)
    x[flat == 0.5] = 0.0
    return _scalar_or_array(x.reshape(np.shape(arr)), p)


def survival_double(t):
    """G(t) = 2 - 2 Phi(t), the two-sided standard normal tail, for t >= 0."""
    arr = np.asarray(t, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0.0):
        raise DomainError("survival_double is defined for t >= 0 only")
    return _scalar_or_array(2.0 * ndtr(-arr), t)


def survival_double_inverse(y):
    """Smallest t >= 0 with G(t) <= y; 0 when y >= 1."""
    arr = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.zeros_like(arr)
    inner = arr < 1.0
    if np.any(arr[inner] <= 0.0):
        raise DomainError("survival_double_inverse requires y > 0")
    if np.any(inner):
        out[inner] = -gaussian_quantile(arr[inner] / 2.0)
    return _scalar_or_array(out.reshape(np.shape(y)), y)


def cholesky(m):
    """Lower Cholesky factor of a symmetric matrix, no pivoting.

    Raises DefinitenessError carrying the 0-based index of the first
    non-positive pivot.
    """
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DomainError("cholesky requires a non-empty square matrix")
    if not np.array_equal(a, a.T):
        raise DomainError("cholesky requires an exactly symmetric matrix")
    dim = a.shape[0]
    lower = np.zeros_like(a)
    for k in range(dim):
        pivot = a[k, k] - lower[k, :k] @ lower[k, :k]
        if not pivot > 0.0:
            raise DefinitenessError(k)
        lower[k, k] = np.sqrt(pivot)
        if k + 1 < dim:
            lower[k + 1:, k] = (a[k + 1:, k] - lower[k + 1:, :k] @ lower[k, :k]) / lower[k, k]
    return lower


def center_and_covariance(x):
    """Column means and the sample covariance with divisor n."""
    data = np.asarray(x, dtype=float)
    if data.ndim != 2:
        raise DomainError("data must be a 2-d array (rows = observations)")
    n = data.shape[0]
    if n < 2:
        raise InsufficientDataError(f"need at least 2 observations, got {n}")
    means = data.mean(axis=0)
    centered = data - means
    cov = centered.T @ centered / n
    cov = 0.5 * (cov + cov.T)
    return means, cov
