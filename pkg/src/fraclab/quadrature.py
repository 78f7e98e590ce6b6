"""Gauss rules, stable power integrals, and adaptive panel quadrature."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

from .errors import QuadratureError

__all__ = [
    "gauss_legendre",
    "gauss_legendre_01",
    "gauss_jacobi_01",
    "power_integral",
    "adaptive_panels",
]


@lru_cache(maxsize=64)
def gauss_legendre(order: int):
    """Gauss-Legendre nodes/weights on [-1, 1], cached."""
    x, w = leggauss(order)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


@lru_cache(maxsize=64)
def gauss_legendre_01(order: int):
    """Gauss-Legendre nodes/weights on [0, 1], cached."""
    x, w = leggauss(order)
    t = 0.5 * (x + 1.0)
    v = 0.5 * w
    t.flags.writeable = False
    v.flags.writeable = False
    return t, v

@lru_cache(maxsize=64)
def gauss_jacobi_01(order: int, expo: float):
    """Nodes/weights for int_0^1 t^expo f(t) dt with expo > -1, cached.

    The weights absorb the t^expo factor; only the smooth part f is
    evaluated at the returned nodes.
    """
    if expo <= -1.0:
        raise QuadratureError(f"Jacobi weight exponent {expo} <= -1 is not integrable")
    x, w = roots_jacobi(order, 0.0, expo)
    t = 0.5 * (x + 1.0)
    v = w * 0.5 ** (expo + 1.0)
    t.flags.writeable = False
    v.flags.writeable = False
    return t, v


def power_integral(lo, hi, m):
    """Stable  int_lo^hi w^m dw  for real m (including m near -1).

    ``lo`` may be 0 only when m > -1.  Vectorized over numpy arrays; all
    inputs must satisfy 0 <= lo < hi elementwise.
    """
    lo, hi, m = np.broadcast_arrays(
        np.asarray(lo, dtype=float), np.asarray(hi, dtype=float), np.asarray(m, dtype=float)
    )
    eps = m + 1.0
    zero_lo = lo == 0.0
    if np.any(zero_lo & (eps <= 0.0)):
        raise QuadratureError("power_integral from 0 needs exponent > -1")
    with np.errstate(divide="ignore", invalid="ignore"):
        safe_lo = np.where(zero_lo, 1.0, lo)
        ratio = np.log1p((hi - safe_lo) / safe_lo)  # log(hi/lo)
        safe_eps = np.where(eps == 0.0, 1.0, eps)
        # expm1(eps*log(hi/lo))/eps with the eps -> 0 (log) limit
        frac = np.where(eps != 0.0, np.expm1(eps * ratio) / safe_eps, ratio)
        general = safe_lo**eps * frac
        pos_eps = np.where(eps > 0.0, eps, 1.0)
        from_zero = hi**pos_eps / pos_eps
    out = np.where(zero_lo, from_zero, general)
    if out.ndim == 0:
        return float(out)
    return out


def adaptive_panels(f, panels, tol, max_depth=48, max_panels=2_000_000):
    """Adaptively integrate ``f`` over the given panels with embedded GL error.

    ``f`` must accept an ndarray and evaluate elementwise.  ``panels`` is a
    sequence of (a, b) with a < b.  Bisects panels whose embedded
    (GL10 vs GL20) error estimate exceeds their share of ``tol`` until the
    estimate is met; raises QuadratureError past ``max_depth`` levels or
    ``max_panels`` total panels.

    Returns (value, error_estimate).
    """
    a0 = np.asarray([p[0] for p in panels], dtype=float)
    b0 = np.asarray([p[1] for p in panels], dtype=float)
    total_len = float(np.sum(b0 - a0))
    if total_len <= 0.0:
        return 0.0, 0.0
    x10, w10 = gauss_legendre(10)
    x20, w20 = gauss_legendre(20)

    value = 0.0
    err = 0.0
    a, b = a0, b0
    depth = 0
    n_seen = a.size
    while a.size:
        if depth > max_depth:
            raise QuadratureError("adaptive quadrature: max depth exceeded")
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        nodes20 = mid[:, None] + half[:, None] * x20[None, :]
        nodes10 = mid[:, None] + half[:, None] * x10[None, :]
        f20 = f(nodes20)
        f10 = f(nodes10)
        i20 = half * (f20 @ w20)
        i10 = half * (f10 @ w10)
        e = np.abs(i20 - i10)
        budget = tol * (b - a) / total_len
        done = (e <= budget) | (half <= 1e-15 * np.maximum(np.abs(a), 1.0))
        value += float(np.sum(i20[done]))
        err += float(np.sum(e[done]))
        keep = ~done
        if not np.any(keep):
            break
        a_k, b_k, m_k = a[keep], b[keep], mid[keep]
        a = np.concatenate([a_k, m_k])
        b = np.concatenate([m_k, b_k])
        n_seen += a.size
        if n_seen > max_panels:
            raise QuadratureError("adaptive quadrature: panel cap exceeded")
        depth += 1
    return value, err
