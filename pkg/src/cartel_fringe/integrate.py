"""Numerical integration helpers shared by the payoff evaluators and the oracle."""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence

import numpy as np
from scipy import integrate


def quadrature(
    f: Callable[[float], float],
    t0: float,
    t1: float,
    rel_tol: float = 1e-10,
    points: Sequence[float] | None = None,
) -> float:
    """Adaptive Gauss-Kronrod quadrature of ``f`` over ``[t0, t1]``.

    Args:
        f: Scalar integrand.
        t0: Lower limit.
        t1: Upper limit. ``t1 == t0`` gives 0.
        rel_tol: Target relative error.
        points: Interior breakpoints where ``f`` has kinks or jumps.

    Returns:
        The integral estimate.
    """
    if t1 == t0:
        return 0.0
    if t1 < t0:
        raise ValueError(f"need t0 <= t1, got [{t0}, {t1}]")
    inner = None
    if points:
        inner = [x for x in points if t0 < x < t1] or None
    value, _ = integrate.quad(f, t0, t1, epsabs=0.0, epsrel=rel_tol, limit=200, points=inner)
    return float(value)


def _exp_moments(h: np.ndarray, r: float) -> tuple[np.ndarray, np.ndarray]:
    """``int_0^h e^{-r s} ds`` and ``int_0^h s e^{-r s} ds`` for each width ``h``."""
    x = r * h
    small = np.abs(x) < 1e-3
    xs = np.where(small, x, 0.0)
    xl = np.where(small, 1.0, x)
    # series in x keep full precision where the closed forms cancel
    m0 = np.where(small, 1 - xs / 2 + xs**2 / 6 - xs**3 / 24 + xs**4 / 120, -np.expm1(-xl) / xl)
    m1 = np.where(
        small,
        0.5 - xs / 3 + xs**2 / 8 - xs**3 / 30 + xs**4 / 144,
        (-np.expm1(-xl) - xl * np.exp(-xl)) / (xl * xl),
    )
    return h * m0, h * h * m1


def discounted_trapezoid(t, y, r: float) -> float:
    """Exact integral of ``e^{-r t} y(t)`` for piecewise-linear ``y``.

    ``y`` is linearly interpolated between samples; the exponential weight is
    integrated exactly on each segment. Repeated times (zero-length segments)
    are allowed so that series with left and right limits at a jump can be
    passed as sampled.

    Args:
        t: Non-decreasing sample times.
        y: Sample values, same shape as ``t``.
        r: Discount rate, may be zero.

    Returns:
        The discounted integral.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.shape != y.shape or t.ndim != 1:
        raise ValueError("t and y must be 1-D arrays of equal length")
    if t.size < 2:
        return 0.0
    h = np.diff(t)
    if np.any(h < 0):
        raise ValueError("sample times must be non-decreasing")
    e0, e1 = _exp_moments(h, r)
    y0 = y[:-1]
    slope = np.divide(np.diff(y), h, out=np.zeros_like(h), where=h > 0)
    seg = np.exp(-r * t[:-1]) * (y0 * e0 + slope * e1)
    return float(math.fsum(seg))
