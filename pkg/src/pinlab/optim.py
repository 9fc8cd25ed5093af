"""Scalar optimization primitives: slope bisection and golden-section search.

Convex conjugates throughout the package are computed by bisecting the
(increasing) derivative of the log moment generating function; the bisection
stops at interval width 1e-12, which leaves the conjugate values accurate far
beyond the 1e-6 the downstream critical-point solvers need.
"""

from __future__ import annotations

import math
from typing import Callable

SLOPE_XTOL = 1e-12
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def bisect_slope(target: float, slope: Callable[[float], float],
                 lo: float, hi: float, xtol: float = SLOPE_XTOL) -> float:
    """Root of ``slope(x) == target`` for increasing slope, slope(lo) <= target <= slope(hi)."""
    for _ in range(300):
        if hi - lo <= max(xtol, 4e-16 * max(abs(lo), abs(hi))):
            break
        mid = 0.5 * (lo + hi)
        if slope(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def maximize_scalar(f: Callable[[float], float], lo: float, hi: float,
                    xtol: float = 1e-10) -> tuple[float, float]:
    """Golden-section maximum of a concave (unimodal) f on [lo, hi].

    Returns (argmax, max); endpoints are always candidates.
    """
    if hi < lo:
        raise ValueError("empty interval")
    best_x, best_f = lo, f(lo)
    if hi > lo:
        fhi = f(hi)
        if fhi > best_f:
            best_x, best_f = hi, fhi
        a, b = lo, hi
        x1 = b - _GOLDEN * (b - a)
        x2 = a + _GOLDEN * (b - a)
        f1, f2 = f(x1), f(x2)
        for _ in range(300):
            if b - a <= xtol:
                break
            if f1 < f2:
                a, x1, f1 = x1, x2, f2
                x2 = a + _GOLDEN * (b - a)
                f2 = f(x2)
            else:
                b, x2, f2 = x2, x1, f1
                x1 = b - _GOLDEN * (b - a)
                f1 = f(x1)
        for x, fx in ((x1, f1), (x2, f2)):
            if fx > best_f:
                best_x, best_f = x, fx
    return best_x, best_f


def minimize_scalar(f: Callable[[float], float], lo: float, hi: float,
                    xtol: float = 1e-10) -> tuple[float, float]:
    """Golden-section minimum of a convex (unimodal) f on [lo, hi]."""
    x, fx = maximize_scalar(lambda t: -f(t), lo, hi, xtol=xtol)
    return x, -fx
