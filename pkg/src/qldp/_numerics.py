"""Small one-dimensional numerical primitives used across the package."""

from __future__ import annotations

import math
from typing import Callable

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def golden_max(f: Callable[[float], float], a: float, b: float,
               tol: float = 1e-12, max_iter: int = 500) -> tuple[float, float]:
    """Maximise a unimodal ``f`` on ``[a, b]`` by golden-section search.

    Returns ``(x, f(x))`` for the best point seen. ``f`` is never evaluated at
    the endpoints, so it may be infinite or undefined there.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    c = a + INV_PHI2 * h
    d = a + INV_PHI * h
    fc = f(c)
    fd = f(d)
    for _ in range(max_iter):
        if h <= tol * max(1.0, abs(c)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            h = INV_PHI * h
            c = a + INV_PHI2 * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = INV_PHI * h
            d = a + INV_PHI * h
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def bisect_newton(f: Callable[[float], float], df: Callable[[float], float],
                  a: float, b: float, tol: float = 1e-15,
                  max_iter: int = 200) -> float:
    """Root of ``f`` in ``[a, b]`` (sign change required).

    Newton steps are taken while they stay inside the current bracket,
    otherwise the bracket is bisected.
    """
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0) == (fb > 0):
        raise ValueError("root not bracketed")
    x = 0.5 * (a + b)
    for _ in range(max_iter):
        fx = f(x)
        if fx == 0.0:
            return x
        if (fx > 0) == (fa > 0):
            a, fa = x, fx
        else:
            b = x
        d = df(x)
        step_ok = False
        if d != 0.0 and math.isfinite(d):
            xn = x - fx / d
            if a < xn < b:
                step_ok = True
        if not step_ok:
            xn = 0.5 * (a + b)
        if abs(xn - x) <= tol * max(1.0, abs(x)) or b - a <= tol * max(1.0, abs(x)):
            return xn
        x = xn
    return x


def bisect(f: Callable[[float], float], a: float, b: float,
           tol: float = 1e-12, max_iter: int = 300) -> float:
    fa = f(a)
    if (fa > 0) == (f(b) > 0):
        raise ValueError("root not bracketed")
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        if b - a <= tol:
            return m
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def second_derivative(f: Callable[[float], float], x: float,
                      h: float | None = None) -> float:
    """Central second difference with one Richardson extrapolation step."""
    if h is None:
        h = 1e-4 * max(1.0, abs(x))
    f0 = f(x)

    def d2(step):
        return (f(x + step) - 2.0 * f0 + f(x - step)) / (step * step)

    return (4.0 * d2(0.5 * h) - d2(h)) / 3.0


def first_derivative(f: Callable[[float], float], x: float,
                     h: float | None = None) -> float:
    if h is None:
        h = 1e-4 * max(1.0, abs(x))

    def d1(step):
        return (f(x + step) - f(x - step)) / (2.0 * step)

    return (4.0 * d1(0.5 * h) - d1(h)) / 3.0
