"""Bessel functions J_v of real order and their first two positive zeros.

J_v is evaluated from the real-order integral representation

    J_v(x) = 1/pi * int_0^pi cos(v*th - x*sin th) dth
             - sin(v*pi)/pi * int_0^inf exp(-v*t - x*sinh t) dt

with composite Gauss-Legendre panels, doubled until two successive estimates
agree.  Zeros are bracketed by the Qu-Wong inequalities and refined by
bisection followed by a secant polish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BracketFailure, ConvergenceError, UnsupportedOrder

# first two zeros of the Airy function Ai
AIRY_ZEROS = (-2.338107410, -4.087949444)

MAX_ORDER = 200.0
MAX_ARG = 500.0

_CBRT2 = 2.0 ** (1.0 / 3.0)
_PANEL_TOL = 1e-13
_MAX_PANELS = 1 << 14
_NODES = 20


@lru_cache(maxsize=None)
def _rule(n: int = _NODES):
    return np.polynomial.legendre.leggauss(n)


def _composite(f, a: float, b: float, panels: int) -> float:
    x, w = _rule()
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = mid[:, None] + half[:, None] * x[None, :]
    return float(np.sum(f(pts) * w[None, :] * half[:, None]))


def integrate(f, a: float, b: float, start: int = 4, tol: float = _PANEL_TOL) -> float:
    """Composite Gauss-Legendre quadrature with panel doubling."""
    n = start
    prev = _composite(f, a, b, n)
    while n < _MAX_PANELS:
        n *= 2
        cur = _composite(f, a, b, n)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise ConvergenceError("panel doubling did not converge", abs(cur - prev))


def _tail_cutoff(v: float, x: float) -> float:
    # smallest t with v t + x sinh t >= ln(1e18)
    target = 18 * math.log(10)
    lo, hi = 0.0, 1.0
    while v * hi + x * math.sinh(hi) < target:
        hi *= 2
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if v * mid + x * math.sinh(mid) < target:
            lo = mid
        else:
            hi = mid
    return hi


def eval_j(v: float, x: float) -> float:
    """J_v(x) for 0 <= v <= 200 and 0 < x <= 500."""
    if not (0 <= v <= MAX_ORDER) or not (0 < x <= MAX_ARG):
        raise UnsupportedOrder(f"J_v(x) outside the supported envelope: v={v}, x={x}")
    # enough panels up front to resolve the oscillation count
    start = max(4, int((v + x) / 8) + 1)
    first = integrate(lambda th: np.cos(v * th - x * np.sin(th)), 0.0, math.pi, start) / math.pi
    s = math.sin(v * math.pi)
    if v == int(v) or abs(s) < 1e-300:
        return first
    T = _tail_cutoff(v, x)
    second = integrate(lambda t: np.exp(-v * t - x * np.sinh(t)), 0.0, T)
    return first - s / math.pi * second


def quwong_bracket(v: float, k: int = 1) -> tuple[float, float]:
    """Qu-Wong enclosure of j_{v,k} for k in {1, 2}."""
    if k not in (1, 2):
        raise UnsupportedOrder("only the first two zeros are supported")
    if v <= 0:
        raise UnsupportedOrder("order must be positive")
    a = AIRY_ZEROS[k - 1]
    cv = v ** (1.0 / 3.0)
    lo = v - a / _CBRT2 * cv
    hi = lo + 0.15 * a * a * _CBRT2 / cv
    return lo, hi


@dataclass(frozen=True)
class BesselZero:
    order: float
    index: int
    bracket: tuple
    value: float
    residual: float


def _refine(v: float, lo: float, hi: float) -> float:
    flo, fhi = eval_j(v, lo), eval_j(v, hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise BracketFailure(f"no sign change of J_{v} on [{lo}, {hi}]")
    for _ in range(200):
        if hi - lo < 1e-9 * max(1.0, hi):
            break
        mid = 0.5 * (lo + hi)
        fm = eval_j(v, mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    # secant polish, kept inside the bracket
    x0, x1, f0, f1 = lo, hi, flo, fhi
    for _ in range(8):
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not (lo <= x2 <= hi):
            break
        x0, f0 = x1, f1
        x1, f1 = x2, eval_j(v, x2)
        if abs(x1 - x0) < 1e-15 * x1 or f1 == 0:
            break
    return x1 if abs(f1) <= abs(f0) else x0


@lru_cache(maxsize=4096)
def zero(v: float, k: int = 1) -> BesselZero:
    """k-th positive zero of J_v, refined inside the Qu-Wong bracket."""
    lo, hi = quwong_bracket(v, k)
    if hi > MAX_ARG:
        raise UnsupportedOrder(f"zero of J_{v} beyond the supported envelope")
    search_lo = lo
    if k == 2:
        # for small orders the second bracket can reach below j_{v,1}
        j1 = zero(v, 1).value
        search_lo = max(lo, j1 * (1 + 1e-9) + 1e-9)
    val = _refine(v, search_lo, hi)
    res = abs(eval_j(v, val))
    if res >= 1e-10 * max(1.0, val):
        raise BracketFailure(f"zero of J_{v} refined only to residual {res:g}")
    return BesselZero(float(v), k, (lo, hi), val, res)
