"""Closed-form lower bounds for the first Dirichlet eigenvalue of a triangle."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .geometry import TriangleMetrics

PI2 = math.pi ** 2

METHOD_ORDER = ("Polya", "Protter", "Freitas", "RectThm", "SectorThm", "SectorContaining")
DEFAULT_METHODS = frozenset(METHOD_ORDER[:5])


@dataclass(frozen=True)
class BoundResult:
    value: float
    method: str
    direction: str = "lower"
    tight: str = ""     # inputs for which the bound is attained, if any

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, d: dict) -> "BoundResult":
        return cls(float(d["value"]), d["method"], d.get("direction", "lower"), d.get("tight", ""))


def polya(m: TriangleMetrics) -> BoundResult:
    """Area bound; equality for the equilateral triangle."""
    return BoundResult(4 * math.sqrt(3) * PI2 / (3 * m.area), "Polya", tight="equilateral")


def protter(m: TriangleMetrics) -> BoundResult:
    return BoundResult(PI2 / 4 * (m.inradius ** -2 + m.diameter ** -2), "Protter")


def freitas(m: TriangleMetrics) -> BoundResult:
    d2 = m.diameter ** 2
    return BoundResult(PI2 * (4 / d2 + d2 / (4 * m.area ** 2)), "Freitas", tight="equilateral")


def rect_bound(m: TriangleMetrics) -> BoundResult:
    s = m.diameter ** 2 + m.h_min ** 2
    return BoundResult(PI2 * (4 / s + s / (4 * m.area ** 2)), "RectThm")


def _jsq(gamma: float) -> float:
    from .bessel import zero

    return zero(math.pi / gamma, 1).value ** 2


def sector_bound(m: TriangleMetrics) -> BoundResult:
    """Sector of the same area whose angle is the smallest angle."""
    return BoundResult(_jsq(m.gamma) * m.gamma / (2 * m.area), "SectorThm")


def sector_containing_bound(m: TriangleMetrics) -> BoundResult:
    """Smallest sector around the smallest angle that contains the triangle."""
    return BoundResult(_jsq(m.gamma) / m.diameter ** 2, "SectorContaining")


_FUNCS = {
    "Polya": polya,
    "Protter": protter,
    "Freitas": freitas,
    "RectThm": rect_bound,
    "SectorThm": sector_bound,
    "SectorContaining": sector_containing_bound,
}


def compute(m: TriangleMetrics, method: str) -> BoundResult:
    return _FUNCS[method](m)


def all_bounds(m: TriangleMetrics, methods=METHOD_ORDER) -> list[BoundResult]:
    return [_FUNCS[k](m) for k in METHOD_ORDER if k in methods]


def best_lower(m: TriangleMetrics, methods=None, *, use_bessel: bool = True) -> BoundResult:
    """Largest of the requested bounds; ties go to the earlier method."""
    if methods is None:
        methods = DEFAULT_METHODS
    if not use_bessel:
        methods = {k for k in methods if not k.startswith("Sector")}
    best = None
    for r in all_bounds(m, methods):
        # values equal up to rounding count as a tie
        if best is None or r.value > best.value * (1 + 1e-12):
            best = r
    if best is None:
        raise ValueError("no bound methods requested")
    return best


def crossover_predicate(m: TriangleMetrics) -> bool:
    """True when the diameter bound beats the area bound, i.e. d > 2*sqrt(3)*h."""
    return m.diameter > 2 * math.sqrt(3) * m.h_min
