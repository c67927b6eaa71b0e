"""Triangle representation, the normalised (U, M) chart and reference maps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DegenerateTriangle

DEGENERACY_TOL = 1e-12


def _exact(v):
    """Fraction for exact-looking input (int, Fraction, decimal string), else float."""
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v.strip())
    return float(v)


def _sq(v):
    return v * v


@dataclass(frozen=True)
class Triangle:
    """Triangle stored by its squared side lengths, ascending.

    ``scale`` is the factor the triangle was divided by during normalisation
    (1 for a triangle that was never normalised).  Squared sides are exact
    rationals when the input was rational.
    """

    sq: tuple
    scale: float = 1.0

    def __post_init__(self):
        if len(self.sq) != 3 or any(float(s) <= 0 for s in self.sq):
            raise DegenerateTriangle(f"side lengths must be positive, got {self.sq}")
        s = sorted(self.sq, key=float)
        object.__setattr__(self, "sq", tuple(s))
        a, b, c = (math.sqrt(float(x)) for x in s)
        if (a + b - c) / a <= DEGENERACY_TOL:
            raise DegenerateTriangle(f"sides {a}, {b}, {c} violate the triangle inequality")

    @classmethod
    def from_sides(cls, a, b, c) -> "Triangle":
        return cls(tuple(_sq(_exact(v)) for v in (a, b, c)))

    @classmethod
    def from_squared(cls, a2, b2, c2) -> "Triangle":
        return cls((a2, b2, c2))

    @classmethod
    def from_vertices(cls, p, q, r) -> "Triangle":
        pts = [tuple(_exact(c) for c in pt) for pt in (p, q, r)]

        def d2(u, w):
            return _sq(u[0] - w[0]) + _sq(u[1] - w[1])

        return cls((d2(pts[0], pts[1]), d2(pts[1], pts[2]), d2(pts[0], pts[2])))

    @classmethod
    def from_um(cls, U: float, M: float) -> "Triangle":
        """Normalised triangle with sides 1, M, M + U."""
        return cls((1.0, M * M, (M + U) ** 2))

    @property
    def sides(self) -> tuple:
        return tuple(math.sqrt(float(x)) for x in self.sq)

    @property
    def is_normalized(self) -> bool:
        return self.sq[0] == 1

    # (U, M) chart of the normalised shape
    @property
    def M(self) -> float:
        return math.sqrt(float(self.sq[1]) / float(self.sq[0]))

    @property
    def N(self) -> float:
        return math.sqrt(float(self.sq[2]) / float(self.sq[0]))

    @property
    def U(self) -> float:
        return self.N - self.M

    def scaled(self, s: float) -> "Triangle":
        s2 = _sq(_exact(s)) if not isinstance(s, float) else s * s
        return Triangle(tuple(x * s2 for x in self.sq), self.scale)

    def __str__(self):
        return "Triangle(sides={:.6g}, {:.6g}, {:.6g})".format(*self.sides)


def normalize(t: Triangle) -> Triangle:
    """Similar triangle with shortest side 1; ``scale`` records the divisor."""
    s0 = t.sq[0]
    if s0 == 1:
        return t
    sq = tuple(x / s0 for x in t.sq)
    return Triangle(sq, t.scale * math.sqrt(float(s0)))


def parse_sides(text: str) -> Triangle:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != 3:
        raise ValueError(f"expected three comma-separated sides, got {text!r}")
    return Triangle.from_sides(*parts)


def parse_vertices(text: str) -> Triangle:
    pts = [p for p in text.replace(" ", "").split(";") if p]
    if len(pts) != 3:
        raise ValueError(f"expected three ';'-separated vertices, got {text!r}")
    coords = []
    for p in pts:
        xy = p.split(",")
        if len(xy) != 2:
            raise ValueError(f"bad vertex {p!r}")
        coords.append(xy)
    return Triangle.from_vertices(*coords)


@dataclass(frozen=True)
class TriangleMetrics:
    area: float
    diameter: float
    perimeter: float
    inradius: float
    h_min: float
    H_max: float
    gamma: float
    acute: bool
    sides: tuple
    vertices: tuple = field(repr=False)

    @property
    def u(self) -> float:
        return self.vertices[2][0]

    @property
    def v(self) -> float:
        return self.vertices[2][1]


def metrics(t: Triangle) -> TriangleMetrics:
    a, b, c = t.sides
    # Kahan's stable Heron formula, a <= b <= c
    area = 0.25 * math.sqrt((c + (b + a)) * (a - (c - b)) * (a + (c - b)) * (c + (b - a)))
    L = a + b + c
    # placement: shortest side on the x-axis, middle side from the origin
    u = (a * a + b * b - c * c) / (2 * a)
    v = 2 * area / a
    gamma = math.acos(max(-1.0, min(1.0, (b * b + c * c - a * a) / (2 * b * c))))
    return TriangleMetrics(
        area=area,
        diameter=c,
        perimeter=L,
        inradius=2 * area / L,
        h_min=2 * area / c,
        H_max=2 * area / a,
        gamma=gamma,
        acute=float(t.sq[2]) < float(t.sq[0]) + float(t.sq[1]),
        sides=(a, b, c),
        vertices=((0.0, 0.0), (a, 0.0), (u, v)),
    )


# ---------------------------------------------------------------------------
# maps onto reference triangles

@dataclass(frozen=True)
class LinearMap:
    """Affine map p -> J p + shift; K = J J^T."""

    J: np.ndarray
    shift: np.ndarray

    @property
    def K(self) -> np.ndarray:
        return self.J @ self.J.T

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.J))

    def __call__(self, p):
        return self.J @ np.asarray(p, dtype=float) + self.shift


def placement(t: Triangle, base: str = "short") -> tuple:
    """(u, v) of the apex when the chosen side lies on [0,1] x {0}.

    ``base='short'``: shortest side on the axis, middle side from the origin
    (normalised sides 1, M, N).  ``base='long'``: longest side on the axis,
    shortest side from the origin (sides 1, 1/N, M/N), the layout used for the
    near-equilateral wide case.
    """
    n = normalize(t)
    M2, N2 = float(n.sq[1]), float(n.sq[2])
    if base == "short":
        m2, n2 = M2, N2
    elif base == "long":
        m2, n2 = 1.0 / N2, M2 / N2
    else:
        raise ValueError(base)
    u = (1 + m2 - n2) / 2
    v2 = m2 - u * u
    if v2 <= 0:
        raise DegenerateTriangle("apex on the base line")
    return u, math.sqrt(v2)


def affine_onto(u: float, v: float, targets) -> LinearMap:
    """Affine map sending (0,0), (1,0), (u,v) to the three target points."""
    if v <= 0:
        raise DegenerateTriangle("v must be positive")
    w0, w1, w2 = (np.asarray(p, dtype=float) for p in targets)
    d1, d2 = w1 - w0, w2 - w0
    J = np.column_stack([d1, (d2 - u * d1) / v])
    return LinearMap(J, w0)


def map_to_reference(t: Triangle, ref, base: str = "short") -> LinearMap:
    """Map from the placed triangle (0,0), (1,0), (u,v) onto ``ref``."""
    u, v = placement(t, base)
    return affine_onto(u, v, ref.float_vertices())
