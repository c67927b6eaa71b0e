"""Exact calculus for trigonometric polynomials on reference triangles.

A :class:`TrigPoly` is a finite sum ``c * sin(pi*(a*x + b*y + d))`` /
``c * cos(pi*(a*x + b*y + d))``.  Argument coefficients ``a, b, d`` are
:class:`~trispec.exact.Surd` values (the factor pi is implicit), coefficients
``c`` are :class:`~trispec.exact.Scalar` values.  Products are linearised with
the product-to-sum identities, so every polynomial stays a flat sum of single
sines and cosines and can be integrated in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import ExactFieldError
from .exact import ONE, SQRT3, ZERO, Scalar, Surd, cos_pi, sin_pi

SIN, COS = "sin", "cos"

_HALF = Fraction(1, 2)


@dataclass(frozen=True)
class Arg:
    """Affine argument ``pi*(ax*x + ay*y + c)``."""

    ax: Surd
    ay: Surd
    c: Surd

    def __add__(self, o):
        return Arg(self.ax + o.ax, self.ay + o.ay, self.c + o.c)

    def __sub__(self, o):
        return Arg(self.ax - o.ax, self.ay - o.ay, self.c - o.c)

    def __neg__(self):
        return Arg(-self.ax, -self.ay, -self.c)

    def scale(self, k) -> "Arg":
        return Arg(self.ax * k, self.ay * k, self.c * k)

    def is_constant(self) -> bool:
        return self.ax.is_zero() and self.ay.is_zero()

    def value(self, x, y):
        return float(self.ax) * x + float(self.ay) * y + float(self.c)


def arg(ax=0, ay=0, c=0) -> Arg:
    return Arg(Surd.coerce(ax), Surd.coerce(ay), Surd.coerce(c))


def _canonical(kind, a: Arg, coef: Scalar):
    """Normal form of one term; returns (key, coef) or None for a zero term."""
    if a.is_constant():
        try:
            val = sin_pi(a.c) if kind == SIN else cos_pi(a.c)
        except ExactFieldError:
            pass
        else:
            if val.is_zero():
                return None
            return (COS, arg()), coef * Scalar.coerce(val)
        lead = a.c
    else:
        lead = a.ax if not a.ax.is_zero() else a.ay
    if lead.sign() < 0:
        a = -a
        if kind == SIN:
            coef = -coef
    p = a.c.parts
    r = p[0] % 2
    if r != p[0]:
        a = Arg(a.ax, a.ay, Surd(r, p[1], p[2], p[3]))
    if a.is_constant() and a.c.is_zero() and kind == SIN:
        return None
    return (kind, a), coef


class TrigPoly:
    """Canonical sum of sine/cosine terms with exact coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict = {}
        if terms:
            for (kind, a), c in terms:
                self._accumulate(kind, a, Scalar.coerce(c))

    def _accumulate(self, kind, a, coef):
        if coef.is_zero():
            return
        res = _canonical(kind, a, coef)
        if res is None:
            return
        key, coef = res
        if key in self.terms:
            tot = self.terms[key] + coef
            if tot.is_zero():
                del self.terms[key]
            else:
                self.terms[key] = tot
        else:
            self.terms[key] = coef

    @classmethod
    def const(cls, c) -> "TrigPoly":
        return cls([((COS, arg()), c)])

    @classmethod
    def sin(cls, a: Arg, coef=1) -> "TrigPoly":
        return cls([((SIN, a), coef)])

    @classmethod
    def cos(cls, a: Arg, coef=1) -> "TrigPoly":
        return cls([((COS, a), coef)])

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def __add__(self, other):
        out = TrigPoly()
        out.terms = dict(self.terms)
        for (kind, a), c in other.terms.items():
            out._accumulate(kind, a, c)
        return out

    def __neg__(self):
        out = TrigPoly()
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k) -> "TrigPoly":
        k = Scalar.coerce(k)
        out = TrigPoly()
        if not k.is_zero():
            out.terms = {key: c * k for key, c in self.terms.items()}
        return out

    def __mul__(self, other):
        if not isinstance(other, TrigPoly):
            return self.scale(other)
        return product_to_sum(self, other)

    __rmul__ = __mul__

    def __call__(self, x, y):
        tot = 0.0
        for (kind, a), c in self.terms.items():
            th = mpmath.pi * a.value(x, y) if isinstance(x, mpmath.mpf) else 3.141592653589793 * a.value(x, y)
            f = mpmath.sin(th) if kind == SIN else mpmath.cos(th)
            tot += float(c) * float(f)
        return tot

    def evaluate_mp(self, x, y):
        tot = mpmath.mpf(0)
        for (kind, a), c in self.terms.items():
            th = mpmath.pi * (a.ax.to_mpf() * x + a.ay.to_mpf() * y + a.c.to_mpf())
            f = mpmath.sin(th) if kind == SIN else mpmath.cos(th)
            tot += c.to_mpf() * f
        return tot

    def compose(self, mat, shift=(0, 0)) -> "TrigPoly":
        """Return ``w -> self(mat @ w + shift)``; entries exact (Surd/rational)."""
        (m11, m12), (m21, m22) = [[Surd.coerce(v) for v in row] for row in mat]
        s1, s2 = Surd.coerce(shift[0]), Surd.coerce(shift[1])
        out = TrigPoly()
        for (kind, a), c in self.terms.items():
            na = Arg(a.ax * m11 + a.ay * m21, a.ax * m12 + a.ay * m22,
                     a.c + a.ax * s1 + a.ay * s2)
            out._accumulate(kind, na, c)
        return out

    def __repr__(self):
        parts = [f"[{c}]·{kind}(π({a.ax}·x + {a.ay}·y + {a.c}))" for (kind, a), c in self.terms.items()]
        return " + ".join(parts) if parts else "0"


def product_to_sum(p: TrigPoly, q: TrigPoly) -> TrigPoly:
    out = TrigPoly()
    half = Scalar.coerce(_HALF)
    for (k1, a1), c1 in p.terms.items():
        for (k2, a2), c2 in q.terms.items():
            c = c1 * c2 * half
            if k1 == SIN and k2 == SIN:
                out._accumulate(COS, a1 - a2, c)
                out._accumulate(COS, a1 + a2, -c)
            elif k1 == COS and k2 == COS:
                out._accumulate(COS, a1 - a2, c)
                out._accumulate(COS, a1 + a2, c)
            elif k1 == SIN:
                out._accumulate(SIN, a1 + a2, c)
                out._accumulate(SIN, a1 - a2, c)
            else:
                out._accumulate(SIN, a2 + a1, c)
                out._accumulate(SIN, a2 - a1, c)
    return out


def partial(p: TrigPoly, var: str) -> TrigPoly:
    """Exact partial derivative in ``x`` or ``y``."""
    if var not in ("x", "y"):
        raise ValueError("var must be 'x' or 'y'")
    pi = Scalar.pi_power(1)
    out = TrigPoly()
    for (kind, a), c in p.terms.items():
        w = a.ax if var == "x" else a.ay
        if w.is_zero():
            continue
        k = c * pi * Scalar.coerce(w)
        if kind == SIN:
            out._accumulate(COS, a, k)
        else:
            out._accumulate(SIN, a, -k)
    return out


def gradient(p: TrigPoly):
    return partial(p, "x"), partial(p, "y")


# --------------------------------------------------------------------------
# reference triangles


@dataclass(frozen=True)
class Piece:
    """Region x0 <= x <= x1, lo(x) <= y <= hi(x) with affine lo/hi = (slope, offset)."""

    x0: Surd
    x1: Surd
    lo: tuple
    hi: tuple


@dataclass(frozen=True)
class ReferenceTriangle:
    name: str
    vertices: tuple  # exact (Surd, Surd) pairs
    pieces: tuple

    def float_vertices(self):
        return [(float(x), float(y)) for x, y in self.vertices]

    @property
    def area(self) -> Surd:
        (x0, y0), (x1, y1), (x2, y2) = self.vertices
        return ((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)) * _HALF


def _s(v):
    return Surd.coerce(v)


_H = Surd(_HALF)
_R3_2 = SQRT3 * _HALF

EQUILATERAL = ReferenceTriangle(
    "equilateral",
    ((ZERO, ZERO), (ONE, ZERO), (_H, _R3_2)),
    (
        Piece(ZERO, _H, (ZERO, ZERO), (SQRT3, ZERO)),
        Piece(_H, ONE, (ZERO, ZERO), (-SQRT3, SQRT3)),
    ),
)

# right half of the equilateral triangle: right angle at (1/2, 0), 30 degrees at the apex
HALF_EQUILATERAL = ReferenceTriangle(
    "half_equilateral",
    ((_H, ZERO), (ONE, ZERO), (_H, _R3_2)),
    (Piece(_H, ONE, (ZERO, ZERO), (-SQRT3, SQRT3)),),
)

RIGHT_ISOSCELES = ReferenceTriangle(
    "right_isosceles",
    ((ZERO, ZERO), (ONE, ZERO), (ZERO, ONE)),
    (Piece(ZERO, ONE, (ZERO, ZERO), (-ONE, ONE)),),
)

REFERENCES = {r.name: r for r in (EQUILATERAL, HALF_EQUILATERAL, RIGHT_ISOSCELES)}


# --------------------------------------------------------------------------
# integration

def _trig_at(kind, r: Surd):
    return sin_pi(r) if kind == SIN else cos_pi(r)


def _power(x: Surd, n: int) -> Surd:
    out = ONE
    for _ in range(n):
        out = out * x
    return out


def _outer(kind, k, alpha: Surd, delta: Surd, x0: Surd, x1: Surd) -> Scalar:
    """Exact value of  int_{x0}^{x1} x^k trig(pi*(alpha*x + delta)) dx."""
    if alpha.is_zero():
        val = _trig_at(kind, delta)
        return Scalar.coerce(val * (_power(x1, k + 1) - _power(x0, k + 1)) / (k + 1))
    omega = Scalar.pi_power(1, alpha)
    # int x^k cos = x^k sin/w - k/w int x^{k-1} sin ; int x^k sin = -x^k cos/w + k/w int x^{k-1} cos
    if kind == COS:
        edge = Scalar.coerce(_power(x1, k) * sin_pi(alpha * x1 + delta)
                             - _power(x0, k) * sin_pi(alpha * x0 + delta))
        res = edge / omega
        if k:
            res = res - _outer(SIN, k - 1, alpha, delta, x0, x1) * k / omega
        return res
    edge = Scalar.coerce(_power(x1, k) * cos_pi(alpha * x1 + delta)
                         - _power(x0, k) * cos_pi(alpha * x0 + delta))
    res = -edge / omega
    if k:
        res = res + _outer(COS, k - 1, alpha, delta, x0, x1) * k / omega
    return res


def _integrate_term(kind, a: Arg, piece: Piece) -> Scalar:
    (ml, cl), (mh, ch) = piece.lo, piece.hi
    if a.ay.is_zero():
        # trig(pi(ax x + c)) * (hi(x) - lo(x))
        dm, dc = mh - ml, ch - cl
        tot = Scalar()
        if not dm.is_zero():
            tot = tot + _outer(kind, 1, a.ax, a.c, piece.x0, piece.x1) * Scalar.coerce(dm)
        if not dc.is_zero():
            tot = tot + _outer(kind, 0, a.ax, a.c, piece.x0, piece.x1) * Scalar.coerce(dc)
        return tot
    beta = Scalar.pi_power(1, a.ay)
    # antiderivative in y: cos -> sin/beta, sin -> -cos/beta
    nkind = SIN if kind == COS else COS
    sgn = 1 if kind == COS else -1
    up = _outer(nkind, 0, a.ax + a.ay * mh, a.c + a.ay * ch, piece.x0, piece.x1)
    dn = _outer(nkind, 0, a.ax + a.ay * ml, a.c + a.ay * cl, piece.x0, piece.x1)
    return (up - dn) * sgn / beta


def integrate_triangle(p: TrigPoly, ref: ReferenceTriangle, *, fallback: bool = False):
    """Exact integral of ``p`` over ``ref``.

    Returns a :class:`Scalar`.  When some boundary evaluation leaves the exact
    table an :class:`ExactFieldError` is raised, unless ``fallback`` is set, in
    which case a 50-digit :class:`mpmath.mpf` is returned instead.
    """
    try:
        tot = Scalar()
        for (kind, a), c in p.terms.items():
            for piece in ref.pieces:
                tot = tot + c * _integrate_term(kind, a, piece)
        return tot
    except ExactFieldError:
        if not fallback:
            raise
    with mpmath.workdps(50):
        return _integrate_numeric(p, ref)


def _integrate_numeric(p: TrigPoly, ref: ReferenceTriangle):
    tot = mpmath.mpf(0)
    for piece in ref.pieces:
        x0, x1 = piece.x0.to_mpf(), piece.x1.to_mpf()
        (ml, cl), (mh, ch) = [(m.to_mpf(), c.to_mpf()) for m, c in (piece.lo, piece.hi)]
        tot += mpmath.quad(
            lambda x: mpmath.quad(lambda y: p.evaluate_mp(x, y), [ml * x + cl, mh * x + ch]),
            [x0, x1],
        )
    return tot


# --------------------------------------------------------------------------
# Gram sets

@dataclass(frozen=True)
class GramSet:
    """Mass and gradient Gram entries of a function pair over a reference triangle.

    ``grad[p][q] = int d_p f * d_q g`` with p, q in (x, y).
    """

    mass: Scalar
    grad: tuple

    def encode(self) -> dict:
        return {
            "mass": self.mass.encode(),
            "grad": [[g.encode() for g in row] for row in self.grad],
        }

    @classmethod
    def decode(cls, d: dict) -> "GramSet":
        return cls(Scalar.decode(d["mass"]),
                   tuple(tuple(Scalar.decode(g) for g in row) for row in d["grad"]))

    def trace(self) -> Scalar:
        return self.grad[0][0] + self.grad[1][1]


def gram(f: TrigPoly, g: TrigPoly, ref: ReferenceTriangle) -> GramSet:
    mass = integrate_triangle(f * g, ref)
    df, dg = gradient(f), gradient(g)
    grad = tuple(tuple(integrate_triangle(df[p] * dg[q], ref) for q in range(2)) for p in range(2))
    return GramSet(mass, grad)


# --------------------------------------------------------------------------
# catalogue of exact eigenfunctions

_ZARG = arg(Fraction(2, 3), 0, Fraction(-1, 3))           # z / pi
_TARG = arg(0, SQRT3 * Fraction(-2, 3), 1)                 # t / pi


def _sz(k):
    return TrigPoly.sin(_ZARG.scale(k))


def _cz(k):
    return TrigPoly.cos(_ZARG.scale(k))


def _st(k):
    return TrigPoly.sin(_TARG.scale(k))


def _ct(k):
    return TrigPoly.cos(_TARG.scale(k))


def _sx(k):
    return TrigPoly.sin(arg(k, 0, 0))


def _sy(k):
    return TrigPoly.sin(arg(0, k, 0))


def phi_s11() -> TrigPoly:
    return (_cz(3) - _ct(1)) * _st(1)


def phi_s21() -> TrigPoly:
    return _cz(4) * _st(2) + _cz(5) * _st(1) - _cz(1) * _st(3)


def phi_a21() -> TrigPoly:
    # sign pattern (+, -, -): the only one vanishing on all three edges
    return _sz(4) * _st(2) - _sz(5) * _st(1) - _sz(1) * _st(3)


def phi_a31() -> TrigPoly:
    return _sz(5) * _st(3) - _sz(2) * _st(4) - _sz(7) * _st(1)


def rip_1() -> TrigPoly:
    """First eigenfunction of the right isosceles triangle (0,0),(1,0),(0,1)."""
    return _sx(2) * _sy(1) + _sx(1) * _sy(2)


def rip_2() -> TrigPoly:
    return _sx(3) * _sy(1) - _sx(1) * _sy(3)


@dataclass(frozen=True)
class Eigenfunction:
    name: str
    build: object
    reference: ReferenceTriangle
    eigenvalue: Scalar  # on the reference triangle


_PI2 = lambda q: Scalar.pi_power(2, Fraction(q))

CATALOG = {
    "phi_S11": Eigenfunction("phi_S11", phi_s11, EQUILATERAL, _PI2(Fraction(16, 3))),
    "phi_S21": Eigenfunction("phi_S21", phi_s21, EQUILATERAL, _PI2(Fraction(112, 9))),
    "phi_A21": Eigenfunction("phi_A21", phi_a21, EQUILATERAL, _PI2(Fraction(112, 9))),
    "phi_A31": Eigenfunction("phi_A31", phi_a31, EQUILATERAL, _PI2(Fraction(208, 9))),
    "rip_1": Eigenfunction("rip_1", rip_1, RIGHT_ISOSCELES, _PI2(5)),
    "rip_2": Eigenfunction("rip_2", rip_2, RIGHT_ISOSCELES, _PI2(10)),
}
