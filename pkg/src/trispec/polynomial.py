"""Sparse polynomials in two variables with coefficients polynomial in pi.

A monomial key is ``(i, j, k)`` meaning ``x**i * y**j * pi**k``; ``k`` may be
negative while an expression is being assembled.  Coefficients are
:class:`fractions.Fraction` or :class:`~trispec.exact.Surd`.  Once every
coefficient is rational and every pi power is even and non-negative the
polynomial is a *BiPoly* in the sense of the prover (coefficients in Q[pi^2]).
"""

from __future__ import annotations

from fractions import Fraction

import mpmath

from .errors import GenerationError
from .exact import Scalar, Surd


def _is_zero(c) -> bool:
    return c.is_zero() if isinstance(c, Surd) else c == 0


class Poly:
    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        self.c: dict = {}
        if coeffs:
            for key, v in coeffs.items():
                if not _is_zero(v):
                    self.c[tuple(key)] = v

    # -- construction -----------------------------------------------------
    @classmethod
    def const(cls, v, pi_pow: int = 0) -> "Poly":
        return cls({(0, 0, pi_pow): v})

    @classmethod
    def x(cls) -> "Poly":
        return cls({(1, 0, 0): Fraction(1)})

    @classmethod
    def y(cls) -> "Poly":
        return cls({(0, 1, 0): Fraction(1)})

    @classmethod
    def pi(cls, k: int = 1) -> "Poly":
        return cls({(0, 0, k): Fraction(1)})

    @classmethod
    def from_scalar(cls, s: Scalar) -> "Poly":
        return cls({(0, 0, k): v for k, v in s.terms.items()})

    @classmethod
    def coerce(cls, v) -> "Poly":
        if isinstance(v, Poly):
            return v
        if isinstance(v, Scalar):
            return cls.from_scalar(v)
        if isinstance(v, Surd):
            return cls.const(v)
        return cls.const(Fraction(v))

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = Poly.coerce(other)
        out = dict(self.c)
        for key, v in other.c.items():
            if key in out:
                s = out[key] + v
                if _is_zero(s):
                    del out[key]
                else:
                    out[key] = s
            else:
                out[key] = v
        p = Poly()
        p.c = out
        return p

    __radd__ = __add__

    def __neg__(self):
        p = Poly()
        p.c = {k: -v for k, v in self.c.items()}
        return p

    def __sub__(self, other):
        return self + (-Poly.coerce(other))

    def __rsub__(self, other):
        return Poly.coerce(other) - self

    def __mul__(self, other):
        other = Poly.coerce(other)
        out: dict = {}
        for (i1, j1, k1), v1 in self.c.items():
            for (i2, j2, k2), v2 in other.c.items():
                key = (i1 + i2, j1 + j2, k1 + k2)
                prod = v1 * v2
                if key in out:
                    out[key] = out[key] + prod
                else:
                    out[key] = prod
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = Poly.const(Fraction(1))
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = Poly.coerce(other)
        return (self - other).is_zero()

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def is_zero(self) -> bool:
        return not self.c

    # -- structure --------------------------------------------------------
    def degree(self, var: int) -> int:
        return max((k[var] for k in self.c), default=0)

    def min_pi(self) -> int:
        return min((k[2] for k in self.c), default=0)

    def shift_pi(self, k: int) -> "Poly":
        return Poly({(i, j, p + k): v for (i, j, p), v in self.c.items()})

    def rational(self) -> "Poly":
        """Coerce Surd coefficients to rationals; irrational residue is a bug."""
        out = {}
        for key, v in self.c.items():
            if isinstance(v, Surd):
                if not v.is_rational():
                    raise GenerationError(f"irrational coefficient {v} at {key}")
                v = v.rational()
            out[key] = Fraction(v)
        return Poly(out)

    def real_quadratic(self) -> "Poly":
        """Coefficients in Q(sqrt3): rationals become Fractions, sqrt3 parts stay.

        Any sqrt2 or sqrt6 component is an assembly bug.
        """
        out = {}
        for key, v in self.c.items():
            if isinstance(v, Surd):
                a, b, c, d = v.parts
                if b or d:
                    raise GenerationError(f"coefficient {v} at {key} leaves Q(sqrt3)")
                v = a if not c else v
            out[key] = v
        return Poly(out)

    def swap(self) -> "Poly":
        return Poly({(j, i, k): v for (i, j, k), v in self.c.items()})

    def subs(self, x=None, y=None) -> "Poly":
        """Substitute polynomials for x and/or y."""
        xs = Poly.coerce(x) if x is not None else None
        ys = Poly.coerce(y) if y is not None else None
        xp, yp = {}, {}

        def power(cache, base, n):
            if n not in cache:
                cache[n] = base ** n
            return cache[n]

        out = Poly()
        for (i, j, k), v in self.c.items():
            term = Poly({(0 if xs else i, 0 if ys else j, k): v})
            if xs is not None and i:
                term = term * power(xp, xs, i)
            if ys is not None and j:
                term = term * power(yp, ys, j)
            out = out + term
        return out

    def grouped(self) -> dict:
        """Map (i, j) -> {pi_pow: coeff}."""
        out: dict = {}
        for (i, j, k), v in self.c.items():
            out.setdefault((i, j), {})[k] = v
        return out

    def __call__(self, x, y, pi=None):
        pi = mpmath.pi if pi is None else pi
        tot = 0
        for (i, j, k), v in self.c.items():
            cv = v.to_mpf() if isinstance(v, Surd) else mpmath.mpf(v.numerator) / v.denominator
            tot += cv * mpmath.mpf(x) ** i * mpmath.mpf(y) ** j * pi ** k
        return tot

    def evalf(self, x: float, y: float) -> float:
        pi = 3.141592653589793
        return sum(float(v) * x ** i * y ** j * pi ** k for (i, j, k), v in self.c.items())

    # -- serialisation ----------------------------------------------------
    def to_json(self) -> list:
        """Rows {"i", "j", "pi_pow", "q"}; a sqrt3 part goes to "q_sqrt3"."""
        rows = []
        for (i, j, k), v in sorted(self.c.items()):
            row = {"i": i, "j": j, "pi_pow": k}
            if isinstance(v, Surd):
                a, b, c, d = v.parts
                if b or d:
                    raise GenerationError("only Q(sqrt3) coefficients serialise")
                row["q"] = str(a)
                if c:
                    row["q_sqrt3"] = str(c)
            else:
                row["q"] = str(Fraction(v))
            rows.append(row)
        return rows

    @classmethod
    def from_json(cls, rows) -> "Poly":
        out = Poly()
        for r in rows:
            key = (int(r["i"]), int(r["j"]), int(r.get("pi_pow", 0)))
            q = Fraction(r.get("q", "0"))
            v = Surd(q, 0, Fraction(r["q_sqrt3"])) if r.get("q_sqrt3") else q
            out = out + Poly({key: v})
        return out

    def __repr__(self):
        if not self.c:
            return "0"
        parts = []
        for (i, j, k), v in sorted(self.c.items(), reverse=True):
            mon = "".join(s for s in (f"x^{i}" if i else "", f"y^{j}" if j else "", f"π^{k}" if k else ""))
            parts.append(f"({v}){mon}")
        return " + ".join(parts)
