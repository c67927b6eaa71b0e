"""Exact scalars used by the trigonometric integrator and the inequality generator.

Two layers:

* :class:`Surd` -- an element ``a + b*sqrt2 + c*sqrt3 + d*sqrt6`` of the field
  Q(sqrt2, sqrt3), with :class:`fractions.Fraction` components.
* :class:`Scalar` -- a Laurent polynomial in pi with :class:`Surd` coefficients,
  i.e. a finite sum ``sum_k s_k * pi**k``.

Every sine/cosine value at a rational multiple of pi with denominator dividing 12
lies in Q(sqrt2, sqrt3), which is what keeps the integrals exact.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import mpmath

from .errors import ExactFieldError

_SQRT2 = mpmath.sqrt(2)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def _sign_q2(r: Fraction, s: Fraction) -> int:
    """Sign of r + s*sqrt2."""
    sr = (r > 0) - (r < 0)
    ss = (s > 0) - (s < 0)
    if ss == 0:
        return sr
    if sr == 0 or sr == ss:
        return ss if sr == 0 else sr
    d = r * r - 2 * s * s
    return sr * ((d > 0) - (d < 0))


class Surd:
    """Element of Q(sqrt2, sqrt3) on the basis (1, sqrt2, sqrt3, sqrt6)."""

    __slots__ = ("_c", "_h")

    def __init__(self, a=0, b=0, c=0, d=0):
        self._c = (_frac(a), _frac(b), _frac(c), _frac(d))
        self._h = None

    @classmethod
    def _raw(cls, t):
        obj = cls.__new__(cls)
        obj._c = t
        obj._h = None
        return obj

    @classmethod
    def coerce(cls, x) -> "Surd":
        if isinstance(x, Surd):
            return x
        return cls._raw((_frac(x), Fraction(0), Fraction(0), Fraction(0)))

    @property
    def parts(self) -> tuple:
        return self._c

    def is_zero(self) -> bool:
        return not any(self._c)

    def is_rational(self) -> bool:
        return not (self._c[1] or self._c[2] or self._c[3])

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise ExactFieldError(f"{self} is not rational")
        return self._c[0]

    def __add__(self, other):
        if not isinstance(other, Surd):
            try:
                other = Surd.coerce(other)
            except TypeError:
                return NotImplemented
        a, b = self._c, other._c
        return Surd._raw((a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]))

    __radd__ = __add__

    def __neg__(self):
        a = self._c
        return Surd._raw((-a[0], -a[1], -a[2], -a[3]))

    def __sub__(self, other):
        if not isinstance(other, Surd):
            try:
                other = Surd.coerce(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return Surd.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Surd):
            if isinstance(other, (int, Rational)):
                f = _frac(other)
                a = self._c
                return Surd._raw((a[0] * f, a[1] * f, a[2] * f, a[3] * f))
            return NotImplemented
        a1, b1, c1, d1 = self._c
        a2, b2, c2, d2 = other._c
        return Surd._raw((
            a1 * a2 + 2 * b1 * b2 + 3 * c1 * c2 + 6 * d1 * d2,
            a1 * b2 + b1 * a2 + 3 * (c1 * d2 + d1 * c2),
            a1 * c2 + c1 * a2 + 2 * (b1 * d2 + d1 * b2),
            a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2,
        ))

    __rmul__ = __mul__

    def inverse(self) -> "Surd":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero surd")
        a, b, c, d = self._c
        # x = p + q*sqrt3 with p = a + b*sqrt2, q = c + d*sqrt2
        conj3 = Surd._raw((a, b, -c, -d))
        n = self * conj3  # lies in Q(sqrt2)
        r, s = n._c[0], n._c[1]
        conj2 = Surd._raw((r, -s, Fraction(0), Fraction(0)))
        den = r * r - 2 * s * s
        return (conj3 * conj2) * (1 / den)

    def __truediv__(self, other):
        if not isinstance(other, Surd):
            if isinstance(other, (int, Rational)):
                return self * (1 / _frac(other))
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Surd.coerce(other) * self.inverse()

    def sign(self) -> int:
        a, b, c, d = self._c
        sp = _sign_q2(a, b)
        sq = _sign_q2(c, d)
        if sq == 0:
            return sp
        if sp == 0 or sp == sq:
            return sq if sp == 0 else sp
        # sign(p^2 - 3 q^2), computed in Q(sqrt2)
        p2 = (a * a + 2 * b * b, 2 * a * b)
        q2 = (c * c + 2 * d * d, 2 * c * d)
        return sp * _sign_q2(p2[0] - 3 * q2[0], p2[1] - 3 * q2[1])

    def __eq__(self, other):
        if isinstance(other, Surd):
            return self._c == other._c
        if isinstance(other, (int, Rational)):
            return self.is_rational() and self._c[0] == other
        return NotImplemented

    def __hash__(self):
        if self._h is None:
            self._h = hash(self._c)
        return self._h

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __float__(self):
        a, b, c, d = self._c
        return float(a) + float(b) * 2 ** 0.5 + float(c) * 3 ** 0.5 + float(d) * 6 ** 0.5

    def to_mpf(self):
        a, b, c, d = self._c
        m = lambda q: mpmath.mpf(q.numerator) / q.denominator
        return m(a) + m(b) * mpmath.sqrt(2) + m(c) * mpmath.sqrt(3) + m(d) * mpmath.sqrt(6)

    def encode(self) -> dict:
        names = ("1", "sqrt2", "sqrt3", "sqrt6")
        return {n: str(q) for n, q in zip(names, self._c) if q}

    @classmethod
    def decode(cls, d: dict) -> "Surd":
        return cls(*(Fraction(d.get(n, "0")) for n in ("1", "sqrt2", "sqrt3", "sqrt6")))

    def __repr__(self):
        if self.is_zero():
            return "0"
        out = []
        for q, n in zip(self._c, ("", "√2", "√3", "√6")):
            if q:
                out.append(f"{q}{'*' + n if n else ''}")
        return " + ".join(out)


SQRT2 = Surd(0, 1)
SQRT3 = Surd(0, 0, 1)
ZERO = Surd()
ONE = Surd(1)


# sin(k*pi/12) for k = 0..6
_SIN12 = (
    Surd(0),
    Surd(0, Fraction(-1, 4), 0, Fraction(1, 4)),
    Surd(Fraction(1, 2)),
    Surd(0, Fraction(1, 2)),
    Surd(0, 0, Fraction(1, 2)),
    Surd(0, Fraction(1, 4), 0, Fraction(1, 4)),
    Surd(1),
)


def _sin_twelfths(k: int) -> Surd:
    k %= 24
    if k <= 6:
        return _SIN12[k]
    if k <= 12:
        return _SIN12[12 - k]
    return -_sin_twelfths(k - 12)


def sin_pi(r) -> Surd:
    """Exact sin(pi*r) for rational r with denominator dividing 12."""
    r = Surd.coerce(r)
    if not r.is_rational():
        raise ExactFieldError(f"sin(pi*({r})) is not in the exact table")
    q = r.rational() * 12
    if q.denominator != 1:
        raise ExactFieldError(f"sin(pi*{r.rational()}) is not in the exact table")
    return _sin_twelfths(int(q))


def cos_pi(r) -> Surd:
    r = Surd.coerce(r)
    if not r.is_rational():
        raise ExactFieldError(f"cos(pi*({r})) is not in the exact table")
    q = r.rational() * 12
    if q.denominator != 1:
        raise ExactFieldError(f"cos(pi*{r.rational()}) is not in the exact table")
    return _sin_twelfths(int(q) + 6)


class Scalar:
    """Finite Laurent polynomial in pi with :class:`Surd` coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for k, s in terms.items():
                s = Surd.coerce(s)
                if not s.is_zero():
                    clean[int(k)] = s
        self.terms = clean

    @classmethod
    def coerce(cls, x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        return cls({0: Surd.coerce(x)})

    @classmethod
    def pi_power(cls, k: int, coef=1) -> "Scalar":
        return cls({k: coef})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if isinstance(other, (mpmath.mpf, float)):
            return self.to_mpf() + other
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        out = dict(self.terms)
        for k, s in other.terms.items():
            out[k] = out[k] + s if k in out else s
        return Scalar(out)

    __radd__ = __add__

    def __neg__(self):
        return Scalar({k: -s for k, s in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (mpmath.mpf, float)):
            return self.to_mpf() * other
        if not isinstance(other, Scalar):
            try:
                other = Scalar.coerce(other)
            except TypeError:
                return NotImplemented
        out = {}
        for k1, s1 in self.terms.items():
            for k2, s2 in other.terms.items():
                k = k1 + k2
                p = s1 * s2
                out[k] = out[k] + p if k in out else p
        return Scalar(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (mpmath.mpf, float)):
            return self.to_mpf() / other
        if not isinstance(other, Scalar):
            other = Scalar.coerce(other)
        if len(other.terms) != 1:
            raise ExactFieldError("division by a non-monomial pi-polynomial")
        (k, s), = other.terms.items()
        inv = s.inverse()
        return Scalar({kk - k: ss * inv for kk, ss in self.terms.items()})

    def __rtruediv__(self, other):
        return Scalar.coerce(other) / self

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.terms == other.terms
        try:
            return self == Scalar.coerce(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def to_mpf(self):
        return mpmath.fsum(s.to_mpf() * mpmath.pi ** k for k, s in self.terms.items())

    def __float__(self):
        with mpmath.workdps(30):
            return float(self.to_mpf())

    def sign(self, digits: int = 40) -> int:
        if not self.terms:
            return 0
        d = digits
        while d <= 400:
            with mpmath.workdps(d):
                val = self.to_mpf()
                if abs(val) > mpmath.mpf(10) ** (-(d - 10)):
                    return 1 if val > 0 else -1
            d *= 2
        raise ExactFieldError("sign undecidable")

    def encode(self) -> dict:
        out = {}
        for k, s in sorted(self.terms.items()):
            for name, q in s.encode().items():
                out[f"{name}*pi^{k}"] = q
        return out

    @classmethod
    def decode(cls, d: dict) -> "Scalar":
        acc = {}
        for key, q in d.items():
            name, k = key.split("*pi^")
            acc.setdefault(int(k), {})[name] = q
        return cls({k: Surd.decode(v) for k, v in acc.items()})

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({s})*π^{k}" for k, s in sorted(self.terms.items()))
