"""Variational upper bounds for lambda_2 and the gap / ratio estimates built on them.

For a case pairing f1 and f2 (both pulled back from the hub reference triangle
by the affine map J) the Rayleigh quotient of f1 + alpha*f2 is

    (a alpha^2 + b alpha + c) / (e alpha^2 + g alpha + f),

and its supremum over alpha is the larger eigenvalue of the 2x2 pencil
(Num, Den).  Numerator entries are the hub gradient Gram matrices contracted
with K = J J^T, so after multiplying by v^2 every coefficient is a polynomial
in the squared side lengths.  That is what makes the symbolic inequalities of
:func:`generate_case_inequality` polynomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import cases as _cases
from .cases import CaseSpec, GAP_CASES, LARGE_M_THRESHOLD, RATIO_CASES, Rect
from .errors import GenerationError, InvalidPencil, OutOfValidity
from .exact import Surd
from .geometry import Triangle, affine_onto, metrics, normalize, placement
from .lower_bounds import BoundResult, freitas, polya
from .polynomial import Poly

PI2 = math.pi ** 2
GAP_CONSTANT = 16 * PI2 / 27
RATIO_CONSTANT = 7 / 3


# ---------------------------------------------------------------------------
# numeric pencil

@dataclass(frozen=True)
class RayleighPencil:
    """(a al^2 + b al + c) / (e al^2 + g al + f)."""

    a: float
    b: float
    c: float
    e: float
    g: float
    f: float

    def __call__(self, alpha: float) -> float:
        return ((self.a * alpha + self.b) * alpha + self.c) / ((self.e * alpha + self.g) * alpha + self.f)

    def matrices(self):
        num = np.array([[self.c, self.b / 2], [self.b / 2, self.a]])
        den = np.array([[self.f, self.g / 2], [self.g / 2, self.e]])
        return num, den


def _as_case(case) -> CaseSpec:
    if isinstance(case, CaseSpec):
        return case
    cid = int(case)
    return GAP_CASES.get(cid) or RATIO_CASES[cid]


def _placed(t: Triangle, base: str):
    """Placement (u, v) plus the factor lambda(T_normalised) = factor * lambda(placed)."""
    n = normalize(t)
    u, v = placement(n, base)
    factor = 1.0 if base == "short" else 1.0 / float(n.sq[2])
    return u, v, factor


def pencil(t: Triangle, case) -> RayleighPencil:
    """Rayleigh pencil of the case's trial space on the placed copy of ``t``."""
    spec = _as_case(case)
    u, v, _ = _placed(t, spec.base)
    K = affine_onto(u, v, _cases.hub_vertices_float(spec.case_id)).K
    mass, grad = _cases.case_grams_float(spec.case_id)
    num = np.einsum("pq,ijpq->ij", K, grad)
    return RayleighPencil(
        a=num[1, 1], b=2 * num[0, 1], c=num[0, 0],
        e=mass[1, 1], g=2 * mass[0, 1], f=mass[0, 0],
    )


def pencil_max(p: RayleighPencil) -> float:
    """Supremum of the pencil over alpha (including alpha = infinity)."""
    if not (p.e > 0 and p.f > 0 and p.g * p.g < 4 * p.e * p.f):
        raise InvalidPencil("denominator quadratic is not positive definite")
    a, b, c, e, g, f = p.a, p.b, p.c, p.e, p.g, p.f
    if g == 0:
        return (a * f + c * e + 0.5 * math.sqrt(4 * b * b * e * f + (2 * a * f - 2 * c * e) ** 2)) / (2 * e * f)
    delta = e * f - g * g / 4
    s = a * f + c * e - b * g / 2
    p0 = a * c - b * b / 4
    disc = max(s * s - 4 * delta * p0, 0.0)
    return (s + math.sqrt(disc)) / (2 * delta)


def case_value(t: Triangle, case) -> float:
    """Upper bound for lambda_2(t) from one case's trial space."""
    spec = _as_case(case)
    _, _, factor = _placed(t, spec.base)
    n = normalize(t)
    return pencil_max(pencil(n, spec)) * factor / n.scale ** 2


def applicable_cases(t: Triangle, theorem: str = "gap") -> list[CaseSpec]:
    n = normalize(t)
    U, M = n.U, n.M
    eps = 1e-12
    table = _cases.cases_for(theorem)
    return [c for c in table.values()
            if c.rect.contains(U + eps, M) or c.rect.contains(max(U - eps, 0.0), M)
            or c.rect.contains(U, M + eps) or c.rect.contains(U, M - eps)]


def lambda2_upper(t: Triangle, theorem: str = "gap") -> BoundResult:
    """Minimum over the cases whose rectangle holds (U, M).

    Every case gives a valid bound for every triangle; the rectangles only
    decide which ones are tried.  Outside all rectangles of ``theorem`` every
    case is tried.
    """
    chosen = applicable_cases(t, theorem) or list(GAP_CASES.values())
    best = None
    for spec in chosen:
        val = case_value(t, spec)
        if best is None or val < best[0]:
            best = (val, spec.case_id)
    return BoundResult(float(best[0]), f"Case{best[1]}", direction="upper")


def gap_bound_check(t: Triangle) -> float:
    """(upper lambda_2 - Freitas lower lambda_1) * R^2; at most 16 pi^2/27."""
    m = metrics(t)
    return (lambda2_upper(t, "gap").value - freitas(m).value) * m.inradius ** 2


# ---------------------------------------------------------------------------
# large-M ratio bound

def _airy_constants():
    from .bessel import AIRY_ZEROS

    a1, a2 = AIRY_ZEROS
    cb = 2 ** (1 / 3)
    c1 = (10 * a1 - 3 * a2) * a2 / (10 * a1 * a1)
    c2 = -3 * a2 * a2 / (10 * cb * a1)
    c3 = (10 * a1 * a1 - 10 * a1 * a2 + 3 * a2 * a2) / (10 * a1 * a1)
    c4 = -a1 / cb
    return c1, c2, c3, c4


RATIO_C = _airy_constants()


def large_m_ratio_bound(M: float) -> float:
    """Sector-based bound on lambda_2/lambda_1 for acute triangles with M >= 2.05."""
    if M < LARGE_M_THRESHOLD:
        raise OutOfValidity(f"large-M ratio bound needs M >= {LARGE_M_THRESHOLD}, got {M}")
    c1, c2, c3, c4 = RATIO_C
    im2 = 1 / (M * M)
    z1 = math.sqrt(1 + im2) / (1 - im2 / 16)
    z2 = math.sqrt(1 + im2 / 2) / (1 - im2 / 4)
    y = (math.acos(1 - im2 / 2) / math.pi) ** (2 / 3)
    return max(z1, z2) * (c1 + c2 * y + c3 / (1 + c4 * y)) ** 2


@dataclass(frozen=True)
class RatioReport:
    value: float
    method: str
    acute: bool

    @property
    def valid(self) -> bool:
        """The ratio theorem is only claimed for acute triangles."""
        return self.acute


def ratio_bound_report(t: Triangle) -> RatioReport:
    n = normalize(t)
    m = metrics(n)
    M = n.M
    rect_val = None
    if M <= LARGE_M_THRESHOLD + 1e-12:
        up = lambda2_upper(n, "ratio")
        rect_val = (up.value / polya(m).value, up.method)
    big_val = None
    if M >= LARGE_M_THRESHOLD - 1e-12:
        big_val = (large_m_ratio_bound(max(M, LARGE_M_THRESHOLD)), "LargeM")
    pick = min((x for x in (rect_val, big_val) if x is not None), key=lambda x: x[0])
    return RatioReport(pick[0], pick[1], m.acute)


def ratio_bound_check(t: Triangle) -> float:
    """Upper lambda_2 over Polya lower lambda_1; at most 7/3 for acute triangles."""
    return ratio_bound_report(t).value


# ---------------------------------------------------------------------------
# symbolic inequalities

@dataclass
class SymbolicPencil:
    """Pencil invariants as polynomials, with K scaled by v^2.

    ``lam * v^2`` is the larger root of ``Delta l^2 - S l + P0``.
    """

    S: Poly
    P0: Poly
    Delta: Poly
    v2: Poly

    @property
    def disc(self) -> Poly:
        return self.S * self.S - Fraction(4) * self.Delta * self.P0


def _surd_pt(p):
    return tuple(Surd.coerce(c) for c in p)


def symbolic_pencil(cid: int, m: Poly, n: Poly) -> SymbolicPencil:
    """Pencil for the triangle with vertices (0,0), (1,0), apex at distances m, n."""
    W0, W1, W2 = (_surd_pt(p) for p in _cases.hub_vertices_exact(cid))
    d1 = (W1[0] - W0[0], W1[1] - W0[1])
    d2 = (W2[0] - W0[0], W2[1] - W0[1])
    u = (Poly.const(Fraction(1)) + m * m - n * n) * Fraction(1, 2)
    v2 = m * m - u * u
    w = tuple(Poly.const(d2[i]) - u * Poly.const(d1[i]) for i in range(2))
    vK = [[v2 * Poly.const(d1[p] * d1[q]) + w[p] * w[q] for q in range(2)] for p in range(2)]
    g11, g12, g22 = _cases.case_grams(cid)

    def contract(gs):
        out = Poly()
        for p in range(2):
            for q in range(2):
                out = out + vK[p][q] * Poly.from_scalar(gs.grad[p][q])
        return out

    n11, n12, n22 = contract(g11), contract(g12), contract(g22)
    m11, m12, m22 = (Poly.from_scalar(g.mass) for g in (g11, g12, g22))
    S = n11 * m22 + n22 * m11 - Fraction(2) * n12 * m12
    P0 = n11 * n22 - n12 * n12
    Delta = m11 * m22 - m12 * m12
    return SymbolicPencil(S, P0, Delta, v2)


def _pi_clean(p: Poly) -> Poly:
    """Clear negative pi powers with an even multiplier; coefficients end in Q(sqrt3)."""
    k = p.min_pi()
    if k < 0:
        p = p.shift_pi(-k + (k % 2))
    return p.real_quadratic()


def _even_up(k: int) -> int:
    return max(0, k + (k % 2))


def _pi_clean_triple(P: Poly, Q: Poly, R: Poly):
    """Scale Q by pi^sQ, R by pi^sR and P by pi^(sQ + sR/2), all even.

    The same positive factor then multiplies P and Q*sqrt(R), so the sign
    of P + Q*sqrt(R) is unchanged.
    """
    sR = _even_up(-R.min_pi())
    sQ = _even_up(max(-Q.min_pi(), -P.min_pi() - sR // 2))
    sP = sQ + sR // 2
    return tuple(x.shift_pi(k).real_quadratic() for x, k in ((P, sP), (Q, sQ), (R, sR)))


def _rational_parts(v):
    if isinstance(v, Surd):
        return [q for q in v.parts if q]
    return [Fraction(v)]


def _content_normalize(p: Poly) -> Poly:
    """Divide by the positive rational content (gcd of coefficients)."""
    if p.is_zero():
        return p
    from math import gcd, lcm

    parts = [q for v in p.c.values() for q in _rational_parts(v)]
    nums = [abs(q.numerator) for q in parts]
    dens = [q.denominator for q in parts]
    g = 0
    for x in nums:
        g = gcd(g, x)
    L = 1
    for x in dens:
        L = lcm(L, x)
    return p * Fraction(L, g)


@dataclass
class CaseInequality:
    """P + Q*sqrt(R) <= 0 in side variables, plus the prover goals.

    Coefficients lie in Q[pi^2], except for the mixed case 5: its pull-back
    from the right-isosceles frame leaves sqrt3 and odd powers of pi.

    ``P``, ``Q``, ``R`` use x = M, y = N (for the long-base case x = M',
    y = N', the sides of the rescaled copy).  ``goals`` are P <= 0 and
    Q^2 R - P^2 <= 0 rewritten in the prover chart ``variables`` over
    ``rect`` = (x0, x1, y0, y1).
    """

    case: CaseSpec
    P: Poly
    Q: Poly
    R: Poly
    goals: tuple
    variables: tuple
    rect: tuple

    def raw_goals(self):
        return (self.P, self.Q * self.Q * self.R - self.P * self.P)


def _side_polys(spec: CaseSpec):
    """(m, n, d, L) as polynomials in (x, y) = (M, N) or (M', N')."""
    X, Y = Poly.x(), Poly.y()
    one = Poly.const(Fraction(1))
    if spec.base == "short":
        return X, Y, Y, one + X + Y
    return X, Y, one, one + X + Y


def _gap_pqr(spec: CaseSpec):
    m, n, d, L = _side_polys(spec)
    sp = symbolic_pencil(spec.case_id, m, n)
    dd = d * d
    pi2 = Poly.pi(2)
    P = (sp.S * dd - Fraction(2) * sp.Delta * pi2 * (Fraction(4) * sp.v2 + dd * dd)
         - Fraction(32, 27) * sp.Delta * pi2 * L * L * dd)
    return P, dd, sp.disc


def _ratio_pqr(spec: CaseSpec):
    m, n, _, _ = _side_polys(spec)
    sp = symbolic_pencil(spec.case_id, m, n)
    # lam*v^2 <= (56 sqrt3 pi^2 / 9) v, squared after multiplying by 2 Delta
    kappa2 = Fraction(112 * 112 * 3, 81) * Poly.pi(4) * sp.Delta * sp.Delta
    P = sp.S * sp.S + sp.disc - kappa2 * sp.v2
    return P, Fraction(2) * sp.S, sp.disc


def _to_chart(p: Poly, spec: CaseSpec):
    """Rewrite a polynomial in (M, N) into the prover chart of the case."""
    X, Y = Poly.x(), Poly.y()
    one = Poly.const(Fraction(1))
    r = spec.rect
    if spec.base == "long":
        # sides of the rescaled copy: N' = 1 - U', M' = 2 - U' - M''
        q = p.subs(x=Fraction(2) - X - Y, y=one - X)
        return q, ("U'", "M''"), (r.u0, r.u1, r.m0, r.m1)
    if r.m1 is None:
        # unbounded M: t = 1/(M - 1), so M t = 1 + t and N t = 1 + t + U t;
        # multiply through by t^D.  Centring the chart at M = 1 rather than
        # M = 0 is what lets the sweep close without subdividing.
        D = max(i + j for (i, j, _) in p.c)
        Mt, Nt = one + Y, one + Y + X * Y
        out = Poly()
        for (i, j, k), c in p.c.items():
            out = out + Poly({(0, D - i - j, k): c}) * Mt ** i * Nt ** j
        return out, ("U", "t"), (r.u0, r.u1, Fraction(0), 1 / (r.m0 - 1))
    q = p.subs(x=Y, y=Y + X)
    return q, ("U", "M"), (r.u0, r.u1, r.m0, r.m1)


def generate_case_inequality(case, theorem: str | None = None) -> CaseInequality:
    """Symbolic P, Q, R and the two prover goals for a case of either theorem."""
    if isinstance(case, CaseSpec):
        spec = case
    else:
        table = _cases.cases_for(theorem or "gap")
        spec = table[int(case)]
    if spec.theorem == "gap":
        P, Q, R = _gap_pqr(spec)
    else:
        P, Q, R = _ratio_pqr(spec)
    P, Q, R = _pi_clean_triple(P, Q, R)
    goals = []
    chart = rect = None
    for g in (P, Q * Q * R - P * P):
        gc, chart, rect = _to_chart(g, spec)
        goals.append(_content_normalize(gc))
    return CaseInequality(spec, P, Q, R, tuple(goals), chart, rect)
