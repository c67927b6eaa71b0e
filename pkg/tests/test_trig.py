"""Exact scalars, trigonometric polynomials and their integrals over the reference triangles.

Independent oracles: scipy's adaptive 2-D quadrature for integrals, central
differences for derivatives, mpmath for special values.
"""

import math
import random
from fractions import Fraction

import mpmath
import pytest
from scipy import integrate

from trispec.cases import build_constants, case_grams, load_constants
from trispec.errors import ExactFieldError
from trispec.exact import Scalar, Surd, cos_pi, sin_pi
from trispec.trig import (CATALOG, EQUILATERAL, HALF_EQUILATERAL, RIGHT_ISOSCELES, TrigPoly,
                          arg, gram, integrate_triangle, partial, phi_a21, phi_s11, phi_s21,
                          product_to_sum, rip_1, rip_2)

PI = math.pi
REFS = (EQUILATERAL, HALF_EQUILATERAL, RIGHT_ISOSCELES)


def quad_oracle(f, ref):
    """Integral of a float function over a reference triangle by nested adaptive quadrature."""
    (x0, y0), (x1, y1), (x2, y2) = ref.float_vertices()
    # split at the apex abscissa into regions bounded by straight edges
    pts = sorted([(x0, y0), (x1, y1), (x2, y2)])
    (ax, ay), (bx, by), (cx, cy) = pts

    def line(p, q):
        (px, py), (qx, qy) = p, q
        return lambda x: py + (qy - py) * (x - px) / (qx - px)

    tot = 0.0
    ac = line(pts[0], pts[2])
    if bx > ax:
        ab = line(pts[0], pts[1])
        lo = lambda x: min(ab(x), ac(x))
        hi = lambda x: max(ab(x), ac(x))
        tot += integrate.dblquad(lambda y, x: f(x, y), ax, bx, lo, hi, epsabs=1e-13, epsrel=1e-13)[0]
    if cx > bx:
        bc = line(pts[1], pts[2])
        lo = lambda x: min(bc(x), ac(x))
        hi = lambda x: max(bc(x), ac(x))
        tot += integrate.dblquad(lambda y, x: f(x, y), bx, cx, lo, hi, epsabs=1e-13, epsrel=1e-13)[0]
    return tot


# -- exact scalars ---------------------------------------------------------

def test_surd_field_ops():
    a = Surd(1, 2, 3, 4)
    b = Surd(Fraction(1, 3), 0, -1, 1)
    assert float(a * b) == pytest.approx(float(a) * float(b), rel=1e-14)
    assert float(a / b) == pytest.approx(float(a) / float(b), rel=1e-13)
    assert (a * a.inverse()) == Surd(1)
    assert Surd(0, 0, 1) * Surd(0, 0, 1) == Surd(3)


def test_surd_sign_exact():
    # 1351/780 is a very close upper approximant of sqrt3
    assert (Surd(Fraction(1351, 780)) - Surd(0, 0, 1)).sign() == 1
    assert (Surd(Fraction(265, 153)) - Surd(0, 0, 1)).sign() == -1


@pytest.mark.parametrize("k", range(-24, 25))
def test_trig_table(k):
    r = Fraction(k, 12)
    assert float(sin_pi(r)) == pytest.approx(math.sin(PI * k / 12), abs=1e-15)
    assert float(cos_pi(r)) == pytest.approx(math.cos(PI * k / 12), abs=1e-15)


def test_trig_table_outside():
    with pytest.raises(ExactFieldError):
        sin_pi(Fraction(1, 5))


def test_scalar_pi_powers():
    s = Scalar.pi_power(2, 3) + Scalar.pi_power(-1, Fraction(1, 2))
    assert float(s) == pytest.approx(3 * PI ** 2 + 0.5 / PI)
    assert Scalar.decode(s.encode()) == s


# -- trigonometric polynomials --------------------------------------------

def test_sin_squared():
    s = TrigPoly.sin(arg(1))
    got = product_to_sum(s, s)
    want = TrigPoly.const(Fraction(1, 2)) + TrigPoly.cos(arg(2), Fraction(-1, 2))
    assert got.terms == want.terms


def test_canonical_merging():
    p = TrigPoly.sin(arg(1)) + TrigPoly.sin(arg(-1))
    assert len(p) == 0
    q = TrigPoly.cos(arg(1, 0, Fraction(1, 3))) + TrigPoly.cos(arg(-1, 0, Fraction(-1, 3)))
    assert len(q) == 1


def test_product_to_sum_pointwise():
    rng = random.Random(5)
    f, g = phi_s11(), phi_a21()
    h = product_to_sum(f, g)
    for _ in range(100):
        x, y = rng.uniform(-1, 2), rng.uniform(-1, 2)
        assert h(x, y) == pytest.approx(f(x, y) * g(x, y), abs=1e-12)


def test_phi_squared_term_count():
    sq = product_to_sum(phi_s11(), phi_s11())
    assert 0 < len(sq) < 40
    for (kind, a), _ in sq:
        assert kind in ("sin", "cos")


def test_eight_term_linearisation():
    z3 = TrigPoly.cos(arg(Fraction(2), 0, -1))                      # cos 3z
    st = TrigPoly.sin(arg(0, Surd(0, 0, Fraction(-2, 3)), 1))       # sin t
    ct = TrigPoly.cos(arg(0, Surd(0, 0, Fraction(-2, 3)), 1))       # cos t
    prod = product_to_sum(product_to_sum(z3, st), product_to_sum(ct, st))
    # terms at arguments 3z +- 2t, 3z and 2t, constant pieces cancel
    assert len(prod) <= 8
    rng = random.Random(2)
    for _ in range(20):
        x, y = rng.random(), rng.random()
        assert prod(x, y) == pytest.approx(z3(x, y) * st(x, y) * ct(x, y) * st(x, y), abs=1e-12)


def test_partial_simple():
    d = partial(TrigPoly.sin(arg(1)), "x")
    assert d.terms == TrigPoly.cos(arg(1)).scale(Scalar.pi_power(1)).terms
    assert len(partial(TrigPoly.sin(arg(1)), "y")) == 0


def test_partial_t_variable():
    # t = pi (1 - 2y/sqrt3): d/dy sin t = -2 pi / sqrt3 cos t
    t = arg(0, Surd(0, 0, Fraction(-2, 3)), 1)
    d = partial(TrigPoly.sin(t), "y")
    x, y = 0.3, 0.2
    want = -2 * PI / math.sqrt(3) * math.cos(PI * (1 - 2 * y / math.sqrt(3)))
    assert d(x, y) == pytest.approx(want, rel=1e-13)


@pytest.mark.parametrize("name", list(CATALOG))
def test_partials_fd(name):
    f = CATALOG[name].build()
    x, y, h = mpmath.mpf("0.3"), mpmath.mpf("0.2"), mpmath.mpf("1e-20")
    with mpmath.workdps(50):
        for var in ("x", "y"):
            d = partial(f, var)
            if var == "x":
                fd = (f.evaluate_mp(x + h, y) - f.evaluate_mp(x - h, y)) / (2 * h)
            else:
                fd = (f.evaluate_mp(x, y + h) - f.evaluate_mp(x, y - h)) / (2 * h)
            assert float(d.evaluate_mp(x, y)) == pytest.approx(float(fd), abs=1e-8)


# -- integration -----------------------------------------------------------

@pytest.mark.parametrize("ref", REFS)
def test_area(ref):
    got = integrate_triangle(TrigPoly.const(1), ref)
    assert got == Scalar.coerce(ref.area)


def test_equilateral_area_value():
    assert float(integrate_triangle(TrigPoly.const(1), EQUILATERAL)) == pytest.approx(math.sqrt(3) / 4)


@pytest.mark.parametrize("name", list(CATALOG))
def test_mass_against_quadrature(name):
    e = CATALOG[name]
    f = e.build()
    exact = integrate_triangle(product_to_sum(f, f), e.reference)
    oracle = quad_oracle(lambda x, y: f(x, y) ** 2, e.reference)
    assert float(exact) > 0
    assert float(exact) == pytest.approx(oracle, rel=1e-10)


@pytest.mark.parametrize("ref", REFS)
def test_mixed_terms_against_quadrature(ref):
    # on the equilateral frames heights carry sqrt3, so y-frequencies are multiples of 1/sqrt3
    w = Surd(1) if ref is RIGHT_ISOSCELES else Surd(0, 0, Fraction(1, 3))
    p = (TrigPoly.sin(arg(1, w * 2, Fraction(1, 4))) + TrigPoly.cos(arg(3, -w, 0), Fraction(2, 3))
         + TrigPoly.cos(arg(0, w * 2, Fraction(1, 2))) + TrigPoly.sin(arg(2, 0, 0)))
    exact = integrate_triangle(p, ref)
    assert float(exact) == pytest.approx(quad_oracle(p, ref), rel=1e-10, abs=1e-13)


def test_linearity():
    p, q = phi_s11(), phi_s21()
    ps = product_to_sum(p, q)
    qq = product_to_sum(q, q)
    a = integrate_triangle(ps + qq, EQUILATERAL)
    b = integrate_triangle(ps, EQUILATERAL) + integrate_triangle(qq, EQUILATERAL)
    assert a == b


def test_right_isosceles_orthogonality():
    assert integrate_triangle(product_to_sum(rip_1(), rip_2()), RIGHT_ISOSCELES).is_zero()
    assert abs(quad_oracle(lambda x, y: rip_1()(x, y) * rip_2()(x, y), RIGHT_ISOSCELES)) < 1e-12


def test_fallback_numeric():
    p = TrigPoly.sin(arg(Fraction(1, 5), 0, 0))
    with pytest.raises(ExactFieldError):
        integrate_triangle(p, RIGHT_ISOSCELES)
    val = integrate_triangle(p, RIGHT_ISOSCELES, fallback=True)
    assert float(val) == pytest.approx(quad_oracle(p, RIGHT_ISOSCELES), rel=1e-10)


# -- Gram sets -------------------------------------------------------------

def test_s11_s21_orthogonal():
    assert gram(phi_s11(), phi_s21(), EQUILATERAL).mass.is_zero()


@pytest.mark.parametrize("name", list(CATALOG))
def test_rayleigh_quotients(name):
    e = CATALOG[name]
    g = gram(e.build(), e.build(), e.reference)
    assert g.trace() == g.mass * e.eigenvalue
    G = [[float(v) for v in row] for row in g.grad]
    assert G[0][1] == pytest.approx(G[1][0])
    assert G[0][0] >= 0 and G[0][0] * G[1][1] - G[0][1] ** 2 >= -1e-9


def test_eigenvalue_constants():
    assert CATALOG["phi_S11"].eigenvalue == Scalar.pi_power(2, Fraction(16, 3))
    assert CATALOG["rip_2"].eigenvalue == Scalar.pi_power(2, 10)


def test_distinct_eigenfunctions_orthogonal():
    eq = ["phi_S11", "phi_S21", "phi_A21", "phi_A31"]
    for i, a in enumerate(eq):
        for b in eq[i + 1:]:
            assert gram(CATALOG[a].build(), CATALOG[b].build(), EQUILATERAL).mass.is_zero()


def test_frozen_constants_reproducible():
    assert build_constants() == load_constants()


def test_frozen_grams_match_quadrature():
    # case 1 lives on the equilateral frame; spot-check its cross and mass entries
    g11, g12, g22 = case_grams(1)
    f1, f2 = phi_s21(), phi_s11()
    assert float(g11.mass) == pytest.approx(quad_oracle(lambda x, y: f1(x, y) ** 2, EQUILATERAL), rel=1e-10)
    assert float(g22.mass) == pytest.approx(quad_oracle(lambda x, y: f2(x, y) ** 2, EQUILATERAL), rel=1e-10)
    assert abs(float(g12.mass)) < 1e-12
