"""Certified sign proofs for bivariate polynomials on rectangles.

Goal: P(x, y) <= 0 on [x0, x1] x [y0, y1].
After shifting to (0, a) x (0, b), each monomial is pushed to an upper bound:

* a negative c x^i y^j is absorbed into x^i y^(j+1) with multiplier 1/b,
* a negative coefficient with nowhere left to go is clamped to 0,
* the nonnegative row x^i Q_i'(y) is folded into row i-1 with multiplier a.

If nothing positive survives the sweep the goal is proved.  Otherwise the
rectangle centre is tested for a counterexample and the box is split in four.

Coefficients live in Q(sqrt3)[pi] and are stored as tuples whose entry
2k + r multiplies sqrt3^r pi^k.  The goals of the pure families only use
sqrt3^0 pi^(2k), i.e. Q[pi^2]; the mixed family needs the rest.
Signs are decided on rational intervals around pi and sqrt3 that shrink until
the answer is unambiguous, so a decided sign never changes with more digits.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, isqrt

import mpmath

from .errors import PrecisionError
from .exact import Surd
from .polynomial import Poly

DEFAULT_DIGITS = 30
MAX_DIGITS = 120
DEFAULT_DEPTH = 12

# ---------------------------------------------------------------------------
# Q(sqrt3)[pi] scalars


def _trim(c: tuple) -> tuple:
    n = len(c)
    while n and c[n - 1] == 0:
        n -= 1
    return c[:n]


def c_add(a: tuple, b: tuple) -> tuple:
    if len(a) < len(b):
        a, b = b, a
    return _trim(tuple(x + (b[k] if k < len(b) else 0) for k, x in enumerate(a)))


def c_scale(a: tuple, s: Fraction) -> tuple:
    if s == 0:
        return ()
    return tuple(x * s for x in a)


@lru_cache(maxsize=None)
def pi_enclosure(digits: int) -> tuple[Fraction, Fraction]:
    """Rational lo < pi < hi with hi - lo = 10**-digits."""
    with mpmath.workdps(digits + 20):
        scaled = int(mpmath.floor(mpmath.pi * mpmath.mpf(10) ** digits))
    den = 10 ** digits
    return Fraction(scaled, den), Fraction(scaled + 1, den)


@lru_cache(maxsize=None)
def sqrt3_enclosure(digits: int) -> tuple[Fraction, Fraction]:
    den = 10 ** digits
    r = isqrt(3 * den * den)
    return Fraction(r, den), Fraction(r + 1, den)


def _interval(c: tuple, digits: int):
    t_lo, t_hi = pi_enclosure(digits)
    r_lo, r_hi = sqrt3_enclosure(digits)
    s_lo = s_hi = Fraction(0)
    p_lo = p_hi = Fraction(1)
    for idx, q in enumerate(c):
        if q:
            f_lo, f_hi = (p_lo * r_lo, p_hi * r_hi) if idx % 2 else (p_lo, p_hi)
            if q > 0:
                s_lo += q * f_lo
                s_hi += q * f_hi
            else:
                s_lo += q * f_hi
                s_hi += q * f_lo
        if idx % 2:
            p_lo *= t_lo
            p_hi *= t_hi
    return s_lo, s_hi


def c_sign(c: tuple, digits: int = DEFAULT_DIGITS, max_digits: int = MAX_DIGITS) -> int:
    """Exact sign of sum c_(2k+r) sqrt3^r pi^k."""
    if not c:
        return 0
    if len(c) == 1:
        return (c[0] > 0) - (c[0] < 0)
    d = digits
    while d <= max_digits:
        lo, hi = _interval(c, d)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        d *= 2
    raise PrecisionError(f"sign of {c} undecided at {max_digits} digits of pi")


def c_value(c: tuple) -> float:
    t = float(mpmath.pi)
    return sum(float(q) * t ** (k // 2) * (3 ** 0.5 if k % 2 else 1) for k, q in enumerate(c))


# ---------------------------------------------------------------------------
# goals

@dataclass(frozen=True)
class RectGoal:
    """P <= 0 on [x0, x1] x [y0, y1]; ``coeffs`` maps (i, j) -> coefficient tuple."""

    coeffs: dict
    rect: tuple
    max_depth: int = DEFAULT_DEPTH
    digits: int = DEFAULT_DIGITS

    def __post_init__(self):
        x0, x1, y0, y1 = (Fraction(v) for v in self.rect)
        if not (x0 < x1 and y0 < y1):
            raise ValueError(f"empty rectangle {self.rect}")
        object.__setattr__(self, "rect", (x0, x1, y0, y1))

    @classmethod
    def from_poly(cls, p: Poly, rect, **kw) -> "RectGoal":
        return cls(poly_to_coeffs(p), tuple(rect), **kw)

    def to_poly(self) -> Poly:
        return coeffs_to_poly(self.coeffs)

    def with_rect(self, rect) -> "RectGoal":
        return RectGoal(self.coeffs, rect, self.max_depth, self.digits)

    def to_json(self) -> dict:
        return {
            "coeffs": self.to_poly().to_json(),
            "rect": [str(v) for v in self.rect],
            "max_depth": self.max_depth,
        }

    @classmethod
    def from_json(cls, d: dict) -> "RectGoal":
        p = Poly.from_json(d["coeffs"])
        return cls.from_poly(p, [Fraction(v) for v in d["rect"]],
                             max_depth=int(d.get("max_depth", DEFAULT_DEPTH)),
                             digits=int(d.get("pi_digits", DEFAULT_DIGITS)))


def _split_q3(v) -> tuple[Fraction, Fraction]:
    if isinstance(v, Surd):
        a, b, c, d = v.parts
        if b or d:
            raise ValueError("prover coefficients must lie in Q(sqrt3)[pi^2]")
        return a, c
    return Fraction(v), Fraction(0)


def poly_to_coeffs(p: Poly) -> dict:
    out: dict = {}
    for (i, j, k), v in p.c.items():
        if k < 0:
            raise ValueError("prover coefficients must be polynomial in pi")
        cur = list(out.get((i, j), ()))
        cur += [Fraction(0)] * (2 * k + 2 - len(cur))
        a, r = _split_q3(v)
        cur[2 * k] += a
        cur[2 * k + 1] += r
        out[(i, j)] = _trim(tuple(cur))
    return {key: c for key, c in out.items() if c}


def coeffs_to_poly(coeffs: dict) -> Poly:
    out: dict = {}
    for (i, j), c in coeffs.items():
        for idx in range(0, len(c), 2):
            a = c[idx]
            r = c[idx + 1] if idx + 1 < len(c) else Fraction(0)
            if a or r:
                out[(i, j, idx // 2)] = Surd(a, 0, r) if r else a
    return Poly(out)


def shift_to_origin(g: RectGoal) -> RectGoal:
    """Substitute x -> x + x0, y -> y + y0; the box becomes (0, a) x (0, b)."""
    x0, x1, y0, y1 = g.rect
    out: dict = {}
    for (i, j), c in g.coeffs.items():
        for p in range(i + 1):
            fx = comb(i, p) * x0 ** (i - p)
            if fx == 0:
                continue
            for q in range(j + 1):
                f = fx * comb(j, q) * y0 ** (j - q)
                if f == 0:
                    continue
                out[(p, q)] = c_add(out.get((p, q), ()), c_scale(c, f))
    out = {k: v for k, v in out.items() if v}
    return RectGoal(out, (Fraction(0), x1 - x0, Fraction(0), y1 - y0), g.max_depth, g.digits)


def evaluate(coeffs: dict, x: Fraction, y: Fraction) -> tuple:
    tot: tuple = ()
    for (i, j), c in coeffs.items():
        tot = c_add(tot, c_scale(c, Fraction(x) ** i * Fraction(y) ** j))
    return tot


# ---------------------------------------------------------------------------
# reduction

@dataclass(frozen=True)
class Step:
    rule: str          # "negup" | "posup" | "clamp"
    src: tuple         # (i, j)
    dst: tuple | None  # (i, j) or None for clamp
    mult: Fraction

    def to_json(self):
        return {"rule": self.rule, "src": list(self.src),
                "dst": None if self.dst is None else list(self.dst), "mult": str(self.mult)}

    @classmethod
    def from_json(cls, d):
        return cls(d["rule"], tuple(d["src"]), None if d["dst"] is None else tuple(d["dst"]),
                   Fraction(d["mult"]))


@dataclass
class ProofTrace:
    """Reduction steps for one rectangle, or the traces of its four quarters."""

    rect: tuple
    steps: list = field(default_factory=list)
    children: list = field(default_factory=list)

    @property
    def depth(self) -> int:
        return 0 if not self.children else 1 + max(c.depth for c in self.children)

    def leaves(self):
        if not self.children:
            yield self
        for c in self.children:
            yield from c.leaves()

    def to_json(self) -> dict:
        d = {"rect": [str(v) for v in self.rect]}
        if self.children:
            d["children"] = [c.to_json() for c in self.children]
        else:
            d["steps"] = [s.to_json() for s in self.steps]
        return d

    @classmethod
    def from_json(cls, d) -> "ProofTrace":
        return cls(tuple(Fraction(v) for v in d["rect"]),
                   [Step.from_json(s) for s in d.get("steps", [])],
                   [cls.from_json(c) for c in d.get("children", [])])


@dataclass
class Proved:
    trace: ProofTrace

    @property
    def depth(self) -> int:
        return self.trace.depth

    status = "proved"


@dataclass
class Unknown:
    residual: dict

    status = "unknown"


@dataclass
class Disproved:
    witness: tuple      # (x, y) with P(x, y) > 0
    value: float

    status = "disproved"


@dataclass
class DepthExceeded:
    unresolved: list    # rectangles

    status = "depth_exceeded"


def reduce(g: RectGoal):
    """One sweep of the reduction on a goal already at the origin."""
    x0, a, y0, b = g.rect
    if x0 != 0 or y0 != 0:
        raise ValueError("reduce expects a rectangle at the origin; call shift_to_origin")
    coeffs = dict(g.coeffs)
    if not coeffs:
        return Proved(ProofTrace(g.rect, []))
    n = max(i for i, _ in coeffs)
    m = max(j for _, j in coeffs)
    inv_b = 1 / b
    steps: list = []
    row = {j: c for (i, j), c in coeffs.items() if i == n}
    for i in range(n, -1, -1):
        if i < n:
            for (ii, j), c in coeffs.items():
                if ii == i:
                    row[j] = c_add(row.get(j, ()), c)
        for j in range(m + 1):
            c = row.get(j, ())
            if not c or c_sign(c, g.digits) >= 0:
                continue
            if j < m:
                steps.append(Step("negup", (i, j), (i, j + 1), inv_b))
                row[j + 1] = c_add(row.get(j + 1, ()), c_scale(c, inv_b))
            else:
                steps.append(Step("clamp", (i, j), None, Fraction(0)))
            row[j] = ()
        row = {j: c for j, c in row.items() if c}
        if i == 0:
            break
        # fold the nonnegative row down one power of x
        for j in sorted(row):
            steps.append(Step("posup", (i, j), (i - 1, j), a))
        row = {j: c_scale(c, a) for j, c in row.items()}
    if row:
        return Unknown({(0, j): c for j, c in row.items()})
    return Proved(ProofTrace(g.rect, steps))


def _quarters(rect):
    x0, x1, y0, y1 = rect
    xm, ym = (x0 + x1) / 2, (y0 + y1) / 2
    return [(x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)]


def _center(rect):
    x0, x1, y0, y1 = rect
    return (x0 + x1) / 2, (y0 + y1) / 2


def _attempt(g: RectGoal, depth: int):
    """Depth-first search; returns Proved, Disproved or DepthExceeded."""
    res = reduce(shift_to_origin(g))
    if isinstance(res, Proved):
        res.trace.rect = g.rect
        return res
    probes = [_center(g.rect)] + [_center(q) for q in _quarters(g.rect)]
    for px, py in probes:
        val = evaluate(g.coeffs, px, py)
        if c_sign(val, g.digits) > 0:
            return Disproved((px, py), c_value(val))
    if depth >= g.max_depth:
        return DepthExceeded([g.rect])
    return _split(g, depth, None)


def _split(g: RectGoal, depth: int, pool):
    subs = [g.with_rect(q) for q in _quarters(g.rect)]
    if pool is not None:
        results = list(pool.map(_attempt, subs, [depth + 1] * 4))
    else:
        results = [_attempt(s, depth + 1) for s in subs]
    for r in results:
        if isinstance(r, Disproved):
            return r
    pending = [rect for r in results if isinstance(r, DepthExceeded) for rect in r.unresolved]
    if pending:
        return DepthExceeded(pending)
    return Proved(ProofTrace(g.rect, [], [r.trace for r in results]))


def prove(g: RectGoal, threads: int | None = None):
    """Prove P <= 0 on the goal's rectangle, subdividing when needed.

    With ``threads > 1`` the four quarters of the first split are handled in
    separate processes; results are merged in quadrant order so the trace is
    the same as for a serial run.
    """
    if threads is None:
        threads = int(os.environ.get("TRISPEC_THREADS", "1") or 1)
    res = reduce(shift_to_origin(g))
    if isinstance(res, Proved):
        res.trace.rect = g.rect
        return res
    if threads <= 1:
        return _attempt(g, 0)
    probes = [_center(g.rect)] + [_center(q) for q in _quarters(g.rect)]
    for px, py in probes:
        val = evaluate(g.coeffs, px, py)
        if c_sign(val, g.digits) > 0:
            return Disproved((px, py), c_value(val))
    if g.max_depth <= 0:
        return DepthExceeded([g.rect])
    with ProcessPoolExecutor(max_workers=min(threads, 4)) as pool:
        return _split(g, 0, pool)


# ---------------------------------------------------------------------------
# independent checker

def _check_leaf(poly_terms: dict, rect, steps) -> bool:
    """Replay one leaf with its own shift and interval sign test (mpmath iv)."""
    x0, x1, y0, y1 = (Fraction(v) for v in rect)
    a, b = x1 - x0, y1 - y0
    # expand P(x + x0, y + y0) term by term; slot 2k + r holds sqrt3^r pi^k
    cur: dict = {}
    for (i, j, k), q in poly_terms.items():
        for p in range(i + 1):
            for r in range(j + 1):
                f = q * comb(i, p) * comb(j, r) * x0 ** (i - p) * y0 ** (j - r)
                if f:
                    key = (p, r, k)
                    cur[key] = cur.get(key, 0) + f

    def coef(ij):
        return {k: v for (p, r, k), v in cur.items() if (p, r) == ij and v != 0}

    def sign(cdict):
        if not cdict:
            return 0
        for dps in (60, 240):
            with mpmath.workdps(dps):
                piv = mpmath.iv.pi
                s3 = mpmath.iv.sqrt(3)
                tot = mpmath.iv.mpf(0)
                for k, v in cdict.items():
                    term = mpmath.iv.mpf(v.numerator) / v.denominator * piv ** (k // 2)
                    tot += term * s3 if k % 2 else term
                if tot.a > 0:
                    return 1
                if tot.b < 0:
                    return -1
        # undecided at this width: fall back to the exact comparison in Q
        if all(k == 0 for k in cdict):
            v = cdict[0]
            return (v > 0) - (v < 0)
        return None

    for s in steps:
        src = coef(s.src)
        sg = sign(src)
        if sg is None:
            return False
        if s.rule == "negup":
            if sg >= 0 or s.mult != 1 / b or s.dst != (s.src[0], s.src[1] + 1):
                return False
        elif s.rule == "posup":
            if sg < 0 or s.mult != a or s.dst != (s.src[0] - 1, s.src[1]) or s.src[0] < 1:
                return False
        elif s.rule == "clamp":
            if sg >= 0 or s.dst is not None or s.mult != 0:
                return False
        else:
            return False
        for k, v in src.items():
            del cur[(s.src[0], s.src[1], k)]
            if s.dst is not None:
                key = (s.dst[0], s.dst[1], k)
                cur[key] = cur.get(key, 0) + v * s.mult
        cur = {key: v for key, v in cur.items() if v != 0}
    return not cur


def check_trace(p, trace: ProofTrace) -> bool:
    """True iff every leaf of ``trace`` replays to the zero polynomial.

    Also checks that the leaves tile the root rectangle by quartering and,
    when ``p`` is a :class:`RectGoal`, that the root is the goal's rectangle.
    """
    if isinstance(p, RectGoal):
        if tuple(Fraction(v) for v in trace.rect) != p.rect:
            return False
        p = p.to_poly()
    if any(k < 0 for (_, _, k) in p.c):
        return False
    terms: dict = {}
    for (i, j, k), v in p.c.items():
        try:
            a, r = _split_q3(v)
        except ValueError:
            return False
        for slot, q in ((2 * k, a), (2 * k + 1, r)):
            if q:
                terms[(i, j, slot)] = q

    def walk(t: ProofTrace) -> bool:
        if t.children:
            if len(t.children) != 4:
                return False
            if [tuple(c.rect) for c in t.children] != _quarters(tuple(Fraction(v) for v in t.rect)):
                return False
            return all(walk(c) for c in t.children)
        return _check_leaf(terms, t.rect, t.steps)

    return walk(trace)


def load_goal(path) -> RectGoal:
    with open(path) as fh:
        return RectGoal.from_json(json.load(fh))


def save_trace(trace: ProofTrace, path) -> None:
    with open(path, "w") as fh:
        json.dump(trace.to_json(), fh, indent=1)
        fh.write("\n")
