"""Test-function pairs and (U, M) rectangles used by the variational lambda_2 bounds.

Every case pairs two exact eigenfunctions, each pulled back to the triangle by
the affine map onto its own reference triangle.  Both functions are expressed
on the reference triangle of the first one (the *hub*), so a case is fully
described by three exact Gram sets on the hub.  Those Gram sets are computed
once and stored in ``gram_constants.json``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import numpy as np

from .trig import CATALOG, GramSet, ReferenceTriangle, TrigPoly, gram

CONSTANTS_VERSION = 2
CONSTANTS_FILE = "gram_constants.json"

INF = None


@dataclass(frozen=True)
class Rect:
    """Closed (U, M) rectangle; ``m1 is None`` means unbounded in M."""

    u0: Fraction
    u1: Fraction
    m0: Fraction
    m1: Fraction | None

    def contains(self, U: float, M: float) -> bool:
        if not (float(self.u0) <= U <= float(self.u1)):
            return False
        if M < float(self.m0):
            return False
        return self.m1 is None or M <= float(self.m1)

    def as_tuple(self):
        return (self.u0, self.u1, self.m0, self.m1)


def _label(combo) -> str:
    return " + ".join(name if w == 1 else f"{w}*{name}" for name, w in combo)


@dataclass(frozen=True)
class CaseSpec:
    """Trial space span(f1, f2); each f is a weighted sum of catalogue functions."""

    case_id: int
    theorem: str          # "gap" | "ratio"
    first: tuple          # ((name, weight), ...)
    second: tuple
    base: str             # "short" | "long" side on the x-axis
    rect: Rect

    @property
    def key(self) -> str:
        return f"({_label(self.first)}) + alpha*({_label(self.second)})"


F = Fraction

_PAIRS = {
    1: ((("phi_S21", F(1)),), (("phi_S11", F(1)),), "short"),
    2: ((("phi_A21", F(1)),), (("phi_S11", F(1)),), "long"),
    3: ((("phi_A31", F(1)),), (("phi_A21", F(1)),), "short"),
    4: ((("rip_2", F(1)),), (("rip_1", F(1)),), "short"),
    # the first test pair with half of the right-isosceles phi_2 added to its
    # leading function
    5: ((("phi_S21", F(1)), ("rip_2", F(1, 2))), (("phi_S11", F(1)),), "short"),
}

# case 3 lives on the half-equilateral triangle even though its functions are
# written in equilateral coordinates
_HUB_OVERRIDE = {3: "half_equilateral"}

_GAP_RECTS = {
    1: Rect(F(0), F(3, 100), F(103, 100), F(139, 100)),
    2: Rect(F(0), F(1, 5), F(1), F(103, 100)),
    3: Rect(F(0), F(1), F(139, 100), INF),
    4: Rect(F(1, 5), F(1), F(1), F(139, 100)),
    5: Rect(F(3, 100), F(1, 5), F(103, 100), F(139, 100)),
}

# keyed by test pair; the right-isosceles pair covers the wide strip and the
# mixed pair the narrow one
_RATIO_RECTS = {
    1: Rect(F(0), F(9, 100), F(1), F(137, 100)),
    3: Rect(F(0), F(21, 50), F(137, 100), F(41, 20)),
    4: Rect(F(1, 5), F(21, 50), F(1), F(137, 100)),
    5: Rect(F(9, 100), F(1, 5), F(1), F(137, 100)),
}

LARGE_M_THRESHOLD = 2.05


def _spec(cid, theorem, rect):
    f1, f2, base = _PAIRS[cid]
    return CaseSpec(cid, theorem, f1, f2, base, rect)


GAP_CASES = {cid: _spec(cid, "gap", r) for cid, r in _GAP_RECTS.items()}
RATIO_CASES = {cid: _spec(cid, "ratio", r) for cid, r in _RATIO_RECTS.items()}


def cases_for(theorem: str) -> dict:
    if theorem == "gap":
        return GAP_CASES
    if theorem == "ratio":
        return RATIO_CASES
    raise ValueError(f"unknown theorem {theorem!r}")


# ---------------------------------------------------------------------------
# hub geometry

def hub_reference(cid: int) -> ReferenceTriangle:
    from .trig import REFERENCES

    if cid in _HUB_OVERRIDE:
        return REFERENCES[_HUB_OVERRIDE[cid]]
    return CATALOG[_PAIRS[cid][0][0][0]].reference


def _affine_between(src: ReferenceTriangle, dst: ReferenceTriangle):
    """Exact affine map sending the vertices of ``src`` to those of ``dst``."""
    (a0, b0), (a1, b1), (a2, b2) = src.vertices
    (c0, d0), (c1, d1), (c2, d2) = dst.vertices
    # columns of S = [W1-W0, W2-W0], D likewise; B = D S^{-1}
    s11, s21, s12, s22 = a1 - a0, b1 - b0, a2 - a0, b2 - b0
    t11, t21, t12, t22 = c1 - c0, d1 - d0, c2 - c0, d2 - d0
    det = s11 * s22 - s12 * s21
    i11, i12, i21, i22 = s22 / det, -s12 / det, -s21 / det, s11 / det
    B = ((t11 * i11 + t12 * i21, t11 * i12 + t12 * i22),
         (t21 * i11 + t22 * i21, t21 * i12 + t22 * i22))
    shift = (c0 - (B[0][0] * a0 + B[0][1] * b0), d0 - (B[1][0] * a0 + B[1][1] * b0))
    return B, shift


def _combo(combo, frame: ReferenceTriangle) -> TrigPoly:
    out = TrigPoly()
    for name, w in combo:
        e = CATALOG[name]
        f = e.build().scale(w)
        if e.reference.name != frame.name:
            B, shift = _affine_between(frame, e.reference)
            f = f.compose(B, shift)
        out = out + f
    return out


def hub_functions(cid: int) -> tuple[TrigPoly, TrigPoly]:
    """Both trial functions written in the coordinate frame of the leading function."""
    f1c, f2c, _ = _PAIRS[cid]
    frame = CATALOG[f1c[0][0]].reference
    return _combo(f1c, frame), _combo(f2c, frame)


def compute_case_grams(cid: int) -> tuple[GramSet, GramSet, GramSet]:
    f1, f2 = hub_functions(cid)
    hub = hub_reference(cid)
    return gram(f1, f1, hub), gram(f1, f2, hub), gram(f2, f2, hub)


def build_constants() -> dict:
    out = {"version": CONSTANTS_VERSION, "cases": {}}
    for cid in sorted(_PAIRS):
        g11, g12, g22 = compute_case_grams(cid)
        f1c, f2c, _ = _PAIRS[cid]
        out["cases"][str(cid)] = {
            "functions": [_label(f1c), _label(f2c)],
            "hub": hub_reference(cid).name,
            "g11": g11.encode(),
            "g12": g12.encode(),
            "g22": g22.encode(),
        }
    return out


def write_constants(path) -> None:
    with open(path, "w") as fh:
        json.dump(build_constants(), fh, indent=1, sort_keys=True)
        fh.write("\n")


@lru_cache(maxsize=None)
def load_constants() -> dict:
    text = resources.files("trispec").joinpath(CONSTANTS_FILE).read_text()
    data = json.loads(text)
    if data.get("version") != CONSTANTS_VERSION:
        raise RuntimeError("gram constants file has the wrong version; regenerate it")
    return data


@lru_cache(maxsize=None)
def case_grams(cid: int) -> tuple[GramSet, GramSet, GramSet]:
    d = load_constants()["cases"][str(cid)]
    return tuple(GramSet.decode(d[k]) for k in ("g11", "g12", "g22"))


@lru_cache(maxsize=None)
def case_grams_float(cid: int):
    """(mass 2x2, grad tensor [i][j][p][q]) as numpy arrays."""
    gs = case_grams(cid)
    mass = np.empty((2, 2))
    grad = np.empty((2, 2, 2, 2))
    for (i, j), g in zip(((0, 0), (0, 1), (1, 1)), gs):
        m = float(g.mass)
        G = np.array([[float(g.grad[p][q]) for q in range(2)] for p in range(2)])
        mass[i, j] = m
        grad[i, j] = G
        if i != j:
            mass[j, i] = m
            grad[j, i] = G.T
    return mass, grad


def hub_vertices_exact(cid: int):
    return hub_reference(cid).vertices


def hub_vertices_float(cid: int):
    return np.array([[float(x), float(y)] for x, y in hub_reference(cid).vertices])
