"""Finite-difference Dirichlet eigenvalues of raster domains and a symmetrization lab.

A :class:`RasterDomain` is a union of closed square cells of side ``h``.  When
it came from a polygon the polygon is kept, and :func:`eigs` discretises the
polygon itself with the Shortley-Weller stencil on the cell centres
(second-order accurate on a straight boundary).  Otherwise the cell union is
the domain, discretised by the symmetric five-point finite-volume scheme whose
boundary faces sit half a cell from the outer centres.

Eigenvalues come from block inverse iteration with a sparse LU factorisation,
Rayleigh-Ritz on the block, and a Richardson step between two grids a factor
two apart.  For a polygon the requested grid is the finer one; a bitmap is
refined by splitting each cell in four, which keeps the cell union exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.sparse as sps
from scipy import ndimage
from scipy.sparse.linalg import splu

from .errors import ConvergenceError, EmptyDomain

DEFAULT_RESOLUTION = 256
ITERATION_CAP = 100_000
_TOL = 1e-11


@dataclass(frozen=True, eq=False)
class RasterDomain:
    """Cells (row r, col c) cover [x0 + c h, x0 + (c+1) h] x [y0 + r h, y0 + (r+1) h]."""

    h: float
    mask: np.ndarray
    origin: tuple = (0.0, 0.0)
    polygon: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        m = np.asarray(self.mask, dtype=bool)
        object.__setattr__(self, "mask", m)
        if not m.any():
            raise EmptyDomain("raster domain has no interior cells")

    @property
    def cells(self) -> int:
        return int(self.mask.sum())

    @property
    def area(self) -> float:
        return self.cells * self.h * self.h

    @property
    def shape(self):
        return self.mask.shape

    def centers(self):
        ny, nx = self.mask.shape
        xs = self.origin[0] + (np.arange(nx) + 0.5) * self.h
        ys = self.origin[1] + (np.arange(ny) + 0.5) * self.h
        return xs, ys

    def is_connected(self) -> bool:
        _, n = ndimage.label(self.mask)
        return n == 1

    def bitmap_only(self) -> "RasterDomain":
        return RasterDomain(self.h, self.mask, self.origin)

    def refine(self) -> "RasterDomain":
        """Same cell union on a grid twice as fine."""
        m = np.repeat(np.repeat(self.mask, 2, axis=0), 2, axis=1)
        return RasterDomain(self.h / 2, m, self.origin)

    def trimmed(self) -> "RasterDomain":
        rows = np.flatnonzero(self.mask.any(axis=1))
        cols = np.flatnonzero(self.mask.any(axis=0))
        m = self.mask[rows[0]:rows[-1] + 1, cols[0]:cols[-1] + 1]
        o = (self.origin[0] + cols[0] * self.h, self.origin[1] + rows[0] * self.h)
        return RasterDomain(self.h, m, o, self.polygon)

    def same_cells(self, other: "RasterDomain") -> bool:
        a, b = self.trimmed(), other.trimmed()
        return (a.mask.shape == b.mask.shape and np.array_equal(a.mask, b.mask)
                and np.allclose(a.origin, b.origin) and math.isclose(a.h, b.h))

    # -- I/O --------------------------------------------------------------
    def header(self) -> dict:
        ny, nx = self.mask.shape
        return {"h": self.h, "origin": list(self.origin), "rows": ny, "cols": nx,
                "row0": "bottom", "on_line_cells": "H1"}

    def save(self, stem) -> None:
        """Write ``stem.pgm`` (binary P5, row 0 at the bottom) and ``stem.json``."""
        ny, nx = self.mask.shape
        img = np.where(self.mask[::-1], 255, 0).astype(np.uint8)
        with open(f"{stem}.pgm", "wb") as fh:
            fh.write(f"P5\n{nx} {ny}\n255\n".encode())
            fh.write(img.tobytes())
        with open(f"{stem}.json", "w") as fh:
            json.dump(self.header(), fh, indent=1)
            fh.write("\n")

    @classmethod
    def load(cls, stem) -> "RasterDomain":
        with open(f"{stem}.json") as fh:
            hdr = json.load(fh)
        with open(f"{stem}.pgm", "rb") as fh:
            data = fh.read()
        tokens, pos = [], 0
        while len(tokens) < 4:
            while data[pos:pos + 1].isspace():
                pos += 1
            if data[pos:pos + 1] == b"#":
                pos = data.index(b"\n", pos)
                continue
            end = pos
            while not data[end:end + 1].isspace():
                end += 1
            tokens.append(data[pos:end])
            pos = end
        pos += 1
        if tokens[0] != b"P5":
            raise ValueError("not a binary PGM file")
        nx, ny = int(tokens[1]), int(tokens[2])
        img = np.frombuffer(data[pos:pos + nx * ny], dtype=np.uint8).reshape(ny, nx)
        return cls(float(hdr["h"]), img[::-1] > 127, tuple(hdr["origin"]))


# ---------------------------------------------------------------------------
# rasterisation

def _inside(poly: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Strict point-in-polygon by the crossing rule; boundary points count as outside."""
    n = len(poly)
    inside = np.zeros(np.broadcast(x, y).shape, dtype=bool)
    on_edge = np.zeros_like(inside)
    for k in range(n):
        (x1, y1), (x2, y2) = poly[k], poly[(k + 1) % n]
        cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
        within = ((np.minimum(x1, x2) <= x) & (x <= np.maximum(x1, x2))
                  & (np.minimum(y1, y2) <= y) & (y <= np.maximum(y1, y2)))
        on_edge |= within & (np.abs(cross) <= 1e-12 * max(1.0, abs(x2 - x1) + abs(y2 - y1)))
        if y1 == y2:
            continue
        cond = (y1 > y) != (y2 > y)
        xint = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
        inside ^= cond & (x < xint)
    return inside & ~on_edge


def rasterize(polygon, resolution: int = DEFAULT_RESOLUTION) -> RasterDomain:
    """Cells whose centre lies strictly inside ``polygon``.

    ``resolution`` is the number of cells across the longer side of the
    bounding box.
    """
    poly = np.asarray(polygon, dtype=float)
    lo, hi = poly.min(axis=0), poly.max(axis=0)
    extent = float(max(hi - lo))
    if extent <= 0:
        raise EmptyDomain("polygon has no extent")
    h = extent / resolution
    nx = max(1, int(math.ceil((hi[0] - lo[0]) / h - 1e-9)))
    ny = max(1, int(math.ceil((hi[1] - lo[1]) / h - 1e-9)))
    xs = lo[0] + (np.arange(nx) + 0.5) * h
    ys = lo[1] + (np.arange(ny) + 0.5) * h
    X, Y = np.meshgrid(xs, ys)
    mask = _inside(poly, X, Y)
    if not mask.any():
        raise EmptyDomain(f"no cell centre inside the polygon at resolution {resolution}")
    return RasterDomain(h, mask, (float(lo[0]), float(lo[1])), tuple(map(tuple, poly)))


def triangle_polygon(t) -> list:
    """Vertices (0,0), (a,0), apex, for a :class:`~trispec.geometry.Triangle`."""
    from .geometry import metrics

    m = metrics(t)
    a = m.sides[0]
    return [(0.0, 0.0), (a, 0.0), (m.u * 1.0, m.v * 1.0)]


# ---------------------------------------------------------------------------
# discretisation

_DIRS = ((0, 1), (0, -1), (1, 0), (-1, 0))   # (drow, dcol): up, down, right, left in x/y


def _ray_distance(poly: np.ndarray, px, py, dx: float, dy: float) -> np.ndarray:
    """Distance from each point to the polygon boundary along (dx, dy)."""
    best = np.full(np.shape(px), np.inf)
    n = len(poly)
    for k in range(n):
        (x1, y1), (x2, y2) = poly[k], poly[(k + 1) % n]
        ex, ey = x2 - x1, y2 - y1
        den = dx * ey - dy * ex
        if abs(den) < 1e-300:
            continue
        wx, wy = x1 - px, y1 - py
        t = (wx * ey - wy * ex) / den
        s = (wx * dy - wy * dx) / den
        ok = (t > 0) & (s >= -1e-12) & (s <= 1 + 1e-12)
        best = np.where(ok & (t < best), t, best)
    return best


def _assemble(d: RasterDomain):
    """Sparse operator on the interior cells; symmetric only for bitmap domains."""
    mask = d.mask
    ny, nx = mask.shape
    idx = -np.ones(mask.shape, dtype=np.int64)
    rows, cols = np.nonzero(mask)
    n = rows.size
    idx[rows, cols] = np.arange(n)
    h = d.h
    poly = None if d.polygon is None else np.asarray(d.polygon, dtype=float)

    def neighbour(dr, dc):
        r2, c2 = rows + dr, cols + dc
        ok = (r2 >= 0) & (r2 < ny) & (c2 >= 0) & (c2 < nx)
        nb = np.full(n, -1, dtype=np.int64)
        nb[ok] = idx[r2[ok], c2[ok]]
        return nb

    nbs = {dirn: neighbour(*dirn) for dirn in _DIRS}
    if poly is None:
        # finite volumes on the cell union: fluxes h^-2 inside, 2 h^-2 to the wall
        diag = np.zeros(n)
        I, J, V = [], [], []
        for dirn, nb in nbs.items():
            inner = nb >= 0
            diag += np.where(inner, 1.0, 2.0) / (h * h)
            I.append(np.flatnonzero(inner))
            J.append(nb[inner])
            V.append(np.full(inner.sum(), -1.0 / (h * h)))
        I.append(np.arange(n)); J.append(np.arange(n)); V.append(diag)
        A = sps.csc_matrix((np.concatenate(V), (np.concatenate(I), np.concatenate(J))), shape=(n, n))
        return A, True
    xs, ys = d.centers()
    px, py = xs[cols], ys[rows]
    dist = {}
    for (dr, dc), nb in nbs.items():
        dd = np.full(n, h)
        out = nb < 0
        if out.any():
            dd[out] = np.clip(_ray_distance(poly, px[out], py[out], float(dc), float(dr)), 1e-9 * h, h)
        dist[(dr, dc)] = dd
    diag = np.zeros(n)
    I, J, V = [], [], []
    for axis in (((0, 1), (0, -1)), ((1, 0), (-1, 0))):
        a, b = axis
        ha, hb = dist[a], dist[b]
        diag += 2.0 / (ha * hb)
        for dirn, hd in ((a, ha), (b, hb)):
            nb = nbs[dirn]
            inner = nb >= 0
            coef = -2.0 / (hd * (ha + hb))
            I.append(np.flatnonzero(inner))
            J.append(nb[inner])
            V.append(coef[inner])
    I.append(np.arange(n)); J.append(np.arange(n)); V.append(diag)
    A = sps.csc_matrix((np.concatenate(V), (np.concatenate(I), np.concatenate(J))), shape=(n, n))
    return A, False


def _inverse_block(A, k: int, cap: int = ITERATION_CAP, seed: int = 0):
    """Lowest ``k`` eigenpairs by block inverse iteration with Rayleigh-Ritz."""
    n = A.shape[0]
    p = min(n, k + 3)
    if n <= k:
        raise ConvergenceError(f"only {n} unknowns for {k} eigenvalues")
    lu = splu(A.tocsc())
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((n, p)))
    prev = None
    for it in range(1, cap + 1):
        Z = lu.solve(Q)
        Q, _ = np.linalg.qr(Z)
        H = Q.T @ (A @ Q)
        w, V = np.linalg.eig(H)
        order = np.argsort(w.real)
        w, V = w.real[order], V[:, order].real
        Q = Q @ V
        Q, _ = np.linalg.qr(Q)
        cur = w[:k]
        if prev is not None and np.all(np.abs(cur - prev) <= _TOL * np.abs(cur)):
            vecs = Q[:, :k]
            res = np.linalg.norm(A @ vecs - vecs * cur, axis=0) / np.abs(cur)
            return cur, vecs, float(res.max())
        prev = cur
    res = float(np.max(np.abs(cur - prev) / np.abs(cur)))
    raise ConvergenceError("inverse iteration hit the iteration cap", res)


def grid_eigs(d: RasterDomain, k: int = 2):
    """(eigenvalues, eigenvectors, residual) on the domain's own grid."""
    A, _ = _assemble(d)
    return _inverse_block(A, k)


@dataclass(frozen=True)
class EigenResult:
    grid_values: tuple        # per resolution: (lam_1, ..., lam_k)
    resolutions: tuple        # grid spacings h
    extrapolated: tuple
    error: tuple              # |extrapolated - finest| per eigenvalue

    @property
    def lam1(self) -> float:
        return self.extrapolated[0]

    @property
    def lam2(self) -> float:
        return self.extrapolated[1]

    def tolerance(self, i: int = 0) -> float:
        """Error estimate with a small relative floor."""
        return max(self.error[i], 1e-4 * abs(self.extrapolated[i]))

    def to_json(self) -> dict:
        return asdict(self)


def eigs(d: RasterDomain, k: int = 2, *, use_polygon: bool = True) -> EigenResult:
    """Lowest ``k`` eigenvalues with one Richardson step (order 2 assumed)."""
    if k not in (1, 2):
        raise ValueError("k must be 1 or 2")
    if d.polygon is not None and use_polygon:
        # the requested grid is the finest; its partner has half the resolution
        fine = d
        res = round(max(np.ptp(np.asarray(d.polygon), axis=0)) / d.h)
        if res < 8:
            raise ValueError("polygon resolution too small for extrapolation")
        coarse = rasterize(d.polygon, res // 2)
        if 2 * (res // 2) != res:
            raise ValueError("polygon resolution must be even")
    else:
        coarse = d.bitmap_only()
        fine = coarse.refine()
    lc, _, _ = grid_eigs(coarse, k)
    lf, _, _ = grid_eigs(fine, k)
    ext = (4 * lf - lc) / 3
    return EigenResult(
        grid_values=(tuple(map(float, lc)), tuple(map(float, lf))),
        resolutions=(coarse.h, fine.h),
        extrapolated=tuple(map(float, ext)),
        error=tuple(float(x) for x in np.abs(ext - lf)),
    )


def triangle_eigs(t, resolution: int = DEFAULT_RESOLUTION, k: int = 2) -> EigenResult:
    """Oracle eigenvalues of a :class:`~trispec.geometry.Triangle` (its actual size)."""
    return eigs(rasterize(triangle_polygon(t), resolution), k)


# ---------------------------------------------------------------------------
# symmetrization lab

def _index_coord(d: RasterDomain, value: float, axis: str) -> float:
    """Position of a coordinate in cell-centre index units (centre of cell i is i)."""
    o = d.origin[0] if axis == "x" else d.origin[1]
    return (value - o) / d.h - 0.5


def _centered_start(center_idx: float, n: int) -> int:
    # block [s, s+n-1] centred at center_idx; ties go up
    return int(math.floor(center_idx - (n - 1) / 2 + 0.5))


def _runs(col: np.ndarray):
    """(start, length) of the runs of True in a 1-D boolean array."""
    padded = np.concatenate([[False], col, [False]])
    diff = np.diff(padded.astype(np.int8))
    starts = np.flatnonzero(diff == 1)
    ends = np.flatnonzero(diff == -1)
    return list(zip(starts.tolist(), (ends - starts).tolist()))


def _line_sym(d: RasterDomain, axis):
    """Normalise an axis spec to (orientation, coordinate)."""
    kind, value = axis
    if kind not in ("x", "y"):
        raise ValueError("Steiner axes are 'x' (the line y = c) or 'y' (the line x = c)")
    return kind, float(value)


def _restack(d: RasterDomain, axis, place):
    """Apply ``place(runs, centre_idx) -> new runs`` to every chord perpendicular to the axis."""
    kind, value = _line_sym(d, axis)
    # kind 'x': the axis is horizontal, chords are columns (vary in y)
    m = d.mask if kind == "x" else d.mask.T
    origin_axis = "y" if kind == "x" else "x"
    centre = _index_coord(d, value, origin_axis)
    length = m.shape[0]
    # room for any placement around the centre
    lo = min(0, _centered_start(centre, length) - length)
    hi = max(length, _centered_start(centre, length) + 2 * length)
    out = np.zeros((hi - lo, m.shape[1]), dtype=bool)
    for c in range(m.shape[1]):
        runs = _runs(m[:, c])
        if not runs:
            continue
        for s, n in place(runs, centre):
            out[s - lo:s - lo + n, c] = True
    if kind == "x":
        res = RasterDomain(d.h, out, (d.origin[0], d.origin[1] + lo * d.h))
    else:
        res = RasterDomain(d.h, out.T, (d.origin[0] + lo * d.h, d.origin[1]))
    return res.trimmed()


def steiner_symmetrize(d: RasterDomain, axis=("y", None)) -> RasterDomain:
    """Recentre every chord perpendicular to the axis on the axis.

    ``axis = ('y', c)`` is the vertical line x = c (rows are recentred);
    ``('x', c)`` the horizontal line y = c.  ``c = None`` uses the centre of
    the bounding box.
    """
    axis = _default_axis(d, axis)

    def place(runs, centre):
        n = sum(k for _, k in runs)
        return [(_centered_start(centre, n), n)]

    return _restack(d, axis, place)


def continuous_steiner(d: RasterDomain, axis=("y", None), alpha: float = 1.0) -> RasterDomain:
    """Move every run a fraction ``alpha`` of the way to its Steiner position.

    Runs keep their order; at alpha = 1 they stack into the centred block.
    """
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    axis = _default_axis(d, axis)

    def place(runs, centre):
        n = sum(k for _, k in runs)
        target = _centered_start(centre, n)
        out = []
        for s, k in runs:
            out.append((int(math.floor(s + alpha * (target - s) + 0.5)), k))
            target += k
        return out

    return _restack(d, axis, place)


def _default_axis(d: RasterDomain, axis):
    kind, value = axis
    if value is None:
        ny, nx = d.mask.shape
        if kind == "y":
            value = d.origin[0] + nx * d.h / 2
        else:
            value = d.origin[1] + ny * d.h / 2
    return kind, value


@dataclass(frozen=True)
class Line:
    """Oriented line for polarization.

    ``kind``: 'vertical' (x = c), 'horizontal' (y = c), 'diagonal' (y = x + c)
    or 'antidiagonal' (y = -x + c).  ``side = +1`` makes H1 the half-plane where
    x (vertical), y (horizontal) or y - x, y + x exceed the line value;
    ``side = -1`` flips it.
    """

    kind: str
    c: float
    side: int = 1

    def flipped(self) -> "Line":
        return Line(self.kind, self.c, -self.side)


def _lattice_reflection(d: RasterDomain, line: Line):
    """Index-space reflection (i, j) -> (i', j') on the cell-centre lattice, and H1 test."""
    h = d.h
    # cell-centre coordinates: x = ox + (j + 1/2) h, y = oy + (i + 1/2) h
    ox, oy = d.origin[0] + 0.5 * h, d.origin[1] + 0.5 * h
    if line.kind == "vertical":
        c2 = 2 * (line.c - ox) / h
    elif line.kind == "horizontal":
        c2 = 2 * (line.c - oy) / h
    elif line.kind == "diagonal":
        c2 = (line.c - (oy - ox)) / h
    elif line.kind == "antidiagonal":
        c2 = (line.c - (oy + ox)) / h
    else:
        raise ValueError(f"unknown line kind {line.kind!r}")
    k = round(c2)
    if abs(c2 - k) > 1e-9:
        raise ValueError("line is not compatible with the cell lattice")
    s = line.side

    if line.kind == "vertical":
        return (lambda i, j: (i, k - j)), (lambda i, j: s * (2 * j - k) >= 0)
    if line.kind == "horizontal":
        return (lambda i, j: (k - i, j)), (lambda i, j: s * (2 * i - k) >= 0)
    if line.kind == "diagonal":
        # i - j = k in index units
        return (lambda i, j: (j + k, i - k)), (lambda i, j: s * ((i - j) - k) >= 0)
    return (lambda i, j: (k - j, k - i)), (lambda i, j: s * ((i + j) - k) >= 0)


def polarize(d: RasterDomain, line: Line) -> RasterDomain:
    """Two-point rearrangement towards H1; cells on the line count as H1."""
    ny, nx = d.mask.shape
    pad = ny + nx
    big = np.zeros((ny + 2 * pad, nx + 2 * pad), dtype=bool)
    big[pad:pad + ny, pad:pad + nx] = d.mask
    origin = (d.origin[0] - pad * d.h, d.origin[1] - pad * d.h)
    grid = RasterDomain(d.h, big, origin)
    refl, in_h1 = _lattice_reflection(grid, line)
    I, J = np.indices(big.shape)
    RI, RJ = refl(I, J)
    valid = (RI >= 0) & (RI < big.shape[0]) & (RJ >= 0) & (RJ < big.shape[1])
    if not valid[big].all():
        raise ValueError("reflection left the working canvas")
    mirror = np.zeros_like(big)
    mirror[valid] = big[RI[valid], RJ[valid]]
    h1 = in_h1(I, J)
    on_line = (RI == I) & (RJ == J)
    out = np.where(on_line, big, np.where(h1, big | mirror, big & mirror))
    return RasterDomain(d.h, out, origin).trimmed()
