"""Exact vectorised predicates on a common-denominator integer lattice.

Rational coordinates are scaled by the least common multiple of their
denominators.  Orientation tests on the scaled integers are exact; when the
scaled magnitudes stay below 2**29 they run in int64 (no product or sum can
overflow), otherwise they fall back to numpy object arrays of Python ints.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .geometry import AxisRect, Point

_INT64_SAFE = 1 << 29


class Lattice:
    """Scale factor ``D`` mapping a finite set of rationals onto integers."""

    def __init__(self, values: Iterable[Fraction]):
        d = 1
        big = 0
        vals = list(values)
        for v in vals:
            v = Fraction(v)
            d = math.lcm(d, v.denominator)
        for v in vals:
            v = Fraction(v)
            big = max(big, abs(v.numerator * (d // v.denominator)))
        self.denominator = d
        self.dtype = np.int64 if big < _INT64_SAFE else object

    @classmethod
    def with_denominator(cls, d: int, magnitude: int) -> "Lattice":
        """Lattice with scale ``d`` for values whose scaled size is below ``magnitude``."""
        out = object.__new__(cls)
        out.denominator = d
        out.dtype = np.int64 if magnitude < _INT64_SAFE else object
        return out

    def scale(self, v) -> int:
        v = Fraction(v)
        q, r = divmod(v.numerator * self.denominator, v.denominator)
        if r:
            raise ValueError(f"{v} is not on this lattice")
        return q

    def unscale(self, n: int) -> Fraction:
        return Fraction(int(n), self.denominator)

    def array(self, values: Sequence) -> np.ndarray:
        return np.array([self.scale(v) for v in values], dtype=self.dtype)


class RectArrays:
    """Column arrays of scaled rectangle bounds."""

    def __init__(self, rects: Sequence[AxisRect], lattice: Lattice):
        self.lattice = lattice
        self.x0 = lattice.array([r.x0 for r in rects])
        self.y0 = lattice.array([r.y0 for r in rects])
        self.x1 = lattice.array([r.x1 for r in rects])
        self.y1 = lattice.array([r.y1 for r in rects])

    def __len__(self) -> int:
        return len(self.x0)

    def take(self, idx) -> "RectArrays":
        out = object.__new__(RectArrays)
        out.lattice = self.lattice
        out.x0, out.y0, out.x1, out.y1 = self.x0[idx], self.y0[idx], self.x1[idx], self.y1[idx]
        return out

    def max_abs(self) -> int:
        if not len(self.x0):
            return 0
        return max(max(abs(int(v.min())), abs(int(v.max()))) for v in (self.x0, self.y0, self.x1, self.y1))

    def rescaled(self, factor: int, lattice: Lattice) -> "RectArrays":
        """Same rectangles on a refined lattice (scale multiplied by ``factor``)."""
        out = object.__new__(RectArrays)
        out.lattice = lattice
        dtype = object if lattice.dtype is object else np.int64
        out.x0, out.y0, out.x1, out.y1 = (v.astype(dtype) * factor for v in (self.x0, self.y0, self.x1, self.y1))
        return out

    def dist2_from(self, px: int, py: int) -> np.ndarray:
        """Exact squared distance from ``(px, py)`` to each closed rectangle."""
        zero = np.zeros_like(self.x0)
        dx = np.maximum(np.maximum(self.x0 - px, zero), px - self.x1)
        dy = np.maximum(np.maximum(self.y0 - py, zero), py - self.y1)
        return dx * dx + dy * dy


def segments_hit(px, py, qx, qy, rects: RectArrays, mode: str = "open") -> np.ndarray:
    """Matrix ``(m, k)``: does segment i meet rectangle j (open interior or closed set)?

    ``px, py, qx, qy`` are scaled integer arrays (or scalars broadcast to the
    segment count).  Segments must be non-degenerate.
    """
    px, py, qx, qy = (np.atleast_1d(np.asarray(v, dtype=rects.x0.dtype)) for v in (px, py, qx, qy))
    m = max(len(px), len(qx))
    px, py, qx, qy = (np.broadcast_to(v, (m,)) for v in (px, py, qx, qy))
    x0, y0, x1, y1 = rects.x0[None, :], rects.y0[None, :], rects.x1[None, :], rects.y1[None, :]
    lox, hix = np.minimum(px, qx)[:, None], np.maximum(px, qx)[:, None]
    loy, hiy = np.minimum(py, qy)[:, None], np.maximum(py, qy)[:, None]
    dx = (qx - px)[:, None]
    dy = (qy - py)[:, None]
    ux, uy = px[:, None], py[:, None]
    a = dx * (y0 - uy)
    b = dx * (y1 - uy)
    c = dy * (x0 - ux)
    d = dy * (x1 - ux)
    s1, s2, s3, s4 = a - c, a - d, b - c, b - d
    smax = np.maximum(np.maximum(s1, s2), np.maximum(s3, s4))
    smin = np.minimum(np.minimum(s1, s2), np.minimum(s3, s4))
    if mode == "open":
        box = (hix > x0) & (lox < x1) & (hiy > y0) & (loy < y1)
        return box & (smin < 0) & (smax > 0)
    box = (hix >= x0) & (lox <= x1) & (hiy >= y0) & (loy <= y1)
    return box & (smin <= 0) & (smax >= 0)


def points_inside(px, py, rects: RectArrays, mode: str = "open") -> np.ndarray:
    px = np.atleast_1d(np.asarray(px, dtype=rects.x0.dtype))[:, None]
    py = np.atleast_1d(np.asarray(py, dtype=rects.x0.dtype))[:, None]
    if mode == "open":
        return (rects.x0 < px) & (px < rects.x1) & (rects.y0 < py) & (py < rects.y1)
    return (rects.x0 <= px) & (px <= rects.x1) & (rects.y0 <= py) & (py <= rects.y1)


def lattice_for(rects: Sequence[AxisRect], points: Sequence[Point] = (), extra: Iterable = ()) -> Lattice:
    vals: list = []
    for r in rects:
        vals.extend((r.x0, r.y0, r.x1, r.y1))
    for p in points:
        vals.extend((p[0], p[1]))
    vals.extend(extra)
    return Lattice(vals)


def segment_blocked(px: int, py: int, qx: int, qy: int, rects: Sequence[tuple[int, int, int, int]]) -> bool:
    """Scalar open-interior test of one segment against scaled ``(x0, y0, x1, y1)`` tuples.

    Cheaper than :func:`segments_hit` for a single query and a few dozen rectangles.
    """
    lox, hix = (px, qx) if px <= qx else (qx, px)
    loy, hiy = (py, qy) if py <= qy else (qy, py)
    dx, dy = qx - px, qy - py
    for x0, y0, x1, y1 in rects:
        if hix <= x0 or lox >= x1 or hiy <= y0 or loy >= y1:
            continue
        a = dx * (y0 - py)
        b = dx * (y1 - py)
        c = dy * (x0 - px)
        d = dy * (x1 - px)
        s = (a - c, a - d, b - c, b - d)
        if min(s) < 0 < max(s):
            return True
    return False
