"""Finite-stage fractal obstacle sets.

Four generator families are supported, plus arbitrary rectangle lists:

* ``CantorProduct(ratio, stage)``: product of two linear Cantor sets that keep
  the outer ``ratio`` fraction of every interval.
* ``FatCantorProduct(total_gap, stage)``: product of two Smith-Volterra-Cantor
  sets; step ``k`` removes ``2**(k-1)`` centred gaps of length
  ``2*total_gap*4**-k``, so the limit set has measure ``1 - total_gap``.
* ``HoleyStaircase(stage)``: boxes covering the Cantor staircase graph over the
  middle-third Cantor set.
* ``TaborGrid(min_level, max_level, delta)``: the composition
  ``S_min o ... o S_max`` applied to the unit square, with ``S_n`` the union of
  ``3 * (4**n - 1)`` similitudes of ratio ``(1 - 2 delta) 4**-n``.

Explicit expansion produces pairwise-disjoint closed rectangles.  Deep stages
are handled implicitly: :func:`segment_hits` descends the generator tree and
only expands boxes the segment can reach.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, NamedTuple, Optional, Sequence, Union

import numpy as np

from . import _exact
from .errors import DomainError, ExpansionLimitError
from .geometry import AxisRect, Point, Segment, rational

DEFAULT_LIMIT = 10**6

Interval = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class CantorProduct:
    ratio: Fraction = Fraction(1, 3)
    stage: int = 1

    def __post_init__(self):
        object.__setattr__(self, "ratio", rational(self.ratio))
        if not 0 < self.ratio < Fraction(1, 2):
            raise DomainError("Cantor ratio must lie in (0, 1/2)")
        if self.stage < 0:
            raise DomainError("stage must be nonnegative")


@dataclass(frozen=True)
class FatCantorProduct:
    total_gap: Fraction = Fraction(2, 25)
    stage: int = 1

    def __post_init__(self):
        object.__setattr__(self, "total_gap", rational(self.total_gap))
        if not 0 < self.total_gap < 1:
            raise DomainError("total gap must lie in (0, 1)")
        if self.stage < 0:
            raise DomainError("stage must be nonnegative")


@dataclass(frozen=True)
class HoleyStaircase:
    stage: int = 1

    def __post_init__(self):
        if self.stage < 0:
            raise DomainError("stage must be nonnegative")


@dataclass(frozen=True)
class TaborGrid:
    min_level: int = 7
    max_level: int = 7
    delta: Fraction = Fraction(1, 32)

    def __post_init__(self):
        object.__setattr__(self, "delta", rational(self.delta))
        if self.min_level < 2:
            raise DomainError("min_level must be at least 2")
        if self.max_level < self.min_level:
            raise DomainError("max_level must be >= min_level")
        if not 0 < self.delta < Fraction(1, 2):
            raise DomainError("delta must lie in (0, 1/2)")
        if self.min_level < 7:
            warnings.warn(
                "TaborGrid with min_level < 7: lines through the middle band may miss the set",
                stacklevel=3,
            )

    @property
    def certified(self) -> bool:
        """Parameters under which every stage provably blocks the slope-limited lines."""
        return self.min_level >= 7 and 12 * self.delta < Fraction(1, 2)


@dataclass(frozen=True)
class CustomRects:
    rects: tuple[AxisRect, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rects", tuple(self.rects))


FractalSpec = Union[CantorProduct, FatCantorProduct, HoleyStaircase, TaborGrid, CustomRects]


# -- linear stage sets -------------------------------------------------------------


def cantor_intervals(ratio: Fraction, stage: int) -> list[Interval]:
    intervals = [(Fraction(0), Fraction(1))]
    for _ in range(stage):
        nxt = []
        for lo, hi in intervals:
            step = (hi - lo) * ratio
            nxt.append((lo, lo + step))
            nxt.append((hi - step, hi))
        intervals = nxt
    return intervals


def fat_gap_length(total_gap: Fraction, step: int) -> Fraction:
    """Length of each gap removed at step ``step`` (1-based)."""
    return 2 * total_gap / Fraction(4) ** step


def _fat_split(lo: Fraction, hi: Fraction, total_gap: Fraction, step: int) -> tuple[Interval, Interval]:
    half = fat_gap_length(total_gap, step) / 2
    mid = (lo + hi) / 2
    return (lo, mid - half), (mid + half, hi)


def fat_cantor_intervals(total_gap: Fraction, stage: int) -> list[Interval]:
    intervals = [(Fraction(0), Fraction(1))]
    for k in range(1, stage + 1):
        nxt = []
        for lo, hi in intervals:
            nxt.extend(_fat_split(lo, hi, total_gap, k))
        intervals = nxt
    return intervals


def fat_cantor_measure(total_gap, stage: int) -> Fraction:
    g = rational(total_gap)
    return 1 - g * (1 - Fraction(1, 2**stage))


# -- Tabor grid maps ---------------------------------------------------------------


def tabor_scale(level: int, delta: Fraction) -> Fraction:
    return (1 - 2 * delta) / Fraction(4) ** level


def tabor_offsets(level: int, delta: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Translation vectors of the similitudes making up ``S_level``."""
    col = Fraction(1, 2**level)
    row = Fraction(1, 4**level)
    out = []
    for i in range(3):
        shift = delta + (Fraction(1, 2) if i == 2 else 0)
        for k in range(4**level - 1):
            out.append((i * col, (k + shift) * row))
    return out


# -- counts and measures -----------------------------------------------------------


def rect_count(spec: FractalSpec) -> int:
    if isinstance(spec, (CantorProduct, FatCantorProduct)):
        return 4**spec.stage
    if isinstance(spec, HoleyStaircase):
        return 2**spec.stage
    if isinstance(spec, TaborGrid):
        return math.prod(3 * (4**n - 1) for n in range(spec.min_level, spec.max_level + 1))
    if isinstance(spec, CustomRects):
        return len(spec.rects)
    raise TypeError(f"unknown spec {spec!r}")


class StageMeasures(NamedTuple):
    linear: Optional[Fraction]
    planar: Fraction
    boundary: Fraction
    cover_sum: float


def stage_measures(spec: FractalSpec) -> StageMeasures:
    """Exact measures of the finite stage.

    ``linear`` is the length of the underlying linear stage set (None where
    the family has none), ``planar`` the area of the union, ``boundary`` the
    total perimeter and ``cover_sum`` the sum of rectangle diameters.
    """
    if isinstance(spec, CantorProduct):
        n, r = spec.stage, spec.ratio
        side = r**n
        count = 4**n
        return StageMeasures((2 * r) ** n, count * side * side, 4 * count * side, count * math.sqrt(2) * float(side))
    if isinstance(spec, FatCantorProduct):
        n = spec.stage
        m = fat_cantor_measure(spec.total_gap, n)
        side = m / 2**n
        count = 4**n
        return StageMeasures(m, m * m, 4 * count * side, count * math.sqrt(2) * float(side))
    if isinstance(spec, HoleyStaircase):
        n = spec.stage
        w, h = Fraction(1, 3**n), Fraction(1, 2**n)
        count = 2**n
        planar = count * w * h
        return StageMeasures(count * w, planar, 2 * count * (w + h), count * math.hypot(float(w), float(h)))
    if isinstance(spec, TaborGrid):
        count = rect_count(spec)
        side = math.prod(tabor_scale(n, spec.delta) for n in range(spec.min_level, spec.max_level + 1))
        return StageMeasures(None, count * side * side, 4 * count * side, count * math.sqrt(2) * float(side))
    if isinstance(spec, CustomRects):
        planar = sum((r.area for r in spec.rects), Fraction(0))
        boundary = sum((r.perimeter for r in spec.rects), Fraction(0))
        cover = math.fsum(math.hypot(float(r.width), float(r.height)) for r in spec.rects)
        return StageMeasures(None, planar, boundary, cover)
    raise TypeError(f"unknown spec {spec!r}")


# -- explicit generation -----------------------------------------------------------


def _explicit_rects(spec: FractalSpec) -> list[AxisRect]:
    if isinstance(spec, CantorProduct):
        iv = cantor_intervals(spec.ratio, spec.stage)
        return [AxisRect(a, c, b, d) for a, b in iv for c, d in iv]
    if isinstance(spec, FatCantorProduct):
        iv = fat_cantor_intervals(spec.total_gap, spec.stage)
        return [AxisRect(a, c, b, d) for a, b in iv for c, d in iv]
    if isinstance(spec, HoleyStaircase):
        iv = cantor_intervals(Fraction(1, 3), spec.stage)
        h = Fraction(1, 2**spec.stage)
        return [AxisRect(a, i * h, b, (i + 1) * h) for i, (a, b) in enumerate(iv)]
    if isinstance(spec, TaborGrid):
        # Innermost map first: E = S_min o ... o S_max([0,1]^2).
        cur = [(Fraction(0), Fraction(0), Fraction(1))]  # (x, y, side) of squares
        for level in range(spec.max_level, spec.min_level - 1, -1):
            s = tabor_scale(level, spec.delta)
            offs = tabor_offsets(level, spec.delta)
            cur = [(tx + s * x, ty + s * y, s * side) for tx, ty in offs for x, y, side in cur]
        return [AxisRect(x, y, x + side, y + side) for x, y, side in cur]
    if isinstance(spec, CustomRects):
        return list(spec.rects)
    raise TypeError(f"unknown spec {spec!r}")


def find_overlap(rects: Sequence[AxisRect]) -> Optional[tuple[int, int]]:
    """Return indices of two rectangles whose closures meet, or None.

    Bucketed by a uniform grid sized to the largest rectangle side, so the
    check is near-linear for the built-in families.
    """
    n = len(rects)
    if n < 2:
        return None
    if n <= 64:
        for i in range(n):
            for j in range(i + 1, n):
                if rects[i].closed_overlap(rects[j]):
                    return i, j
        return None
    cell = max(max(float(r.width), float(r.height)) for r in rects)
    buckets: dict[tuple[int, int], list[int]] = {}
    for idx, r in enumerate(rects):
        i0, i1 = math.floor(float(r.x0) / cell), math.floor(float(r.x1) / cell)
        j0, j1 = math.floor(float(r.y0) / cell), math.floor(float(r.y1) / cell)
        for i in range(i0, i1 + 1):
            for j in range(j0, j1 + 1):
                bucket = buckets.setdefault((i, j), [])
                for other in bucket:
                    if rects[other].closed_overlap(r):
                        return other, idx
                bucket.append(idx)
    return None


@dataclass(frozen=True, eq=False)
class ObstacleSet:
    """Finite family of pairwise-disjoint closed rectangles, or an implicit stage handle.

    Explicit sets carry their rectangles; implicit ones (``rects is None``)
    keep only the generating spec and answer segment queries by descent.
    """

    rects: Optional[tuple[AxisRect, ...]]
    spec: Optional[FractalSpec] = None
    measure: Fraction = Fraction(0)
    boundary_length: Fraction = Fraction(0)
    one_dim_measure: Optional[Fraction] = None
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        if self.rects is None:
            if self.spec is None:
                raise DomainError("an implicit obstacle set needs a spec")
            return
        object.__setattr__(self, "rects", tuple(self.rects))
        if self.validate:
            bad = find_overlap(self.rects)
            if bad is not None:
                i, j = bad
                raise DomainError(f"rectangles {i} and {j} are not disjoint as closed sets")

    @classmethod
    def from_rects(cls, rects: Sequence[AxisRect], spec: Optional[FractalSpec] = None, validate: bool = True):
        rects = tuple(rects)
        measure = sum((r.area for r in rects), Fraction(0))
        boundary = sum((r.perimeter for r in rects), Fraction(0))
        linear = None
        if spec is not None and not isinstance(spec, CustomRects):
            linear = stage_measures(spec).linear
        return cls(rects, spec, measure, boundary, linear, validate)

    @property
    def implicit(self) -> bool:
        return self.rects is None

    def __len__(self) -> int:
        if self.rects is None:
            return rect_count(self.spec)
        return len(self.rects)

    def bounding_box(self) -> Optional[AxisRect]:
        if not self.rects:
            return None
        return AxisRect(
            min(r.x0 for r in self.rects),
            min(r.y0 for r in self.rects),
            max(r.x1 for r in self.rects),
            max(r.y1 for r in self.rects),
        )

    @cached_property
    def _base_arrays(self) -> _exact.RectArrays:
        lat = _exact.lattice_for(self.rects)
        return _exact.RectArrays(self.rects, lat)

    def arrays_for(self, points: Sequence[Point]) -> tuple[_exact.Lattice, _exact.RectArrays]:
        """Scaled rectangle arrays on a lattice that also contains ``points``."""
        base = self._base_arrays
        coords = [Fraction(c) for p in points for c in p]
        d = base.lattice.denominator
        for c in coords:
            d = math.lcm(d, c.denominator)
        factor = d // base.lattice.denominator
        magnitude = max([base.max_abs() * factor] + [abs(c.numerator * (d // c.denominator)) for c in coords])
        lat = _exact.Lattice.with_denominator(d, magnitude)
        if factor == 1 and (lat.dtype is object) == (base.lattice.dtype is object):
            return lat, base
        return lat, base.rescaled(factor, lat)


def generate(spec: FractalSpec, limit: int = DEFAULT_LIMIT) -> ObstacleSet:
    """Explicit rectangle list for a finite stage.

    Raises :class:`ExpansionLimitError` when more than ``limit`` rectangles
    would be produced; use :func:`obstacle_set` or the implicit queries then.
    """
    count = rect_count(spec)
    if count > limit:
        raise ExpansionLimitError(
            f"{spec!r} expands to {count} rectangles (limit {limit}); "
            "use obstacle_set() / segment_hits() on the implicit handle instead"
        )
    rects = _explicit_rects(spec)
    # Built-in families are disjoint by construction; only the tests re-verify them.
    return ObstacleSet.from_rects(rects, spec, validate=isinstance(spec, CustomRects))


def obstacle_set(spec: FractalSpec, limit: int = DEFAULT_LIMIT) -> ObstacleSet:
    """Explicit set when small enough, implicit handle otherwise."""
    if rect_count(spec) <= limit:
        return generate(spec, limit)
    m = stage_measures(spec)
    return ObstacleSet(None, spec, m.planar, m.boundary, m.linear)


# -- segment queries ---------------------------------------------------------------


def _closed_box_hit(p: Point, q: Point, x0, y0, x1, y1) -> bool:
    if max(p.x, q.x) < x0 or min(p.x, q.x) > x1 or max(p.y, q.y) < y0 or min(p.y, q.y) > y1:
        return False
    dx, dy = q.x - p.x, q.y - p.y
    if dx == 0 and dy == 0:
        return True
    s = (
        dx * (y0 - p.y) - dy * (x0 - p.x),
        dx * (y0 - p.y) - dy * (x1 - p.x),
        dx * (y1 - p.y) - dy * (x0 - p.x),
        dx * (y1 - p.y) - dy * (x1 - p.x),
    )
    return min(s) <= 0 <= max(s)


def _tree_children(spec, box, depth):
    x0, y0, x1, y1 = box
    step = depth + 1
    if isinstance(spec, CantorProduct):
        r = spec.ratio
        xs = ((x0, x0 + (x1 - x0) * r), (x1 - (x1 - x0) * r, x1))
        ys = ((y0, y0 + (y1 - y0) * r), (y1 - (y1 - y0) * r, y1))
        return [(a, c, b, d) for a, b in xs for c, d in ys]
    if isinstance(spec, FatCantorProduct):
        xs = _fat_split(x0, x1, spec.total_gap, step)
        ys = _fat_split(y0, y1, spec.total_gap, step)
        return [(a, c, b, d) for a, b in xs for c, d in ys]
    if isinstance(spec, HoleyStaircase):
        w = (x1 - x0) / 3
        ym = (y0 + y1) / 2
        return [(x0, y0, x0 + w, ym), (x1 - w, ym, x1, y1)]
    raise TypeError(spec)


def _tree_hits(spec, p: Point, q: Point) -> bool:
    stack = [((Fraction(0), Fraction(0), Fraction(1), Fraction(1)), 0)]
    while stack:
        box, depth = stack.pop()
        if not _closed_box_hit(p, q, *box):
            continue
        if depth == spec.stage:
            return True
        stack.extend((child, depth + 1) for child in _tree_children(spec, box, depth))
    return False


def _clip_x(p: Point, q: Point, lo: Fraction, hi: Fraction):
    """Portion of segment pq with x in [lo, hi], as a pair of points, or None."""
    if p.x > q.x:
        p, q = q, p
    if q.x < lo or p.x > hi:
        return None
    if p.x == q.x:
        return p, q
    dx = q.x - p.x
    t0 = max(Fraction(0), (lo - p.x) / dx)
    t1 = min(Fraction(1), (hi - p.x) / dx)
    a = Point(p.x + t0 * dx, p.y + t0 * (q.y - p.y))
    b = Point(p.x + t1 * dx, p.y + t1 * (q.y - p.y))
    return a, b


def _tabor_hits(spec: TaborGrid, p: Point, q: Point, level: int) -> bool:
    delta = spec.delta
    s = tabor_scale(level, delta)
    col = Fraction(1, 2**level)
    rows = 4**level
    side_rows = 1 - 2 * delta  # box height in row units
    for i in range(3):
        cx0 = i * col
        piece = _clip_x(p, q, cx0, cx0 + s)
        if piece is None:
            continue
        a, b = piece
        ylo, yhi = min(a.y, b.y), max(a.y, b.y)
        off = delta + (Fraction(1, 2) if i == 2 else 0)
        kmin = max(0, math.ceil(ylo * rows - off - side_rows))
        kmax = min(rows - 2, math.floor(yhi * rows - off))
        for k in range(kmin, kmax + 1):
            if level == spec.max_level:
                return True
            by = (k + off) / rows
            pa = Point((a.x - cx0) / s, (a.y - by) / s)
            pb = Point((b.x - cx0) / s, (b.y - by) / s)
            if _tabor_hits(spec, pa, pb, level + 1):
                return True
    return False


def segment_hits(target: Union[FractalSpec, ObstacleSet], s: Segment, limit: int = DEFAULT_LIMIT) -> bool:
    """Exact test: does the closed segment ``s`` meet the closed stage set?

    Explicit obstacle sets are scanned with vectorised integer predicates;
    TaborGrid stages and oversized product stages are tested by descent.
    """
    spec = target.spec if isinstance(target, ObstacleSet) else target
    p = Point(rational(s.p.x), rational(s.p.y))
    q = Point(rational(s.q.x), rational(s.q.y))
    if isinstance(target, ObstacleSet) and not target.implicit:
        return _explicit_hits(target, p, q)
    if isinstance(spec, TaborGrid):
        return _tabor_hits(spec, p, q, spec.min_level)
    if isinstance(spec, (CantorProduct, FatCantorProduct, HoleyStaircase)):
        if rect_count(spec) <= 4096:
            return _explicit_hits(_cached_generate(spec), p, q)
        return _tree_hits(spec, p, q)
    if isinstance(spec, CustomRects):
        return _explicit_hits(_cached_generate(spec), p, q)
    raise TypeError(f"unknown target {target!r}")


_GEN_CACHE: dict = {}


def _cached_generate(spec: FractalSpec) -> ObstacleSet:
    obs = _GEN_CACHE.get(spec)
    if obs is None:
        obs = generate(spec)
        if len(_GEN_CACHE) > 32:
            _GEN_CACHE.clear()
        _GEN_CACHE[spec] = obs
    return obs


def _explicit_hits(obs: ObstacleSet, p: Point, q: Point) -> bool:
    if not obs.rects:
        return False
    if p == q:
        return any(r.contains_closed(p) for r in obs.rects)
    lat, arrays = obs.arrays_for([p, q])
    hit = _exact.segments_hit(lat.scale(p.x), lat.scale(p.y), lat.scale(q.x), lat.scale(q.y), arrays, mode="closed")
    return bool(hit.any())


# -- box counting ------------------------------------------------------------------


def box_count(target: Union[FractalSpec, ObstacleSet], grid_size) -> int:
    """Number of cells of the lattice ``grid_size * Z^2`` whose interior meets the stage set.

    For grid sizes aligned with the construction (``3**-k`` for middle-third
    families) this is the exact covering number; otherwise it is the count of
    cells touched in positive area, a conservative cover.
    """
    h = rational(grid_size)
    if h <= 0:
        raise DomainError("grid size must be positive")
    obs = target if isinstance(target, ObstacleSet) else generate(target)
    if obs.implicit:
        raise ExpansionLimitError("box counting needs an explicit stage")
    cells: set[tuple[int, int]] = set()
    for r in obs.rects:
        i0, i1 = math.floor(r.x0 / h), math.ceil(r.x1 / h) - 1
        j0, j1 = math.floor(r.y0 / h), math.ceil(r.y1 / h) - 1
        for i in range(i0, i1 + 1):
            for j in range(j0, j1 + 1):
                cells.add((i, j))
    return len(cells)


def box_dimension(target: Union[FractalSpec, ObstacleSet], grid_sizes: Sequence) -> tuple[float, list[int]]:
    """Least-squares slope of log N(h) against log(1/h), with the counts."""
    obs = target if isinstance(target, ObstacleSet) else generate(target)
    counts = [box_count(obs, h) for h in grid_sizes]
    x = np.log([1.0 / float(rational(h)) for h in grid_sizes])
    y = np.log(np.array(counts, dtype=float))
    slope = float(np.polyfit(x, y, 1)[0])
    return slope, counts


def iter_rects(target: Union[FractalSpec, ObstacleSet]) -> Iterator[AxisRect]:
    obs = target if isinstance(target, ObstacleSet) else generate(target)
    yield from obs.rects or ()
