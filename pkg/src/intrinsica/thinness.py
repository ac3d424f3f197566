"""Thinness probes and decisions.

* :func:`segment_witness`, a Monte-Carlo search for a straight segment between
  two balls that avoids the set.
* :func:`claim1_certificate` and :func:`claim1_sample_lines`, the blocking
  argument for the Tabor grid and exact line sampling against it.
* :func:`cone_reach_feasible`, an exact decision for cone-constrained
  (Lipschitz-graph) connectivity among rectangles.
* :func:`ball_chain` and :func:`chain_angle_quality`, the geometric chain of
  shrinking balls accumulating at both endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DomainError, InvalidEndpointError
from .fractals import CustomRects, FractalSpec, ObstacleSet, TaborGrid, generate, segment_hits
from .geometry import AxisRect, Point, Polyline, Segment, rational

_WITNESS_GRID = 2**30
_LINE_GRID = 2**20


# -- interval thinness -------------------------------------------------------------


@dataclass(frozen=True)
class WitnessResult:
    segment: Optional[Segment]
    samples: int
    seed: int

    @property
    def found(self) -> bool:
        return self.segment is not None


def _disk_points(rng: np.random.Generator, center: Point, radius: Fraction, n: int) -> list[Point]:
    """``n`` uniform points of the open disk, rounded to a dyadic grid and kept strictly inside."""
    out: list[Point] = []
    cx, cy = float(center.x), float(center.y)
    while len(out) < n:
        m = n - len(out)
        rad = float(radius) * np.sqrt(rng.random(m))
        ang = 2 * np.pi * rng.random(m)
        xs = np.rint((cx + rad * np.cos(ang)) * _WITNESS_GRID).astype(np.int64)
        ys = np.rint((cy + rad * np.sin(ang)) * _WITNESS_GRID).astype(np.int64)
        for x, y in zip(xs.tolist(), ys.tolist()):
            p = Point(Fraction(x, _WITNESS_GRID), Fraction(y, _WITNESS_GRID))
            if (p.x - center.x) ** 2 + (p.y - center.y) ** 2 < radius * radius:
                out.append(p)
    return out


def segment_witness(
    a,
    b,
    eps,
    target: Union[FractalSpec, ObstacleSet, None],
    samples: int = 1000,
    seed: int = 0,
    batch: int = 1024,
) -> WitnessResult:
    """Search for ``[a', b']`` with ``a'`` in ``B(a, eps)``, ``b'`` in ``B(b, eps)`` missing the closed set.

    Returns the first such segment in draw order, re-verified exactly, or
    none after ``samples`` draws.  Absence is a report, not a proof.
    """
    a = Point(rational(a[0]), rational(a[1]))
    b = Point(rational(b[0]), rational(b[1]))
    eps = rational(eps)
    if eps <= 0:
        raise DomainError("ball radius must be positive")
    empty = isinstance(target, CustomRects) or (isinstance(target, ObstacleSet) and not target.implicit)
    if target is None or (empty and not target.rects):
        return WitnessResult(Segment(a, b, degenerate=a == b), 1, seed)
    rng = np.random.default_rng(seed)
    done = 0
    while done < samples:
        m = min(batch, samples - done)
        ps = _disk_points(rng, a, eps, m)
        qs = _disk_points(rng, b, eps, m)
        for p, q in zip(ps, qs):
            done += 1
            s = Segment(p, q, degenerate=p == q)
            if not segment_hits(target, s):
                if segment_hits(target, s):  # pragma: no cover - exact predicate is deterministic
                    raise AssertionError("witness failed re-verification")
                return WitnessResult(s, done, seed)
    return WitnessResult(None, done, seed)


def claim1_certificate(delta) -> bool:
    """True iff the two row-alignment constraints ``9 delta`` and ``3 delta`` are incompatible.

    A line crossing three consecutive columns must sit within ``9 delta`` rows
    of a lattice row and within ``3 delta`` of a half-shifted row; the two are
    separated by half a row, so they conflict exactly when ``12 delta < 1/2``.
    """
    d = rational(delta)
    if not 0 < d < Fraction(1, 2):
        raise DomainError("delta must lie in (0, 1/2)")
    return 9 * d + 3 * d < Fraction(1, 2)


@dataclass(frozen=True)
class Claim1Result:
    all_hit: bool
    count: int
    seed: int
    counterexample: Optional[Segment] = None


def sample_line(rng: np.random.Generator, delta: Fraction) -> Segment:
    """Rational line through ``{0} x [2 delta, 1 - 2 delta]`` with slope in [-1, 1], clipped to ``x`` in [-1, 2]."""
    lo = math.ceil(2 * delta * _LINE_GRID)
    hi = math.floor((1 - 2 * delta) * _LINE_GRID)
    y0 = Fraction(int(rng.integers(lo, hi + 1)), _LINE_GRID)
    m = Fraction(int(rng.integers(-_LINE_GRID, _LINE_GRID + 1)), _LINE_GRID)
    return Segment(Point(Fraction(-1), y0 - m), Point(Fraction(2), y0 + 2 * m))


def claim1_sample_lines(spec: TaborGrid, count: int = 10_000, seed: int = 0) -> Claim1Result:
    """Test ``count`` seeded lines against the implicit Tabor stage; stop at the first miss."""
    if not isinstance(spec, TaborGrid):
        raise DomainError("claim1 sampling needs a TaborGrid spec")
    rng = np.random.default_rng(seed)
    for i in range(count):
        s = sample_line(rng, spec.delta)
        if not segment_hits(spec, s):
            return Claim1Result(False, i + 1, seed, s)
    return Claim1Result(True, count, seed)


# -- cone-constrained reachability -------------------------------------------------


@dataclass(frozen=True)
class ConeReachResult:
    feasible: bool
    slope: Fraction
    event_count: int
    witness: Optional[Polyline] = None


def rational_slope(slope) -> Fraction:
    """Validate an exact cone slope ``tan(eps)``; floats are rejected."""
    if isinstance(slope, float) or not isinstance(slope, (Rational, str)):
        raise DomainError(f"slope must be rational (int, Fraction or 'p/q' string), got {slope!r}")
    s = rational(slope)
    if s <= 0:
        raise DomainError("slope must be positive")
    return s


Interval = tuple[Fraction, Fraction]


def _merge(intervals: list[Interval]) -> list[Interval]:
    intervals.sort()
    out: list[Interval] = []
    for lo, hi in intervals:
        if out and lo <= out[-1][1]:
            if hi > out[-1][1]:
                out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return out


class _Frame:
    """Unnormalised rotated frame: ``X = (p-a).d``, ``Y = (p-a).d_perp`` with ``d = b - a``."""

    def __init__(self, a: Point, b: Point):
        self.a = a
        self.d = Point(b.x - a.x, b.y - a.y)
        self.n2 = self.d.x**2 + self.d.y**2

    def to(self, p) -> tuple[Fraction, Fraction]:
        wx, wy = p[0] - self.a.x, p[1] - self.a.y
        return wx * self.d.x + wy * self.d.y, -wx * self.d.y + wy * self.d.x

    def back(self, X: Fraction, Y: Fraction) -> Point:
        dx, dy = self.d
        return Point(self.a.x + (X * dx - Y * dy) / self.n2, self.a.y + (X * dy + Y * dx) / self.n2)


class _Poly:
    """Convex quadrilateral in the rotated frame."""

    def __init__(self, verts: list[tuple[Fraction, Fraction]]):
        self.verts = verts
        xs = [v[0] for v in verts]
        self.xmin, self.xmax = min(xs), max(xs)

    def section(self, X: Fraction) -> tuple[Fraction, Fraction]:
        ys = []
        n = len(self.verts)
        for k in range(n):
            (x0, y0), (x1, y1) = self.verts[k], self.verts[(k + 1) % n]
            if x0 == x1:
                if x0 == X:
                    ys.extend((y0, y1))
                continue
            if min(x0, x1) <= X <= max(x0, x1):
                ys.append(y0 + (y1 - y0) * (X - x0) / (x1 - x0))
        return min(ys), max(ys)


def _corridors(active: list[_Poly], x0: Fraction, x1: Fraction):
    """Free corridors of the slab ``[x0, x1]`` as ``(lo0, hi0, lo1, hi1)``; None marks infinity."""
    xm = (x0 + x1) / 2
    secs = sorted(((p.section(xm), p) for p in active), key=lambda t: t[0][0])
    bounds = [(p.section(x0), p.section(x1)) for _, p in secs]
    out = []
    below = (None, None)
    for (s0, s1) in bounds:
        out.append((below[0], s0[0], below[1], s1[0]))
        below = (s0[1], s1[1])
    out.append((below[0], None, below[1], None))
    return out


def _cap(lo: Optional[Fraction], hi: Optional[Fraction], J: Interval) -> Optional[Interval]:
    a = J[0] if lo is None else max(lo, J[0])
    b = J[1] if hi is None else min(hi, J[1])
    return (a, b) if a <= b else None


def cone_reach_feasible(a, b, slope, obs, witness: bool = True) -> ConeReachResult:
    """Exact test for a polyline from ``a`` to ``b`` whose edges all lie in the closed cone of slope ``slope`` about ``b - a``.

    Obstacles are avoided in their open interiors.  The sweep runs along
    ``b - a`` and keeps the reachable set on each cross-section as a finite
    union of closed rational intervals.
    """
    s = rational_slope(slope)
    a = Point(rational(a[0]), rational(a[1]))
    b = Point(rational(b[0]), rational(b[1]))
    if a == b:
        raise DomainError("endpoints coincide")
    if obs is None:
        rects: Sequence[AxisRect] = ()
    elif isinstance(obs, ObstacleSet):
        if obs.implicit:
            raise DomainError("cone sweep needs an explicit obstacle set")
        rects = obs.rects
    elif isinstance(obs, (list, tuple)):
        rects = obs
    else:
        rects = generate(obs).rects
    for r in rects:
        if r.contains_open(a) or r.contains_open(b):
            raise InvalidEndpointError("endpoint lies inside an obstacle")
    fr = _Frame(a, b)
    L = fr.n2
    polys = [_Poly([fr.to(c) for c in r.corners()]) for r in rects]
    polys = [p for p in polys if p.xmax > 0 and p.xmin < L]
    events = sorted({x for p in polys for x, _ in p.verts if 0 < x < L} | {Fraction(0), L})
    reach: list[list[Interval]] = [[(Fraction(0), Fraction(0))]]
    slabs = []
    for x0, x1 in zip(events, events[1:]):
        active = [p for p in polys if p.xmin <= x0 and p.xmax >= x1]
        cors = _corridors(active, x0, x1)
        slabs.append(cors)
        grow = s * (x1 - x0)
        nxt: list[Interval] = []
        for J in reach[-1]:
            for lo0, hi0, lo1, hi1 in cors:
                start = _cap(lo0, hi0, J)
                if start is None:
                    continue
                nj = _cap(lo1, hi1, (start[0] - grow, start[1] + grow))
                if nj is not None:
                    nxt.append(nj)
        reach.append(_merge(nxt))
        if not reach[-1]:
            return ConeReachResult(False, s, len(events))
    feasible = any(lo <= 0 <= hi for lo, hi in reach[-1])
    if not feasible or not witness:
        return ConeReachResult(feasible, s, len(events))
    # Backtrack: clamp into the previous reachable set within the cone.
    y = Fraction(0)
    pts = [(L, y)]
    for i in range(len(slabs) - 1, -1, -1):
        x0, x1 = events[i], events[i + 1]
        grow = s * (x1 - x0)
        prev = None
        for lo0, hi0, lo1, hi1 in slabs[i]:
            if (lo1 is not None and y < lo1) or (hi1 is not None and y > hi1):
                continue
            for J in reach[i]:
                start = _cap(lo0, hi0, J)
                if start is None:
                    continue
                win = (max(start[0], y - grow), min(start[1], y + grow))
                if win[0] <= win[1]:
                    prev = min(max(y, win[0]), win[1])
                    break
            if prev is not None:
                break
        if prev is None:  # pragma: no cover - forward pass guarantees a predecessor
            raise AssertionError("sweep backtracking failed")
        y = prev
        pts.append((x0, y))
    path = Polyline.from_points(fr.back(X, Y) for X, Y in reversed(pts))
    return ConeReachResult(True, s, len(events), path)


def slope_from_angle(eps: float, max_denominator: int = 10**6) -> Fraction:
    """Nearest rational to ``tan(eps)`` with bounded denominator."""
    if not 0 < eps < math.pi / 2:
        raise DomainError("cone angle must lie in (0, pi/2)")
    return Fraction(math.tan(eps)).limit_denominator(max_denominator)


# -- ball chain --------------------------------------------------------------------


@dataclass(frozen=True)
class Ball:
    k: int
    center: Point
    radius: float
    ratio: Fraction  # radius / |b - a|, exact when delta is rational


@dataclass(frozen=True)
class BallChain:
    entries: tuple[Ball, ...]
    delta: Fraction
    a: Point
    b: Point

    def __len__(self) -> int:
        return len(self.entries)


def ball_chain(a, b, delta, K: int) -> BallChain:
    """Balls ``B(x_k, r_k)`` for ``-K <= k <= K`` on [a, b].

    In the frame ``a = 0``, ``b = 1``: ``x_k = delta**|k|`` and
    ``r_k = delta**(2|k|)`` for ``k < 0``; ``x_k = 1 - delta**(k+1)`` and
    ``r_k = delta**(2k+2)`` for ``k >= 0``.
    """
    d = rational(delta)
    if not 0 < d < Fraction(1, 4):
        raise DomainError("delta must lie in (0, 1/4)")
    if K < 1:
        raise DomainError("K must be at least 1")
    a = Point(rational(a[0]), rational(a[1]))
    b = Point(rational(b[0]), rational(b[1]))
    if a == b:
        raise DomainError("endpoints coincide")
    scale = math.hypot(float(b.x - a.x), float(b.y - a.y))
    out = []
    for k in range(-K, K + 1):
        if k < 0:
            t, r = d ** (-k), d ** (-2 * k)
        else:
            t, r = 1 - d ** (k + 1), d ** (2 * k + 2)
        c = Point(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
        out.append(Ball(k, c, float(r) * scale, r))
    return BallChain(tuple(out), d, a, b)


def chain_angle_bounds(chain: BallChain) -> list[float]:
    """Per-gap worst angle: ``arcsin((r_k + r_{k-1}) / |x_k - x_{k-1}|)``.

    Every vector between points of the two balls lies within ``r_k + r_{k-1}``
    of ``x_k - x_{k-1}``.
    """
    out = []
    for p, q in zip(chain.entries, chain.entries[1:]):
        gap = math.hypot(float(q.center.x - p.center.x), float(q.center.y - p.center.y))
        out.append(math.asin(min(1.0, (p.radius + q.radius) / gap)))
    return out


def chain_angle_quality(chain: BallChain, samples: int = 1000, seed: int = 0, centers_only: bool = False) -> float:
    """Largest angle between ``y_k - y_{k-1}`` and ``b - a`` over sampled tuples ``y_k`` in the balls."""
    cx = np.array([float(e.center.x) for e in chain.entries])
    cy = np.array([float(e.center.y) for e in chain.entries])
    rad = np.array([e.radius for e in chain.entries])
    axis = np.array([float(chain.b.x - chain.a.x), float(chain.b.y - chain.a.y)])
    axis /= np.linalg.norm(axis)
    if centers_only:
        xs, ys = cx[None, :], cy[None, :]
    else:
        rng = np.random.default_rng(seed)
        rr = rad[None, :] * np.sqrt(rng.random((samples, len(rad))))
        th = 2 * np.pi * rng.random((samples, len(rad)))
        xs, ys = cx[None, :] + rr * np.cos(th), cy[None, :] + rr * np.sin(th)
    vx, vy = np.diff(xs, axis=1), np.diff(ys, axis=1)
    cos = (vx * axis[0] + vy * axis[1]) / np.hypot(vx, vy)
    return float(np.arccos(np.clip(cos, -1.0, 1.0)).max())
