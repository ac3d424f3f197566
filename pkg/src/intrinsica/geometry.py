"""Planar primitives: points, segments, axis rectangles, polylines and cones.

Coordinates are either :class:`fractions.Fraction` (exact mode) or ``float``.
Combinatorial predicates (segment against rectangle, cone membership with a
rational axis) are exact whenever their inputs are rational; lengths and
angles are always returned as floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, NamedTuple, Sequence, Union

from .errors import DomainError

Number = Union[int, float, Fraction]


class Point(NamedTuple):
    x: Number
    y: Number

    def __sub__(self, other):  # type: ignore[override]
        return Point(self.x - other[0], self.y - other[1])

    def __add__(self, other):  # type: ignore[override]
        return Point(self.x + other[0], self.y + other[1])

    def scale(self, k: Number) -> "Point":
        return Point(self.x * k, self.y * k)

    def to_float(self) -> "Point":
        return Point(float(self.x), float(self.y))


def rational(value) -> Fraction:
    """Convert ``value`` to a Fraction.

    Accepts ints, Fractions, strings such as ``"3/7"`` or ``"0.08"`` and
    floats (converted exactly, binary expansion included).
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        if not math.isfinite(value):
            raise DomainError(f"non-finite coordinate {value!r}")
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational number")


def rpoint(x, y) -> Point:
    """Exact point from anything :func:`rational` accepts."""
    return Point(rational(x), rational(y))


def dot(u: Sequence[Number], v: Sequence[Number]) -> Number:
    return u[0] * v[0] + u[1] * v[1]


def cross(u: Sequence[Number], v: Sequence[Number]) -> Number:
    return u[0] * v[1] - u[1] * v[0]


def norm(v: Sequence[Number]) -> float:
    return math.hypot(float(v[0]), float(v[1]))


def dist(p: Sequence[Number], q: Sequence[Number]) -> float:
    return math.hypot(float(q[0] - p[0]), float(q[1] - p[1]))


@dataclass(frozen=True)
class Segment:
    p: Point
    q: Point
    degenerate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "p", Point(*self.p))
        object.__setattr__(self, "q", Point(*self.q))
        if self.p == self.q and not self.degenerate:
            raise DomainError("degenerate segment (p == q) must be flagged explicitly")

    def at(self, t: Number) -> Point:
        return Point(self.p.x + t * (self.q.x - self.p.x), self.p.y + t * (self.q.y - self.p.y))

    @property
    def length(self) -> float:
        return dist(self.p, self.q)


@dataclass(frozen=True)
class AxisRect:
    x0: Number
    y0: Number
    x1: Number
    y1: Number

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise DomainError(f"rectangle needs positive area: {self!r}")

    @classmethod
    def exact(cls, x0, y0, x1, y1) -> "AxisRect":
        return cls(rational(x0), rational(y0), rational(x1), rational(y1))

    @property
    def width(self) -> Number:
        return self.x1 - self.x0

    @property
    def height(self) -> Number:
        return self.y1 - self.y0

    @property
    def area(self) -> Number:
        return self.width * self.height

    @property
    def perimeter(self) -> Number:
        return 2 * (self.width + self.height)

    def corners(self) -> tuple[Point, Point, Point, Point]:
        """Counter-clockwise from the lower-left corner."""
        return (
            Point(self.x0, self.y0),
            Point(self.x1, self.y0),
            Point(self.x1, self.y1),
            Point(self.x0, self.y1),
        )

    def contains_open(self, p: Sequence[Number]) -> bool:
        return self.x0 < p[0] < self.x1 and self.y0 < p[1] < self.y1

    def contains_closed(self, p: Sequence[Number]) -> bool:
        return self.x0 <= p[0] <= self.x1 and self.y0 <= p[1] <= self.y1

    def closed_overlap(self, other: "AxisRect") -> bool:
        return (
            self.x0 <= other.x1
            and other.x0 <= self.x1
            and self.y0 <= other.y1
            and other.y0 <= self.y1
        )

    def clip_params(self, p: Sequence[Number], q: Sequence[Number]):
        """Parameter interval ``(t0, t1)`` of ``p + t(q-p)`` inside the closed rectangle.

        Returns ``None`` when the segment misses the closed rectangle.
        Exact for rational input (Liang-Barsky with no division by zero).
        """
        t0: Number = 0
        t1: Number = 1
        dx = q[0] - p[0]
        dy = q[1] - p[1]
        for delta, lo, hi, start in ((dx, self.x0, self.x1, p[0]), (dy, self.y0, self.y1, p[1])):
            if delta == 0:
                if start < lo or start > hi:
                    return None
                continue
            a = _div(lo - start, delta)
            b = _div(hi - start, delta)
            if a > b:
                a, b = b, a
            if a > t0:
                t0 = a
            if b < t1:
                t1 = b
            if t0 > t1:
                return None
        return t0, t1

    def boundary_position(self, p: Sequence[Number]) -> Number:
        """Counter-clockwise arclength from the lower-left corner to boundary point ``p``."""
        w, h = self.width, self.height
        x, y = p[0], p[1]
        if y == self.y0 and self.x0 <= x <= self.x1:
            return x - self.x0
        if x == self.x1 and self.y0 <= y <= self.y1:
            return w + (y - self.y0)
        if y == self.y1 and self.x0 <= x <= self.x1:
            return w + h + (self.x1 - x)
        if x == self.x0 and self.y0 <= y <= self.y1:
            return 2 * w + h + (self.y1 - y)
        raise DomainError(f"{p!r} is not on the boundary of {self!r}")


def _div(a: Number, b: Number) -> Number:
    if isinstance(a, float) or isinstance(b, float):
        return a / b
    return Fraction(a) / b


def seg_intersects_rect(s: Segment, r: AxisRect, mode: str = "open") -> bool:
    """Does segment ``s`` meet the open interior (``mode="open"``) or the closed rectangle?

    Separating-axis test on the x axis, the y axis and the segment normal;
    exact for rational coordinates.
    """
    p, q = s.p, s.q
    if mode == "open":
        if p == q:
            return r.contains_open(p)
        if max(p.x, q.x) <= r.x0 or min(p.x, q.x) >= r.x1:
            return False
        if max(p.y, q.y) <= r.y0 or min(p.y, q.y) >= r.y1:
            return False
        dx, dy = q.x - p.x, q.y - p.y
        sides = [dx * (c.y - p.y) - dy * (c.x - p.x) for c in r.corners()]
        return min(sides) < 0 < max(sides)
    if mode == "closed":
        if p == q:
            return r.contains_closed(p)
        if max(p.x, q.x) < r.x0 or min(p.x, q.x) > r.x1:
            return False
        if max(p.y, q.y) < r.y0 or min(p.y, q.y) > r.y1:
            return False
        dx, dy = q.x - p.x, q.y - p.y
        sides = [dx * (c.y - p.y) - dy * (c.x - p.x) for c in r.corners()]
        return min(sides) <= 0 <= max(sides)
    raise ValueError(f"unknown mode {mode!r}; expected 'open' or 'closed'")


@dataclass(frozen=True)
class Polyline:
    vertices: tuple[Point, ...]

    def __post_init__(self):
        verts = tuple(Point(*v) for v in self.vertices)
        if len(verts) < 2:
            raise DomainError("a polyline needs at least two vertices")
        for u, v in zip(verts, verts[1:]):
            if u == v:
                raise DomainError(f"repeated consecutive vertex {u!r}")
        object.__setattr__(self, "vertices", verts)

    @classmethod
    def from_points(cls, points: Iterable[Sequence[Number]]) -> "Polyline":
        """Build a polyline, dropping consecutive duplicates."""
        out: list[Point] = []
        for p in points:
            p = Point(*p)
            if not out or out[-1] != p:
                out.append(p)
        return cls(tuple(out))

    @property
    def first(self) -> Point:
        return self.vertices[0]

    @property
    def last(self) -> Point:
        return self.vertices[-1]

    def edges(self) -> list[Segment]:
        return [Segment(u, v) for u, v in zip(self.vertices, self.vertices[1:])]

    @property
    def length(self) -> float:
        return polyline_length(self)


def polyline_length(c: Polyline) -> float:
    return math.fsum(dist(u, v) for u, v in zip(c.vertices, c.vertices[1:]))


def angle_between(u: Sequence[Number], v: Sequence[Number]) -> float:
    """Unsigned angle in ``[0, pi]`` between two nonzero vectors.

    Computed as ``atan2(|u x v|, u . v)``, which equals the clamped arccos of
    the normalised inner product but keeps full precision near 0 and pi;
    parallel rational vectors give exactly 0.
    """
    if (u[0] == 0 and u[1] == 0) or (v[0] == 0 and v[1] == 0):
        raise DomainError("angle undefined for a zero vector")
    return math.atan2(abs(float(cross(u, v))), float(dot(u, v)))


def chord_cone_check(c: Polyline, eps: float) -> bool:
    """True iff every vertex chord makes an angle strictly below ``eps`` with last - first.

    For a polyline the vertex-pair chords generate every chord between
    interior points as positive combinations, so this is the full test.
    """
    axis = c.last - c.first
    if axis.x == 0 and axis.y == 0:
        raise DomainError("chord cone undefined for a closed polyline")
    verts = c.vertices
    for i in range(len(verts)):
        for j in range(i + 1, len(verts)):
            d = verts[j] - verts[i]
            if d.x == 0 and d.y == 0:
                return False  # revisits a point, so no chord direction works
            if not angle_between(d, axis) < eps:
                return False
    return True


@dataclass(frozen=True)
class Cone:
    """Closed cone with vertex ``apex``, axis direction ``axis`` and half angle ``half_angle``.

    ``axis`` need not be normalised.
    """

    apex: Point
    axis: Point
    half_angle: float

    def __post_init__(self):
        object.__setattr__(self, "apex", Point(*self.apex))
        object.__setattr__(self, "axis", Point(*self.axis))
        if self.axis.x == 0 and self.axis.y == 0:
            raise DomainError("cone axis must be nonzero")
        if not 0.0 < self.half_angle < math.pi / 2:
            raise DomainError("cone half angle must lie in (0, pi/2)")

    def contains(self, x: Sequence[Number], slack: float = 0.0) -> bool:
        w = Point(x[0] - self.apex.x, x[1] - self.apex.y)
        if w.x == 0 and w.y == 0:
            return True
        return angle_between(w, self.axis) <= self.half_angle + slack
