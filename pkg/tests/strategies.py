"""Shared hypothesis strategies."""

from fractions import Fraction

from hypothesis import strategies as st

from intrinsica.geometry import AxisRect, Point


def rationals(lo: int = -4, hi: int = 4, denom: int = 64):
    return st.integers(lo * denom, hi * denom).map(lambda n: Fraction(n, denom))


def points(lo: int = -4, hi: int = 4, denom: int = 64):
    return st.builds(Point, rationals(lo, hi, denom), rationals(lo, hi, denom))


@st.composite
def rects(draw, lo: int = -3, hi: int = 3, denom: int = 16):
    x = sorted(draw(st.lists(rationals(lo, hi, denom), min_size=2, max_size=2, unique=True)))
    y = sorted(draw(st.lists(rationals(lo, hi, denom), min_size=2, max_size=2, unique=True)))
    return AxisRect(x[0], y[0], x[1], y[1])


@st.composite
def disjoint_rects(draw, max_count: int = 8, grid: int = 16):
    """Rectangles on the lattice Z^2/grid inside [1/8, 7/8]^2 with disjoint closures."""
    lo, hi = grid // 8, grid - grid // 8
    placed = []
    for _ in range(draw(st.integers(0, max_count))):
        w = draw(st.integers(1, 3))
        h = draw(st.integers(1, 3))
        x0 = draw(st.integers(lo, hi - w))
        y0 = draw(st.integers(lo, hi - h))
        box = (x0, y0, x0 + w, y0 + h)
        if all(box[2] < q[0] or q[2] < box[0] or box[3] < q[1] or q[3] < box[1] for q in placed):
            placed.append(box)
    return [AxisRect(*(Fraction(v, grid) for v in q)) for q in placed]
