import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from intrinsica import _exact
from intrinsica.errors import DomainError
from intrinsica.geometry import (
    AxisRect,
    Cone,
    Point,
    Polyline,
    Segment,
    angle_between,
    chord_cone_check,
    polyline_length,
    rational,
    rpoint,
    seg_intersects_rect,
)

from strategies import points, rationals, rects

UNIT = AxisRect.exact(0, 0, 1, 1)


def test_rational_parsing():
    assert rational("3/7") == F(3, 7)
    assert rational("0.08") == F(2, 25)
    assert rational(0.5) == F(1, 2)
    assert rational(3) == F(3)
    with pytest.raises(DomainError):
        rational(float("nan"))
    with pytest.raises(TypeError):
        rational(object())


def test_segment_rejects_unflagged_degenerate():
    with pytest.raises(DomainError):
        Segment((0, 0), (0, 0))
    s = Segment((0, 0), (0, 0), degenerate=True)
    assert s.length == 0


def test_rect_needs_positive_area():
    with pytest.raises(DomainError):
        AxisRect(0, 0, 0, 1)
    with pytest.raises(DomainError):
        AxisRect(0, 1, 1, 1)


def test_polyline_rejects_repeats():
    with pytest.raises(DomainError):
        Polyline(((0, 0), (0, 0), (1, 1)))
    with pytest.raises(DomainError):
        Polyline(((0, 0),))
    assert Polyline.from_points([(0, 0), (0, 0), (1, 1)]).vertices == (Point(0, 0), Point(1, 1))


@pytest.mark.parametrize(
    "verts, expected",
    [
        ([(0, 0), (3, 4)], 5.0),
        ([(0, 0), (1, 0), (1, 1)], 2.0),
        ([(0, 0), (F(1, 3), 0), (1, F(2, 3)), (1, 1)], 2 / 3 + 2 * math.sqrt(2) / 3),
    ],
)
def test_polyline_length_examples(verts, expected):
    assert polyline_length(Polyline(tuple(verts))) == pytest.approx(expected, abs=1e-12)


def test_polyline_length_frozen_value():
    c = Polyline(((0, 0), (F(1, 3), 0), (1, F(2, 3)), (1, 1)))
    assert c.length == pytest.approx(1.60947570824873, abs=1e-12)


@pytest.mark.parametrize(
    "u, v, expected",
    [((1, 0), (0, 1), math.pi / 2), ((1, 0), (1, 1), math.pi / 4), ((3, 1), (1, 3), 0.9272952180016122)],
)
def test_angle_between_examples(u, v, expected):
    assert angle_between(u, v) == pytest.approx(expected, abs=1e-12)


def test_angle_between_zero_vector():
    with pytest.raises(DomainError):
        angle_between((0, 0), (1, 0))


@pytest.mark.parametrize(
    "seg, rect, mode, expected",
    [
        (((-1, F(1, 2)), (2, F(1, 2))), UNIT, "open", True),
        (((-1, 0), (2, 0)), UNIT, "open", False),
        (((-1, 0), (2, 0)), UNIT, "closed", True),
        (((0, 0), (1, 1)), AxisRect.exact(F(1, 3), 0, F(2, 3), F(1, 3)), "open", False),
        (((0, 0), (1, 1)), AxisRect.exact(F(1, 3), 0, F(2, 3), F(1, 3)), "closed", True),
    ],
)
def test_seg_intersects_rect_examples(seg, rect, mode, expected):
    assert seg_intersects_rect(Segment(*seg), rect, mode) is expected


def test_seg_intersects_rect_rejects_unknown_mode():
    with pytest.raises(ValueError):
        seg_intersects_rect(Segment((0, 0), (1, 1)), UNIT, "half-open")


def test_corner_touch_never_sampled_inside():
    s = Segment((0, 0), (1, 1))
    r = AxisRect.exact(F(1, 3), 0, F(2, 3), F(1, 3))
    for k in range(10_001):
        assert not r.contains_open(s.at(F(k, 10_000)))


@pytest.mark.parametrize(
    "verts, eps, expected",
    [
        ([(0, 0), (2, 1)], 1e-9, True),
        ([(0, 0), (F(1, 2), F(1, 2)), (1, 0)], 0.3, False),
        ([(0, 0), (F(1, 3), F(1, 10)), (1, F(1, 3))], 0.45, True),
    ],
)
def test_chord_cone_examples(verts, eps, expected):
    assert chord_cone_check(Polyline(tuple(verts)), eps) is expected


def test_chord_cone_example_max_angle():
    # The largest vertex-chord angle of this polyline is about 0.0303 rad.
    c = Polyline(((0, 0), (F(1, 3), F(1, 10)), (1, F(1, 3))))
    axis = c.last - c.first
    worst = max(angle_between(v - u, axis) for i, u in enumerate(c.vertices) for v in c.vertices[i + 1 :])
    assert worst == pytest.approx(0.030294, abs=1e-6)
    assert chord_cone_check(c, 0.0303) and not chord_cone_check(c, 0.0302)


def test_chord_cone_strict_at_tie():
    c = Polyline(((0, 0), (1, 1), (2, 0)))
    assert not chord_cone_check(c, math.pi / 4)


def test_cone_contains():
    c = Cone((0, 0), (2, 0), 0.5)
    assert c.contains((1, 0.5))
    assert not c.contains((1, 0.6))
    assert c.contains((0, 0))
    with pytest.raises(DomainError):
        Cone((0, 0), (0, 0), 0.5)
    with pytest.raises(DomainError):
        Cone((0, 0), (1, 0), math.pi / 2)


def test_boundary_position_ccw():
    r = AxisRect.exact(0, 0, 2, 1)
    assert r.boundary_position((1, 0)) == 1
    assert r.boundary_position((2, F(1, 2))) == F(5, 2)
    assert r.boundary_position((1, 1)) == 4
    assert r.boundary_position((0, F(1, 2))) == F(11, 2)
    with pytest.raises(DomainError):
        r.boundary_position((1, F(1, 2)))


def test_clip_params():
    assert UNIT.clip_params((-1, F(1, 2)), (2, F(1, 2))) == (F(1, 3), F(2, 3))
    assert UNIT.clip_params((-1, 2), (2, 2)) is None
    assert UNIT.clip_params((F(1, 2), -1), (F(1, 2), 2)) == (F(1, 3), F(2, 3))


# -- properties --------------------------------------------------------------------


@given(st.lists(points(), min_size=2, max_size=8), rationals(), rationals(), st.floats(0, 2 * math.pi))
def test_length_invariant_under_rigid_motion(pts, tx, ty, theta):
    assume(len(set(pts)) > 1)
    c = Polyline.from_points(pts)
    ct, st_ = math.cos(theta), math.sin(theta)
    moved = Polyline(tuple(Point(ct * float(p.x) - st_ * float(p.y) + tx, st_ * float(p.x) + ct * float(p.y) + ty) for p in c.vertices))
    assert moved.length == pytest.approx(c.length, rel=1e-12)
    assert c.length >= math.dist(c.first.to_float(), c.last.to_float()) - 1e-12


def test_chord_cone_rejects_revisits():
    back = Polyline.from_points([Point(F(0), F(0)), Point(F(1), F(0)), Point(F(0), F(0)), Point(F(2), F(0))])
    assert not chord_cone_check(back, 1.5)


@given(st.lists(points(), min_size=2, max_size=6), st.floats(0.01, 1.5), st.floats(0.0, 1.0))
def test_chord_cone_monotone_in_eps(pts, eps, extra):
    assume(len(set(pts)) > 1 and pts[0] != pts[-1])
    c = Polyline.from_points(pts)
    if chord_cone_check(c, eps):
        assert chord_cone_check(c, eps + extra)


@given(points(), points(), st.floats(0.01, 100))
def test_angle_symmetry_and_scaling(u, v, lam):
    assume(u != (0, 0) and v != (0, 0))
    assert angle_between(u, v) == pytest.approx(angle_between(v, u), abs=1e-15)
    assert angle_between(u, (lam * float(u.x), lam * float(u.y))) == pytest.approx(0.0, abs=1e-15)


@given(points(), points(), rects())
def test_open_hit_implies_closed_hit(p, q, r):
    assume(p != q)
    s = Segment(p, q)
    if seg_intersects_rect(s, r, "open"):
        assert seg_intersects_rect(s, r, "closed")


@given(points(), points(), rects())
def test_exact_predicate_dominates_sampling(p, q, r):
    assume(p != q)
    s = Segment(p, q)
    ts = np.linspace(0.0, 1.0, 10_001)
    xs = float(p.x) + ts * float(q.x - p.x)
    ys = float(p.y) + ts * float(q.y - p.y)
    fx0, fy0, fx1, fy1 = (float(v) for v in (r.x0, r.y0, r.x1, r.y1))
    if ((xs > fx0) & (xs < fx1) & (ys > fy0) & (ys < fy1)).any():
        assert seg_intersects_rect(s, r, "open")


@given(st.lists(st.tuples(points(), points()), min_size=1, max_size=6), st.lists(rects(), min_size=1, max_size=6), st.sampled_from(["open", "closed"]))
def test_vector_kernel_matches_scalar(segs, rs, mode):
    segs = [(p, q) for p, q in segs if p != q]
    assume(segs)
    lat = _exact.lattice_for(rs, [c for s in segs for c in s])
    arr = _exact.RectArrays(rs, lat)
    sc = lambda v: lat.scale(v)
    got = _exact.segments_hit(
        [sc(p.x) for p, _ in segs], [sc(p.y) for p, _ in segs], [sc(q.x) for _, q in segs], [sc(q.y) for _, q in segs], arr, mode
    )
    want = np.array([[seg_intersects_rect(Segment(p, q), r, mode) for r in rs] for p, q in segs])
    assert (got == want).all()
    if mode == "open":
        tuples = list(zip(arr.x0.tolist(), arr.y0.tolist(), arr.x1.tolist(), arr.y1.tolist()))
        for k, (p, q) in enumerate(segs):
            assert _exact.segment_blocked(sc(p.x), sc(p.y), sc(q.x), sc(q.y), tuples) == bool(want[k].any())


def test_object_dtype_fallback_for_large_lattices():
    big = F(1, 2**40)
    r = AxisRect(big, big, 1, 1)
    lat = _exact.lattice_for([r], [rpoint(0, 0), rpoint(2, 2)])
    assert lat.dtype is object
    arr = _exact.RectArrays([r], lat)
    hit = _exact.segments_hit(0, 0, lat.scale(2), lat.scale(2), arr, "open")
    assert hit.tolist() == [[True]]
