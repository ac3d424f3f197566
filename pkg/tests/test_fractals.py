import math
import random
import warnings
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from intrinsica.errors import DomainError, ExpansionLimitError
from intrinsica.fractals import (
    CantorProduct,
    CustomRects,
    FatCantorProduct,
    HoleyStaircase,
    ObstacleSet,
    TaborGrid,
    box_count,
    box_dimension,
    cantor_intervals,
    fat_cantor_intervals,
    fat_cantor_measure,
    find_overlap,
    generate,
    obstacle_set,
    rect_count,
    segment_hits,
    stage_measures,
)
from intrinsica.geometry import AxisRect, Point, Segment, seg_intersects_rect

THIRD = F(1, 3)
DELTA = F(1, 32)


def test_cantor_product_stage_one():
    rects = set(generate(CantorProduct(THIRD, 1)).rects)
    assert rects == {
        AxisRect(F(0), F(0), THIRD, THIRD),
        AxisRect(F(0), F(2, 3), THIRD, F(1)),
        AxisRect(F(2, 3), F(0), F(1), THIRD),
        AxisRect(F(2, 3), F(2, 3), F(1), F(1)),
    }


@pytest.mark.parametrize("n", range(0, 5))
def test_cantor_product_counts(n):
    obs = generate(CantorProduct(THIRD, n))
    assert len(obs) == 4**n
    assert all(r.width == r.height == THIRD**n for r in obs.rects)


def test_tabor_level_seven():
    obs = generate(TaborGrid(7, 7, DELTA))
    assert len(obs) == 3 * (2**14 - 1) == 49149
    side = (1 - 2 * DELTA) / 2**14
    assert all(r.width == side and r.height == side for r in obs.rects)
    assert find_overlap(obs.rects) is None


def test_holey_staircase_boxes():
    n = 3
    obs = generate(HoleyStaircase(n))
    ivs = cantor_intervals(THIRD, n)
    assert len(obs) == 2**n
    for i, (r, (lo, hi)) in enumerate(zip(obs.rects, ivs)):
        assert (r.x0, r.x1) == (lo, hi)
        assert (r.y0, r.y1) == (F(i, 2**n), F(i + 1, 2**n))


def test_fat_cantor_measure_example():
    assert fat_cantor_measure(F(2, 25), 2) == F(47, 50)
    assert stage_measures(FatCantorProduct(F(2, 25), 2)).linear == F(94, 100)
    ivs = fat_cantor_intervals(F(2, 25), 4)
    assert sum(hi - lo for lo, hi in ivs) == fat_cantor_measure(F(2, 25), 4)
    assert len({hi - lo for lo, hi in ivs}) == 1


def test_fat_cantor_limit_measure():
    assert float(fat_cantor_measure(F(2, 25), 60)) == pytest.approx(0.92, abs=1e-12)
    assert fat_cantor_measure(F(2, 25), 60) > F(9, 10)


def test_stage_measures_cantor_two():
    m = stage_measures(CantorProduct(THIRD, 2))
    assert (m.linear, m.planar, m.boundary) == (F(4, 9), F(16, 81), F(64, 9))


def test_staircase_cover_sum():
    m = stage_measures(HoleyStaircase(6))
    assert m.cover_sum == pytest.approx(math.sqrt(1 + (4 / 9) ** 6), abs=1e-12)
    assert m.cover_sum == pytest.approx(1.0038462763935816, abs=1e-12)


@pytest.mark.parametrize(
    "make",
    [
        lambda: CantorProduct(THIRD, 3),
        lambda: CantorProduct(F(1, 5), 2),
        lambda: FatCantorProduct(F(2, 25), 3),
        lambda: HoleyStaircase(4),
        lambda: TaborGrid(2, 3, DELTA),
    ],
)
def test_measures_agree_with_rectangles(make):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        spec = make()
        obs = generate(spec)
    m = stage_measures(spec)
    assert obs.measure == m.planar == sum(r.area for r in obs.rects)
    assert obs.boundary_length == m.boundary == sum(r.perimeter for r in obs.rects)
    assert find_overlap(obs.rects) is None
    if isinstance(spec, (CantorProduct, FatCantorProduct)):
        assert m.planar == m.linear**2


def test_expansion_limit():
    with pytest.raises(ExpansionLimitError):
        generate(TaborGrid(7, 8, DELTA))
    assert rect_count(TaborGrid(7, 8, DELTA)) == 49149 * 3 * (4**8 - 1)
    handle = obstacle_set(TaborGrid(7, 8, DELTA))
    assert handle.implicit and len(handle) == rect_count(TaborGrid(7, 8, DELTA))
    with pytest.raises(ExpansionLimitError):
        generate(CantorProduct(THIRD, 5), limit=100)


def test_spec_validation():
    with pytest.raises(DomainError):
        CantorProduct(F(1, 2), 1)
    with pytest.raises(DomainError):
        FatCantorProduct(F(1), 1)
    with pytest.raises(DomainError):
        HoleyStaircase(-1)
    with pytest.raises(DomainError):
        TaborGrid(8, 7, DELTA)
    with pytest.raises(DomainError):
        TaborGrid(1, 7, DELTA)
    with pytest.warns(UserWarning):
        TaborGrid(3, 3, DELTA)
    assert TaborGrid(7, 8, DELTA).certified
    assert not TaborGrid(7, 8, F(1, 24)).certified


def test_overlap_rejected():
    with pytest.raises(DomainError):
        ObstacleSet.from_rects([AxisRect.exact(0, 0, 1, 1), AxisRect.exact(1, 0, 2, 1)])
    many = [AxisRect.exact(i, 0, F(i) + F(1, 2), 1) for i in range(100)] + [AxisRect.exact(F(99, 2), F(1, 2), 50, 2)]
    with pytest.raises(DomainError):
        ObstacleSet.from_rects(many)


def test_segment_hits_examples():
    diag = Segment(Point(F(0), F(0)), Point(F(1), F(1)))
    assert segment_hits(CantorProduct(THIRD, 1), diag)
    # y = delta/2 lies well inside the column of level-7 rows, so it hits.
    assert segment_hits(TaborGrid(7, 7, DELTA), Segment(Point(F(-1), DELTA / 2), Point(F(2), DELTA / 2)))
    # Strictly below the first row of boxes (which starts at delta * 2**-14) it misses.
    low = DELTA / 2**15
    assert not segment_hits(TaborGrid(7, 7, DELTA), Segment(Point(F(-1), low), Point(F(2), low)))
    assert segment_hits(TaborGrid(7, 7, DELTA), Segment(Point(F(-1), DELTA / 2**14), Point(F(2), DELTA / 2**14)))


def test_segment_hits_polymorphic_targets():
    s = Segment(Point(F(-1), F(1, 18)), Point(F(2), F(1, 18)))
    spec = CantorProduct(THIRD, 2)
    assert segment_hits(spec, s) == segment_hits(generate(spec), s) is True
    assert not segment_hits(CustomRects(()), s)
    pt = Segment(Point(F(1, 6), F(1, 6)), Point(F(1, 6), F(1, 6)), degenerate=True)
    assert segment_hits(generate(CantorProduct(THIRD, 1)), pt)


def _random_segment(rng: random.Random, denom: int = 2**16) -> Segment:
    while True:
        p = Point(F(rng.randint(-denom, 2 * denom), denom), F(rng.randint(-denom // 4, denom + denom // 4), denom))
        q = Point(F(rng.randint(-denom, 2 * denom), denom), F(rng.randint(-denom // 4, denom + denom // 4), denom))
        if p != q:
            return Segment(p, q)


@pytest.mark.slow
def test_tabor_implicit_matches_explicit_scan():
    spec = TaborGrid(7, 7, DELTA)
    obs = generate(spec)
    rng = random.Random(20240601)
    hits = 0
    for _ in range(1000):
        s = _random_segment(rng)
        implicit = segment_hits(spec, s)
        assert implicit == segment_hits(obs, s)
        hits += implicit
    assert 0 < hits < 1000


def test_tabor_implicit_matches_scalar_predicate_small():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        spec = TaborGrid(2, 3, F(1, 8))
    obs = generate(spec)
    rng = random.Random(5)
    for _ in range(300):
        s = _random_segment(rng, 256)
        want = any(seg_intersects_rect(s, r, "closed") for r in obs.rects)
        assert segment_hits(spec, s) == want


@pytest.mark.parametrize("spec", [CantorProduct(THIRD, 7), FatCantorProduct(F(2, 25), 7), HoleyStaircase(13)])
def test_tree_descent_matches_explicit(spec):
    obs = generate(spec)
    from intrinsica.fractals import _tree_hits

    rng = random.Random(11)
    for _ in range(60):
        s = _random_segment(rng, 3**9)
        assert _tree_hits(spec, s.p, s.q) == segment_hits(obs, s)


@settings(max_examples=40)
@given(st.integers(1, 4), st.integers(-2**10, 2**11), st.integers(-2**10, 2**11), st.integers(-2**10, 2**11), st.integers(-2**10, 2**11))
def test_cantor_miss_is_monotone_under_deepening(n, x0, y0, x1, y1):
    p, q = Point(F(x0, 2**10), F(y0, 2**10)), Point(F(x1, 2**10), F(y1, 2**10))
    s = Segment(p, q, degenerate=p == q)
    if not segment_hits(CantorProduct(THIRD, n), s):
        assert not segment_hits(CantorProduct(THIRD, n + 1), s)


@pytest.mark.parametrize("n", range(0, 5))
def test_cantor_stages_are_nested(n):
    coarse = generate(CantorProduct(THIRD, n)).rects
    fine = generate(CantorProduct(THIRD, n + 1)).rects
    for r in fine:
        assert any(c.x0 <= r.x0 and r.x1 <= c.x1 and c.y0 <= r.y0 and r.y1 <= c.y1 for c in coarse)


def test_box_counts():
    assert box_count(CantorProduct(THIRD, 5), F(1, 27)) == 64
    for k in range(1, 6):
        assert box_count(CantorProduct(THIRD, 5), F(1, 3**k)) == 4**k
    n = box_count(HoleyStaircase(6), F(1, 64))
    assert 2**6 <= n <= 3 * 2**6


def test_box_dimension():
    slope, counts = box_dimension(CantorProduct(THIRD, 5), [F(1, 3**k) for k in range(1, 6)])
    assert counts == [4, 16, 64, 256, 1024]
    assert slope == pytest.approx(math.log(4) / math.log(3), abs=1e-9)
    assert abs(slope - 1.2619) <= 0.01


def test_box_count_rejects_bad_size():
    with pytest.raises(DomainError):
        box_count(CantorProduct(THIRD, 1), 0)
