import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from intrinsica.errors import DomainError, UndefinedResultError
from intrinsica.monotonicity import (
    MapSample,
    builtin_sample,
    cone_image_check,
    cone_image_violations,
    delta_infimum,
    delta_report,
    min_inner_product,
    read_map_sample,
    sample_identity,
    sample_neg_inverse_sector,
    sample_x_plus_unit,
    write_map_sample,
)


def _brute_delta(s: MapSample) -> float:
    best = math.inf
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            dx = s.x[i] - s.x[j]
            df = s.fx[i] - s.fx[j]
            if not df.any():
                continue
            best = min(best, float(dx @ df) / (math.hypot(*dx) * math.hypot(*df)))
    return best


def test_identity_is_one():
    assert delta_infimum(sample_identity(300, seed=1)) == 1.0


def test_neg_inverse_sector():
    s = sample_neg_inverse_sector(1000, seed=3)
    d = delta_infimum(s)
    assert 0.5 - 1e-9 <= d <= 1.0
    assert np.all(np.abs(np.arctan2(s.x[:, 1], s.x[:, 0])) < math.pi / 6)


def test_x_plus_unit_narrow_failure():
    s = sample_x_plus_unit(1000, seed=0)
    assert delta_infimum(s) < 0.05
    assert min_inner_product(s) > 0


def test_adversarial_pairs_shrink():
    from intrinsica.monotonicity import adversarial_points, x_plus_unit

    vals = []
    for t in (1e-1, 1e-2, 1e-3):
        x = adversarial_points([t])
        s = MapSample.from_map(x_plus_unit, x)
        vals.append(delta_infimum(s))
        assert min_inner_product(s) > 0
    assert vals[0] > vals[1] > vals[2] > 0
    assert vals[2] == pytest.approx(1.5e-3, rel=0.05)


def test_matches_brute_force():
    s = sample_neg_inverse_sector(120, seed=5)
    assert delta_infimum(s) == pytest.approx(_brute_delta(s), abs=1e-12)


def test_degenerate_pairs():
    x = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    fx = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]])
    rep = delta_report(MapSample(x, fx))
    assert rep.degenerate == 1 and rep.pairs == 2 and rep.delta == 1.0
    with pytest.raises(UndefinedResultError):
        delta_infimum(MapSample(x, np.zeros_like(x)))


def test_sample_validation():
    with pytest.raises(DomainError):
        MapSample(np.zeros((2, 2)), np.zeros((2, 2)))
    with pytest.raises(DomainError):
        MapSample(np.eye(2), np.array([[np.nan, 0.0], [0.0, 0.0]]))
    with pytest.raises(DomainError):
        delta_infimum(MapSample(np.eye(2)[:1], np.eye(2)[:1]))
    with pytest.raises(DomainError):
        builtin_sample("nope")


DYADIC = st.sampled_from([0.25, 0.5, 1.0, 2.0, 8.0])
SHIFT = st.tuples(st.integers(-4, 4), st.integers(-4, 4)).map(lambda t: (t[0] / 4, t[1] / 4))


@settings(max_examples=30)
@given(st.integers(0, 10**6), DYADIC, SHIFT, DYADIC, SHIFT)
def test_similarity_invariance(seed, lam, c, mu, c2):
    s = sample_neg_inverse_sector(60, seed=seed)
    assert delta_infimum(s.transformed(lam, c, mu, c2)) == pytest.approx(delta_infimum(s), abs=1e-12)


@settings(max_examples=30)
@given(st.integers(0, 10**6), st.floats(0.1, 10.0), st.floats(0.1, 10.0))
def test_scaling_invariance(seed, lam, mu):
    s = sample_identity(60, seed=seed)
    base = sample_neg_inverse_sector(60, seed=seed)
    assert delta_infimum(s.transformed(lam, (0.3, -0.2), mu, (1.0, 2.0))) == pytest.approx(1.0, abs=1e-12)
    assert delta_infimum(base.transformed(lam, (0, 0), mu, (0, 0))) == pytest.approx(delta_infimum(base), abs=1e-12)


@settings(max_examples=30)
@given(st.integers(0, 10**6), st.lists(st.integers(0, 79), min_size=2, max_size=40, unique=True))
def test_subset_never_lowers(seed, idx):
    s = sample_x_plus_unit(80, seed=seed, adversarial=False)
    assert delta_infimum(s.subset(sorted(idx))) >= delta_infimum(s)


def test_cone_identity():
    s = sample_identity(200, seed=2)
    for k in (0, 7, 50):
        assert cone_image_check(s, s.x[k], (1.0, 0.3), 0.7, 1.0)


def test_cone_neg_inverse():
    s = sample_neg_inverse_sector(1000, seed=3)
    assert delta_infimum(s) >= 0.5 - 1e-9
    for k in range(0, 1000, 97):
        assert cone_image_check(s, s.x[k], (1.0, 0.0), 0.2, 0.5)


def test_cone_x_plus_unit_violation():
    s = sample_x_plus_unit(0, seed=0)
    found = False
    for k in range(len(s)):
        for v in ((1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)):
            if cone_image_violations(s, s.x[k], v, 0.5, 0.5):
                found = True
    assert found


def test_cone_domain():
    s = sample_identity(10)
    with pytest.raises(DomainError):
        cone_image_check(s, s.x[0], (1, 0), 1.0, 0.5)
    with pytest.raises(DomainError):
        cone_image_check(s, (5.0, 5.0), (1, 0), 0.2, 0.9)
    with pytest.raises(DomainError):
        cone_image_check(s, s.x[0], (0, 0), 0.2, 0.9)


@settings(max_examples=40)
@given(st.integers(0, 10**6), st.integers(0, 199), st.floats(0, 2 * math.pi), st.floats(0.01, 1.0))
def test_cone_follows_from_delta(seed, k, phi, frac):
    s = sample_neg_inverse_sector(200, seed=seed)
    d = delta_infimum(s)
    theta = frac * (math.pi / 2 - math.acos(d)) * 0.999
    assert cone_image_check(s, s.x[k], (math.cos(phi), math.sin(phi)), theta, d)


def test_csv_round_trip(tmp_path):
    s = sample_neg_inverse_sector(50, seed=9)
    path = tmp_path / "s.csv"
    write_map_sample(s, path)
    back = read_map_sample(path)
    assert np.array_equal(back.x, s.x) and np.array_equal(back.fx, s.fx)
    assert back.name == "s"
    assert path.read_text().splitlines()[0] == "x1,x2,f1,f2"


def test_csv_bad_rows(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("# comment\n1,2,3\n")
    with pytest.raises(DomainError):
        read_map_sample(path)
