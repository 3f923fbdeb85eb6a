"""Geometry: bilinear sampling vs an independent oracle, boxes, IoU."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annotrack.geom import (
    Box,
    GridMap,
    InvalidMapError,
    Point,
    box_center,
    box_from_extreme_points,
    cell_center,
    iou,
    sample_bilinear,
)

from oracles import bilinear_oracle, extreme_box_oracle, iou_oracle

coords = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


def random_map(rng, h, w, c, dtype=np.float64):
    return GridMap(rng.uniform(-5.0, 5.0, size=(h, w, c)).astype(dtype))


# -- Point / Box basics ------------------------------------------------------


def test_point_rejects_out_of_range():
    with pytest.raises(ValueError):
        Point(-0.1, 0.5)
    with pytest.raises(ValueError):
        Point(0.5, 1.5)
    with pytest.raises(ValueError):
        Point(float("nan"), 0.5)


def test_box_rejects_inverted_extents():
    with pytest.raises(ValueError):
        Box(0.6, 0.0, 0.4, 1.0)
    with pytest.raises(ValueError):
        Box(0.0, -0.2, 1.0, 0.5)


def test_box_clamped_builder():
    b = Box.clamped(-0.3, 0.2, 1.4, 0.8)
    assert (b.x_min, b.y_min, b.x_max, b.y_max) == (0.0, 0.2, 1.0, 0.8)


# -- sample_bilinear ---------------------------------------------------------


def test_single_cell_map_is_constant():
    m = GridMap(np.array([[[7.0]]]))
    assert sample_bilinear(m, Point(0.3, 0.9)) == pytest.approx([7.0])
    assert sample_bilinear(m, Point(0.0, 0.0)) == pytest.approx([7.0])
    assert sample_bilinear(m, Point(1.0, 1.0)) == pytest.approx([7.0])


def test_horizontal_midpoint_is_linear():
    # 1 row, 2 columns, values 0 and 2: the midpoint of the two cell centers
    # is x=0.5 and must give exactly 1.
    m = GridMap(np.array([[[0.0], [2.0]]]))
    assert sample_bilinear(m, Point(0.5, 0.5)).tolist() == [1.0]


def test_empty_map_raises():
    m = GridMap(np.zeros((0, 3, 2)))
    with pytest.raises(InvalidMapError):
        sample_bilinear(m, Point(0.5, 0.5))


def test_random_interior_points_match_oracle():
    rng = np.random.default_rng(11)
    m = random_map(rng, 8, 8, 4)
    nested = m.values.tolist()
    for _ in range(100):
        p = Point(rng.uniform(), rng.uniform())
        got = sample_bilinear(m, p)
        want = bilinear_oracle(nested, p.x, p.y)
        assert got == pytest.approx(want, abs=1e-6)


def test_cell_centers_reproduce_stored_vectors_exactly():
    rng = np.random.default_rng(3)
    m = random_map(rng, 5, 7, 3, dtype=np.float32)
    for r in range(5):
        for c in range(7):
            got = sample_bilinear(m, cell_center(r, c, 5, 7))
            assert np.array_equal(got, m.values[r, c].astype(np.float64))


@given(
    data=st.data(),
    h=st.integers(min_value=1, max_value=6),
    w=st.integers(min_value=1, max_value=6),
    x=coords,
    y=coords,
)
@settings(max_examples=200, deadline=None)
def test_sample_stays_within_surrounding_hull(data, h, w, x, y):
    values = data.draw(
        st.lists(
            st.floats(min_value=-100, max_value=100, allow_nan=False),
            min_size=h * w,
            max_size=h * w,
        )
    )
    m = GridMap(np.asarray(values, dtype=np.float64).reshape(h, w, 1))
    out = float(sample_bilinear(m, Point(x, y))[0])

    def axis(coord, n):
        g = min(max(coord * n - 0.5, 0.0), n - 1.0)
        i0 = min(int(math.floor(g)), n - 1)
        return i0, min(i0 + 1, n - 1)

    r0, r1 = axis(y, h)
    c0, c1 = axis(x, w)
    corners = [m.values[r0, c0, 0], m.values[r0, c1, 0], m.values[r1, c0, 0], m.values[r1, c1, 0]]
    assert min(corners) <= out <= max(corners)


# -- box_from_extreme_points --------------------------------------------------


def test_extreme_points_cross_pattern():
    pts = [Point(0.1, 0.5), Point(0.9, 0.5), Point(0.5, 0.1), Point(0.5, 0.9)]
    assert box_from_extreme_points(pts) == Box(0.1, 0.1, 0.9, 0.9)


def test_extreme_points_degenerate():
    pts = [Point(0.5, 0.5)] * 4
    assert box_from_extreme_points(pts) == Box(0.5, 0.5, 0.5, 0.5)


def test_extreme_points_arity():
    with pytest.raises(ValueError):
        box_from_extreme_points([Point(0.5, 0.5)] * 3)
    with pytest.raises(ValueError):
        box_from_extreme_points([Point(0.5, 0.5)] * 5)


def test_extreme_points_match_minmax_oracle():
    rng = np.random.default_rng(7)
    for _ in range(50):
        raw = rng.uniform(size=(4, 2))
        pts = [Point(x, y) for x, y in raw]
        b = box_from_extreme_points(pts)
        assert (b.x_min, b.y_min, b.x_max, b.y_max) == extreme_box_oracle(raw.tolist())


@given(st.lists(st.tuples(coords, coords), min_size=4, max_size=4), st.permutations(range(4)))
@settings(max_examples=100, deadline=None)
def test_extreme_points_permutation_invariant(raw, perm):
    pts = [Point(x, y) for x, y in raw]
    assert box_from_extreme_points(pts) == box_from_extreme_points([pts[i] for i in perm])


# -- iou / box_center ----------------------------------------------------------


def test_iou_identity_disjoint_half():
    a = Box(0.0, 0.0, 1.0, 1.0)
    assert iou(a, a) == 1.0
    assert iou(Box(0.0, 0.0, 0.4, 0.4), Box(0.6, 0.6, 1.0, 1.0)) == 0.0
    assert iou(a, Box(0.5, 0.0, 1.0, 1.0)) == 0.5


def test_iou_zero_area_convention():
    degenerate = Box(0.3, 0.3, 0.3, 0.3)
    assert iou(degenerate, degenerate) == 0.0
    assert iou(degenerate, Box(0.0, 0.0, 1.0, 1.0)) == 0.0


boxes = st.builds(
    lambda x0, y0, dx, dy: Box(x0, y0, min(x0 + dx, 1.0), min(y0 + dy, 1.0)),
    coords,
    coords,
    st.floats(min_value=0.0, max_value=1.0),
    st.floats(min_value=0.0, max_value=1.0),
)


@given(boxes, boxes)
@settings(max_examples=200, deadline=None)
def test_iou_symmetric_bounded(a, b):
    v = iou(a, b)
    assert v == iou(b, a)
    assert 0.0 <= v <= 1.0
    assert v == pytest.approx(iou_oracle(
        (a.x_min, a.y_min, a.x_max, a.y_max), (b.x_min, b.y_min, b.x_max, b.y_max)
    ))


@given(boxes)
@settings(max_examples=100, deadline=None)
def test_iou_self_is_one_for_positive_area(a):
    if a.area > 0:
        assert iou(a, a) == 1.0


def test_box_center():
    assert box_center(Box(0.0, 0.0, 1.0, 1.0)) == Point(0.5, 0.5)
    zero_width = box_center(Box(0.2, 0.4, 0.2, 0.8))
    assert (zero_width.x, zero_width.y) == pytest.approx((0.2, 0.6))
    rng = np.random.default_rng(5)
    for _ in range(50):
        x0, y0 = rng.uniform(size=2) * 0.5
        x1, y1 = x0 + rng.uniform() * 0.5, y0 + rng.uniform() * 0.5
        c = box_center(Box(x0, y0, x1, y1))
        assert c.x == (x0 + x1) / 2 and c.y == (y0 + y1) / 2


def test_grid_map_rejects_non_finite():
    bad = np.ones((2, 2, 1))
    bad[0, 0, 0] = np.inf
    with pytest.raises(ValueError):
        GridMap(bad)
