from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sketchteleop.strokes import (
    DegenerateStroke,
    EmptySketch,
    PixelBox,
    RESAMPLE_N,
    SketchSet,
    Stroke,
    compose_bbox,
    resample,
    sketch_from_json,
    sketch_to_json,
    stroke_features,
    turning_angles,
)
from sketchteleop.vocab import SketchShape


def circle_stroke(cx=100.0, cy=100.0, r=50.0, n=64, closed=True):
    theta = np.linspace(0.0, 2.0 * np.pi, n)
    xy = np.column_stack([cx + r * np.cos(theta), cy + r * np.sin(theta)])
    if closed:
        xy[-1] = xy[0]
    return Stroke(xy=xy)


# --- ingestion -------------------------------------------------------------

def test_from_points_drops_consecutive_duplicates():
    s = Stroke.from_points([(0, 0, 0.0), (0, 0, 0.01), (10, 0, 0.02), (10, 0, 0.03)])
    assert len(s) == 2
    assert s.arc_length() == pytest.approx(10.0)


def test_from_points_rejects_single_point():
    with pytest.raises(DegenerateStroke):
        Stroke.from_points([(5, 5, 0.0)])


def test_from_points_rejects_all_identical():
    with pytest.raises(DegenerateStroke):
        Stroke.from_points([(5, 5, 0.0), (5, 5, 0.1), (5, 5, 0.2)])


def test_timestamps_preserved():
    s = Stroke.from_points([(0, 0, 0.0), (3, 4, 0.5)])
    assert list(s.t) == [0.0, 0.5]


# --- resample --------------------------------------------------------------

def test_resample_quarter_circle_stays_on_arc():
    # Seven irregularly spaced samples of a quarter circle, radius 100
    # centered at (150, 150).  After resampling to 64 points every output
    # point must sit within 2 px of the true arc.  The oracle is the
    # analytic circle, not the resampler itself.
    angles = np.array([0.0, 0.15, 0.5, 0.7, 1.08, 1.33, 0.5 * np.pi])
    center = np.array([150.0, 150.0])
    radius = 100.0
    pts = center + radius * np.column_stack([np.cos(angles), np.sin(angles)])
    coarse = Stroke(xy=pts)

    rs = resample(coarse, 64)
    assert len(rs) == 64
    radial_error = np.abs(np.linalg.norm(rs.xy - center, axis=1) - radius)
    assert radial_error.max() < 2.0
    # and the coarse chords genuinely deviate, so the bound is not vacuous
    assert radial_error.max() > 0.5
    # endpoints preserved exactly
    assert np.array_equal(rs.xy[0], pts[0])
    assert np.array_equal(rs.xy[-1], pts[-1])


def test_resample_uniform_spacing():
    s = Stroke.from_points([(0, 0, 0.0), (100, 0, 1.0)])
    rs = resample(s, 11)
    assert np.allclose(rs.xy[:, 0], np.arange(0, 101, 10))
    assert np.allclose(rs.xy[:, 1], 0.0)
    assert np.allclose(rs.t, np.linspace(0, 1, 11))


def test_resample_rejects_zero_length():
    s = Stroke(xy=np.array([[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(DegenerateStroke):
        resample(s, 8)


@given(
    n_pts=st.integers(3, 20),
    seed=st.integers(0, 10_000),
)
@settings(max_examples=60, deadline=None)
def test_resample_preserves_length_of_straight_polylines(n_pts, seed):
    # Collinear vertices with irregular spacing: chord-sum equals arc
    # length exactly, so the resampled polyline must match within 1e-9
    # relative tolerance.
    rng = np.random.default_rng(seed)
    xs = np.cumsum(rng.uniform(0.5, 20.0, size=n_pts))
    direction = rng.uniform(0, 2 * np.pi)
    xy = np.column_stack([xs * np.cos(direction), xs * np.sin(direction)])
    s = Stroke(xy=xy)
    rs = resample(s, RESAMPLE_N)
    assert rs.arc_length() == pytest.approx(s.arc_length(), rel=1e-9)


def test_resample_is_idempotent_on_uniform_polylines():
    s = resample(circle_stroke(), RESAMPLE_N)
    again = resample(s, RESAMPLE_N)
    assert np.allclose(again.xy, s.xy, atol=1e-9)
    assert again.arc_length() == pytest.approx(s.arc_length(), rel=1e-9)


@given(seed=st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_resample_never_lengthens(seed):
    # Chords cut corners, so the output arc length can only shrink.
    rng = np.random.default_rng(seed)
    xy = rng.uniform(0, 200, size=(rng.integers(3, 30), 2))
    try:
        s = Stroke.from_points([(x, y, 0.0) for x, y in xy])
    except DegenerateStroke:
        return
    rs = resample(s, RESAMPLE_N)
    assert rs.arc_length() <= s.arc_length() + 1e-9


# --- turning angles --------------------------------------------------------

def test_turning_ignores_sub_half_pixel_segments():
    # A right-angle corner, with a burst of 0.3 px dither in the middle of
    # one leg.  The dither segments are below the half pixel floor, so the
    # net turning must match the clean corner.
    clean = np.array([[0.0, 0.0], [50.0, 0.0], [50.0, 50.0]])
    dithered = np.array([
        [0.0, 0.0],
        [25.0, 0.0],
        [25.2, 0.2],
        [25.0, 0.1],
        [25.3, 0.0],
        [50.0, 0.0],
        [50.0, 50.0],
    ])
    assert turning_angles(clean).sum() == pytest.approx(np.pi / 2)
    assert turning_angles(dithered).sum() == pytest.approx(
        turning_angles(clean).sum(), abs=0.02
    )


def test_turning_sign_convention():
    # y grows downward, so a right turn on screen (x+ then y+) is positive.
    right_turn = np.array([[0.0, 0.0], [10.0, 0.0], [10.0, 10.0]])
    left_turn = np.array([[0.0, 0.0], [10.0, 0.0], [10.0, -10.0]])
    assert turning_angles(right_turn).sum() > 0
    assert turning_angles(left_turn).sum() < 0


# --- features --------------------------------------------------------------

def test_features_straight_segment():
    s = Stroke.from_points([(10, 20, 0.0), (110, 20, 1.0)])
    f = stroke_features(s)
    assert f.net_turning == pytest.approx(0.0, abs=1e-9)
    assert f.closure_ratio == pytest.approx(1.0, abs=1e-9)
    assert f.endpoint_vector == pytest.approx((100.0, 0.0))
    # centroid-to-point distances on a uniform line have cv near 0.577
    assert f.radius_cv == pytest.approx(math.sqrt(1.0 / 3.0), abs=0.05)


def test_features_perfect_circle():
    f = stroke_features(circle_stroke(r=50.0))
    assert f.closure_ratio < 0.05
    assert abs(abs(f.net_turning) - 2 * np.pi) < 0.1
    assert f.radius_cv < 0.02


def test_features_semicircle():
    theta = np.linspace(0.0, np.pi, 64)
    xy = np.column_stack([60 * np.cos(theta), 60 * np.sin(theta)])
    f = stroke_features(Stroke(xy=xy))
    assert abs(abs(f.net_turning) - np.pi) < 0.15
    assert f.closure_ratio > 0.5  # endpoints a diameter apart


@given(
    dx=st.floats(-500, 500),
    dy=st.floats(-500, 500),
    seed=st.integers(0, 1000),
)
@settings(max_examples=40, deadline=None)
def test_features_translation_invariant(dx, dy, seed):
    rng = np.random.default_rng(seed)
    xy = np.cumsum(rng.uniform(-10, 10, size=(12, 2)), axis=0) + 100
    try:
        s = Stroke.from_points([(x, y, 0.0) for x, y in xy])
    except DegenerateStroke:
        return
    f0 = stroke_features(s)
    f1 = stroke_features(s.translated(dx, dy))
    assert f1.arc_length == pytest.approx(f0.arc_length, rel=1e-9)
    assert f1.net_turning == pytest.approx(f0.net_turning, abs=1e-6)
    assert f1.closure_ratio == pytest.approx(f0.closure_ratio, rel=1e-6)
    assert f1.radius_cv == pytest.approx(f0.radius_cv, rel=1e-6, abs=1e-9)


# --- bounding boxes --------------------------------------------------------

def test_bbox_circle_extremes():
    s = Stroke.from_points([(10, 5, 0), (30, 12, 0), (25, 40, 0), (12, 30, 0)])
    box = compose_bbox(SketchSet(strokes=(s,)), SketchShape.CIRCLE)
    assert (box.min_x, box.min_y, box.max_x, box.max_y) == (10, 5, 30, 40)


def test_bbox_arrow_spans_start_end():
    shaft = Stroke.from_points([(12, 40, 0), (100, 60, 0), (200, 90, 0)])
    box = compose_bbox(
        SketchSet(strokes=(shaft,)),
        SketchShape.ARROW,
        arrow_start=(12, 40),
        arrow_end=(200, 90),
    )
    assert (box.min_x, box.min_y, box.max_x, box.max_y) == (12, 40, 200, 90)


def test_bbox_degenerate_point_padded():
    s = Stroke(xy=np.array([[50.0, 80.0], [50.0, 80.0]]))
    box = compose_bbox(SketchSet(strokes=(s,)), SketchShape.PATH)
    assert (box.min_x, box.min_y, box.max_x, box.max_y) == (46, 76, 54, 84)


def test_bbox_degenerate_one_axis_padded():
    s = Stroke.from_points([(10, 50, 0), (90, 50, 0)])
    box = compose_bbox(SketchSet(strokes=(s,)), SketchShape.PATH)
    assert (box.min_x, box.max_x) == (10, 90)
    assert (box.min_y, box.max_y) == (46, 54)


def test_bbox_clamped_to_frame():
    s = Stroke.from_points([(-20, 10, 0), (400, 500, 0)])
    box = compose_bbox(SketchSet(strokes=(s,)), SketchShape.PATH, frame_size=(320, 240))
    assert (box.min_x, box.min_y, box.max_x, box.max_y) == (0, 10, 319, 239)


def test_bbox_empty_sketch_raises():
    with pytest.raises(EmptySketch):
        SketchSet(strokes=()).all_points()


@given(
    seed=st.integers(0, 100_000),
    n_strokes=st.integers(1, 4),
)
@settings(max_examples=80, deadline=None)
def test_bbox_matches_per_point_scan(seed, n_strokes):
    rng = np.random.default_rng(seed)
    strokes = []
    for _ in range(n_strokes):
        pts = rng.uniform(0, 300, size=(rng.integers(2, 30), 2))
        pts[1] = pts[0] + [1.0, 1.0]  # keep each stroke non-degenerate
        strokes.append(Stroke(xy=pts))
    sketch = SketchSet(strokes=tuple(strokes))
    box = compose_bbox(sketch, SketchShape.PATH)

    lo_x = min(float(p[0]) for s in strokes for p in s.xy)
    hi_x = max(float(p[0]) for s in strokes for p in s.xy)
    lo_y = min(float(p[1]) for s in strokes for p in s.xy)
    hi_y = max(float(p[1]) for s in strokes for p in s.xy)
    assert (box.min_x, box.min_y, box.max_x, box.max_y) == (lo_x, lo_y, hi_x, hi_y)


def test_pixel_range_inclusive_edges():
    box = PixelBox(10.2, 5.0, 30.8, 40.0)
    (x0, x1), (y0, y1) = box.pixel_range()
    assert (x0, x1) == (11, 30)
    assert (y0, y1) == (5, 40)


# --- serialization ---------------------------------------------------------

def test_sketch_json_round_trip():
    s1 = Stroke.from_points([(1.5, 2.5, 0.0), (10.0, 20.0, 0.5)])
    s2 = Stroke.from_points([(5, 5, 1.0), (6, 7, 1.1), (9, 4, 1.3)])
    sketch = SketchSet(strokes=(s1, s2), frame_id="frame-0042", label="rotate")
    back = sketch_from_json(sketch_to_json(sketch))
    assert back.frame_id == "frame-0042"
    assert back.label == "rotate"
    assert len(back.strokes) == 2
    for a, b in zip(back.strokes, sketch.strokes):
        assert np.array_equal(a.xy, b.xy)
        assert np.array_equal(a.t, b.t)


def test_sketch_json_label_defaults_to_none():
    raw = json.dumps({"frame_id": "f1", "strokes": [[[0, 0, 0], [5, 5, 0.2]]]})
    sketch = sketch_from_json(raw)
    assert sketch.label is None


def test_sketch_json_rejects_empty():
    with pytest.raises(EmptySketch):
        sketch_from_json(json.dumps({"frame_id": "f", "strokes": []}))
