from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sketchteleop.shapes import (
    ArrowGeometry,
    DEFAULT_CLASSIFIER,
    SyntheticSpec,
    classify_sketch,
    detect_arrowhead,
    fit_circle,
    generate_synthetic,
    param_field_for,
    quantize_opening,
    ring_turning,
    robust_net_turning,
    u_opening_direction,
)
from sketchteleop.strokes import SketchSet, Stroke, resample
from sketchteleop.vocab import ApproachDirection, SketchShape

ALL_SHAPES = list(SketchShape)


def spec_for(shape, **kw):
    return SyntheticSpec(shape=shape, **kw)


# --- synthetic generator ----------------------------------------------------

def test_generator_is_deterministic():
    spec = spec_for(SketchShape.ARROW, jitter_sigma=2.0, seed=99, rotation=1.1)
    a, _, _ = generate_synthetic(spec)
    b, _, _ = generate_synthetic(spec)
    assert len(a.strokes) == len(b.strokes)
    for s1, s2 in zip(a.strokes, b.strokes):
        assert np.array_equal(s1.xy, s2.xy)
        assert np.array_equal(s1.t, s2.t)


def test_generator_seeds_differ():
    a, _, _ = generate_synthetic(spec_for(SketchShape.CIRCLE, jitter_sigma=1.0, seed=1))
    b, _, _ = generate_synthetic(spec_for(SketchShape.CIRCLE, jitter_sigma=1.0, seed=2))
    assert not np.array_equal(a.strokes[0].xy, b.strokes[0].xy)


@given(
    shape=st.sampled_from(ALL_SHAPES),
    seed=st.integers(0, 5000),
    style=st.sampled_from(["barbs", "backtrack"]),
)
@settings(max_examples=60, deadline=None)
def test_params_populate_exactly_one_field(shape, seed, style):
    sketch, label, truth = generate_synthetic(
        spec_for(shape, seed=seed, arrow_style=style, rotation=seed % 6)
    )
    assert label == shape
    assert truth.populated_fields() == (param_field_for(shape),)
    got_label, got_params = classify_sketch(sketch)
    assert got_params.populated_fields() == (param_field_for(got_label),)


# --- classification, clean sketches -----------------------------------------

@pytest.mark.parametrize("shape", ALL_SHAPES)
@pytest.mark.parametrize("rotation", [0.0, 0.9, 2.4, 4.2])
def test_clean_shapes_classify_correctly(shape, rotation):
    for style in ("barbs", "backtrack"):
        sketch, truth_label, _ = generate_synthetic(
            spec_for(shape, rotation=rotation, seed=11, arrow_style=style)
        )
        label, params = classify_sketch(sketch)
        assert label == truth_label


@pytest.mark.parametrize("scale", [30.0, 60.0, 120.0, 200.0])
def test_clean_shapes_classify_at_all_scales(scale):
    for shape in ALL_SHAPES:
        sketch, truth_label, _ = generate_synthetic(spec_for(shape, scale=scale, seed=3))
        label, _ = classify_sketch(sketch)
        assert label == truth_label, f"{shape} at scale {scale} -> {label}"


def test_circle_fit_recovers_center_and_radius():
    sketch, _, truth = generate_synthetic(
        spec_for(SketchShape.CIRCLE, scale=50.0, center=(120.0, 90.0), seed=4)
    )
    _, params = classify_sketch(sketch)
    assert params.circle is not None
    assert params.circle.center == pytest.approx(truth.circle.center, abs=1.0)
    assert params.circle.radius == pytest.approx(truth.circle.radius, abs=1.0)


def test_fit_circle_exact_on_perfect_points():
    theta = np.linspace(0, 2 * np.pi, 40, endpoint=False)
    xy = np.column_stack([33 + 17 * np.cos(theta), -8 + 17 * np.sin(theta)])
    fit = fit_circle(xy)
    assert fit.center == pytest.approx((33.0, -8.0), abs=1e-9)
    assert fit.radius == pytest.approx(17.0, abs=1e-9)


def test_arrow_start_end_recovered():
    sketch, _, truth = generate_synthetic(
        spec_for(SketchShape.ARROW, rotation=0.7, seed=21, arrow_style="barbs")
    )
    _, params = classify_sketch(sketch)
    a = params.arrow
    assert a is not None
    assert a.start == pytest.approx(truth.arrow.start, abs=2.0)
    assert a.end == pytest.approx(truth.arrow.end, abs=2.0)


def test_backtrack_arrow_apex_within_3px():
    sketch, _, truth = generate_synthetic(
        spec_for(SketchShape.ARROW, rotation=2.1, seed=5, arrow_style="backtrack", scale=60.0)
    )
    label, params = classify_sketch(sketch)
    assert label == SketchShape.ARROW
    dist = math.hypot(
        params.arrow.end[0] - truth.arrow.end[0],
        params.arrow.end[1] - truth.arrow.end[1],
    )
    assert dist < 3.0


def test_composite_params_carry_both_parts():
    sketch, _, truth = generate_synthetic(
        spec_for(SketchShape.CIRCLE_AND_ARROW, rotation=0.3, seed=8)
    )
    label, params = classify_sketch(sketch)
    assert label == SketchShape.CIRCLE_AND_ARROW
    comp = params.composite
    assert comp.circle.center == pytest.approx(truth.composite.circle.center, abs=2.0)
    assert comp.circle.radius == pytest.approx(truth.composite.circle.radius, abs=2.0)
    assert comp.arrow.end == pytest.approx(truth.composite.arrow.end, abs=3.0)


def test_arrow_sweep_sign_recovered():
    for sweep in (-2.8, -1.5, 1.5, 2.8):
        sketch, _, _ = generate_synthetic(
            spec_for(SketchShape.ARROW, seed=13, arrow_sweep=sweep, rotation=0.4)
        )
        label, params = classify_sketch(sketch)
        assert label == SketchShape.ARROW
        assert math.copysign(1, params.arrow.sweep) == math.copysign(1, sweep)
        assert abs(params.arrow.sweep) == pytest.approx(abs(sweep), abs=0.6)


@given(
    shape=st.sampled_from(ALL_SHAPES),
    seed=st.integers(0, 2000),
    dx=st.floats(-300, 300),
    dy=st.floats(-300, 300),
)
@settings(max_examples=50, deadline=None)
def test_classification_translation_invariant(shape, seed, dx, dy):
    sketch, _, _ = generate_synthetic(spec_for(shape, seed=seed, rotation=seed % 6))
    l0, _ = classify_sketch(sketch)
    l1, _ = classify_sketch(sketch.translated(dx, dy))
    assert l0 == l1


# --- arrowhead idioms -------------------------------------------------------

def _line(p0, p1, n=24):
    xy = np.linspace(p0, p1, n)
    return Stroke(xy=np.asarray(xy, dtype=float))


def test_single_barb_counts_as_head():
    shaft = _line((10, 100), (200, 100), 48)
    barb = _line((200, 100), (180, 85), 8)
    det = detect_arrowhead([shaft, barb])
    assert det is not None
    assert det.end == pytest.approx((200.0, 100.0))
    assert det.start == pytest.approx((10.0, 100.0))


def test_two_barbs_form_head():
    shaft = _line((10, 100), (200, 100), 48)
    b1 = _line((200, 100), (180, 85), 8)
    b2 = _line((200, 100), (180, 115), 8)
    det = detect_arrowhead([shaft, b1, b2])
    assert det is not None
    assert det.end == pytest.approx((200.0, 100.0))


def test_head_at_shaft_first_point_flips_orientation():
    # barbs cluster at the start of the drawn shaft: user drew tip first
    shaft = _line((200, 100), (10, 100), 48)
    b1 = _line((200, 100), (185, 88), 8)
    b2 = _line((200, 100), (185, 112), 8)
    det = detect_arrowhead([shaft, b1, b2])
    assert det is not None
    assert det.end == pytest.approx((200.0, 100.0))
    assert det.start == pytest.approx((10.0, 100.0))


def test_distant_stray_stroke_is_not_a_head():
    shaft = _line((10, 100), (200, 100), 48)
    stray = _line((80, 180), (95, 170), 8)  # nowhere near a shaft endpoint
    assert detect_arrowhead([shaft, stray]) is None


def test_oversized_companion_is_not_a_head():
    shaft = _line((10, 100), (200, 100), 48)
    big = _line((200, 100), (120, 30), 24)  # ~0.55x shaft length
    assert detect_arrowhead([shaft, big]) is None


def test_three_companions_are_not_a_head():
    shaft = _line((10, 100), (200, 100), 48)
    barbs = [
        _line((200, 100), (185, 90), 6),
        _line((200, 100), (185, 110), 6),
        _line((200, 100), (190, 80), 6),
    ]
    assert detect_arrowhead([shaft, *barbs]) is None


def test_plain_line_has_no_head():
    assert detect_arrowhead([_line((0, 0), (100, 40), 30)]) is None


# --- U orientation ----------------------------------------------------------

def test_quantize_opening_axes():
    assert quantize_opening(0.0, -1.0) == ApproachDirection.ABOVE
    assert quantize_opening(0.0, 1.0) == ApproachDirection.FRONT
    assert quantize_opening(-1.0, 0.0) == ApproachDirection.LEFT
    assert quantize_opening(1.0, 0.0) == ApproachDirection.RIGHT
    # exact diagonal ties fall back to Above
    assert quantize_opening(1.0, 1.0) == ApproachDirection.ABOVE


CYCLE = [
    ApproachDirection.ABOVE,
    ApproachDirection.RIGHT,
    ApproachDirection.FRONT,
    ApproachDirection.LEFT,
]


@pytest.mark.parametrize("quarter_turns,expected", list(enumerate(CYCLE)))
def test_u_direction_by_rotation(quarter_turns, expected):
    sketch, _, truth = generate_synthetic(
        spec_for(SketchShape.U_SHAPE, rotation=quarter_turns * np.pi / 2, seed=6)
    )
    assert truth.u_shape.opening == expected
    label, params = classify_sketch(sketch)
    assert label == SketchShape.U_SHAPE
    assert params.u_shape.opening == expected


@given(quarter=st.integers(0, 3), seed=st.integers(0, 500))
@settings(max_examples=40, deadline=None)
def test_rotating_u_by_90_advances_cycle(quarter, seed):
    base_rot = quarter * np.pi / 2
    sketch, _, _ = generate_synthetic(
        spec_for(SketchShape.U_SHAPE, rotation=base_rot, seed=seed)
    )
    stroke = sketch.strokes[0]
    before = u_opening_direction(stroke)

    ninety = np.array([[0.0, -1.0], [1.0, 0.0]])
    pivot = resample(stroke).xy.mean(axis=0)
    after = u_opening_direction(stroke.transformed(ninety, about=pivot))

    assert CYCLE[(CYCLE.index(before) + 1) % 4] == after


# --- turning statistics -----------------------------------------------------

def test_ring_turning_is_signed_two_pi():
    theta = np.linspace(0, 2 * np.pi, 64)
    ring = np.column_stack([np.cos(theta), np.sin(theta)]) * 40 + 100
    ring[-1] = ring[0]
    assert ring_turning(ring) == pytest.approx(2 * np.pi, abs=1e-6)
    assert ring_turning(ring[::-1]) == pytest.approx(-2 * np.pi, abs=1e-6)


def test_robust_net_turning_straight_line():
    xy = np.column_stack([np.linspace(0, 150, 64), np.zeros(64)])
    assert abs(robust_net_turning(xy)) < 1e-6


def test_robust_net_turning_semicircle_in_u_window():
    theta = np.linspace(0, np.pi, 64)
    xy = np.column_stack([60 * np.cos(theta), 60 * np.sin(theta)])
    net = abs(robust_net_turning(xy))
    assert np.pi - DEFAULT_CLASSIFIER.u_turn_tol <= net <= np.pi + DEFAULT_CLASSIFIER.u_turn_tol


def test_robust_net_turning_s_curve_outside_u_window():
    sketch, _, _ = generate_synthetic(spec_for(SketchShape.PATH, seed=9, path_style="s_curve"))
    net = abs(robust_net_turning(resample(sketch.strokes[0]).xy))
    assert net < np.pi - DEFAULT_CLASSIFIER.u_turn_tol


# --- fallback ----------------------------------------------------------------

def test_two_open_scribbles_fall_back_to_path():
    s1 = _line((0, 0), (80, 35), 20)
    s2 = _line((90, 50), (160, 20), 20)
    label, params = classify_sketch(SketchSet(strokes=(s1, s2)))
    assert label == SketchShape.PATH
    assert params.path is not None
    assert len(params.path.polyline) == 128  # both strokes, resampled


def test_circle_plus_stray_line_falls_back_to_path():
    ring, _, _ = generate_synthetic(spec_for(SketchShape.CIRCLE, seed=10))
    stray = _line((300, 10), (260, 60), 16)
    label, _ = classify_sketch(SketchSet(strokes=(*ring.strokes, stray)))
    assert label == SketchShape.PATH


def test_classify_rejects_empty_sketch():
    with pytest.raises(ValueError):
        classify_sketch(SketchSet(strokes=()))
