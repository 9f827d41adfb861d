"""Sketch shape classification and synthetic sketch generation.

Five shapes are recognized: circle, U-shape, arrow, free path, and the
circle-and-arrow composite.  Classification is rule-based on resampled
stroke geometry; there is no learned model, so behaviour is fully
deterministic and the synthetic generator below can ship with exact
ground truth.

Turning statistics used for classification are made noise-tolerant in
two ways that matter at pen-jitter levels of a couple of pixels:

* closed-stroke detection sums turning angles around the *cyclically
  closed* polygon, which is an exact multiple of 2*pi for any simple
  polygon regardless of vertex noise;
* net turning of open strokes anchors the 2*pi winding count from the
  raw cumulative sum but takes the end headings from a total-least-
  squares line fit over a short arc window at each end, since raw
  first/last segment directions carry almost all of the jitter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .strokes import (
    MIN_TURN_SEGMENT,
    RESAMPLE_N,
    SketchSet,
    Stroke,
    resample,
    turning_angles,
)
from .vocab import ApproachDirection, SketchShape


@dataclass(frozen=True)
class ClassifierConfig:
    """Thresholds for the shape decision procedure."""

    closure_max: float = 0.2          # closed if endpoint gap / arc below this
    closed_turn_tol: float = 0.8      # ... and |cyclic turning| within 2pi +/- this
    u_turn_tol: float = 0.7           # U-shape net turning window: pi +/- this
    u_sep_lo: float = 0.3             # endpoint separation as fraction of extent
    u_sep_hi: float = 1.3
    head_len_ratio: float = 0.35      # head strokes must be shorter than this x shaft
    head_snap_px: float = 12.0        # ... and end within this of a shaft endpoint
    backtrack_angle: float = 1.7      # sharp-turn threshold for drawn-on heads
    backtrack_tail: float = 0.25      # ... looked for in this final fraction of arc
    simplify_eps: float = 4.0         # px cap on simplification tolerance
    simplify_frac: float = 0.025      # ... but no more than this fraction of arc
    end_window: float = 0.125         # arc fraction per end for direction fits


DEFAULT_CLASSIFIER = ClassifierConfig()


# --- shape parameter records ------------------------------------------------

@dataclass(frozen=True)
class CircleFit:
    center: tuple[float, float]
    radius: float


@dataclass(frozen=True)
class ArrowGeometry:
    start: tuple[float, float]
    end: tuple[float, float]
    #: signed net turning of the shaft from start to end (image convention:
    #: positive is clockwise on screen); straight arrows are near zero.
    sweep: float = 0.0


@dataclass(frozen=True)
class UGeometry:
    opening: ApproachDirection


@dataclass(frozen=True, eq=False)
class PathGeometry:
    polyline: np.ndarray  # (m, 2) pixel points

    def __post_init__(self):
        object.__setattr__(self, "polyline", np.asarray(self.polyline, dtype=float))


@dataclass(frozen=True)
class CompositeGeometry:
    circle: CircleFit
    arrow: ArrowGeometry


@dataclass(frozen=True)
class ShapeParams:
    """Geometry extracted for the classified shape.

    Exactly one field is populated: the one matching the shape label.
    """

    circle: CircleFit | None = None
    arrow: ArrowGeometry | None = None
    u_shape: UGeometry | None = None
    path: PathGeometry | None = None
    composite: CompositeGeometry | None = None

    def populated_fields(self) -> tuple[str, ...]:
        return tuple(
            name
            for name in ("circle", "arrow", "u_shape", "path", "composite")
            if getattr(self, name) is not None
        )


_PARAM_FIELD_FOR_SHAPE = {
    SketchShape.CIRCLE: "circle",
    SketchShape.ARROW: "arrow",
    SketchShape.U_SHAPE: "u_shape",
    SketchShape.PATH: "path",
    SketchShape.CIRCLE_AND_ARROW: "composite",
}


def param_field_for(shape: SketchShape) -> str:
    return _PARAM_FIELD_FOR_SHAPE[shape]


# --- turning estimators -----------------------------------------------------

def _wrap(a: float) -> float:
    return float(np.pi - np.mod(np.pi - a, 2.0 * np.pi))


def cyclic_turning(xy: np.ndarray, min_segment: float = MIN_TURN_SEGMENT) -> float:
    """Total signed turning around the polygon obtained by closing ``xy``.

    For a simple (non self-crossing) polygon this is exactly +/-2*pi.
    """
    pts = np.asarray(xy, dtype=float)
    deltas = np.diff(np.vstack([pts, pts[:1]]), axis=0)
    lengths = np.linalg.norm(deltas, axis=1)
    deltas = deltas[lengths > min_segment]
    if len(deltas) < 3:
        return 0.0
    headings = np.arctan2(deltas[:, 1], deltas[:, 0])
    diffs = np.diff(np.append(headings, headings[0]))
    return float((np.pi - np.mod(np.pi - diffs, 2.0 * np.pi)).sum())


def ring_turning(xy: np.ndarray) -> float:
    """Net turning of a closed stroke, measured as 2*pi times its winding
    number about the centroid.

    Equivalent to the polygon turning sum for cleanly drawn rings, but
    unaffected by the tiny self-crossing loops that pen jitter plants
    along the stroke, which flip the vertex-level turning count.
    """
    pts = np.asarray(xy, dtype=float)
    rel = pts - pts.mean(axis=0)
    radii = np.linalg.norm(rel, axis=1)
    if np.any(radii < 1e-9):
        return 0.0
    angles = np.arctan2(rel[:, 1], rel[:, 0])
    diffs = np.diff(np.append(angles, angles[0]))
    return float((np.pi - np.mod(np.pi - diffs, 2.0 * np.pi)).sum())


def _window_heading(xy: np.ndarray, arc: np.ndarray, lo: float, hi: float) -> float:
    """Travel direction over an arc-length window, from a TLS line fit."""
    total = arc[-1]
    mask = (arc >= lo * total) & (arc <= hi * total)
    pts = xy[mask]
    if len(pts) < 2:
        i = max(1, int(np.searchsorted(arc, lo * total)))
        pts = xy[i - 1:i + 1]
    centered = pts - pts.mean(axis=0)
    if np.allclose(centered, 0.0):
        return 0.0
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    d = vt[0]
    travel = pts[-1] - pts[0]
    if float(d @ travel) < 0.0:
        d = -d
    return float(np.arctan2(d[1], d[0]))


def robust_net_turning(
    xy: np.ndarray,
    end_window: float = 0.125,
    simplify_eps: float = 4.0,
    simplify_frac: float = 0.025,
) -> float:
    """Net turning of an open polyline, tolerant of endpoint jitter.

    The 2*pi winding count comes from the turning sum of the simplified
    polyline (jitter backtracks that would wrap an extra turn into the
    raw sum do not survive simplification); the fractional part comes
    from fitted end-window headings.
    """
    pts = np.asarray(xy, dtype=float)
    arc = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))])
    if arc[-1] <= 0.0:
        return 0.0
    d0 = _window_heading(pts, arc, 0.0, end_window)
    d1 = _window_heading(pts, arc, 1.0 - end_window, 1.0)
    base = _wrap(d1 - d0)
    eps = min(simplify_eps, simplify_frac * float(arc[-1]))
    coarse = pts[_simplify_indices(pts, eps)]
    raw = float(turning_angles(coarse, min_segment=0.0).sum())
    k = round((raw - base) / (2.0 * np.pi))
    return base + 2.0 * np.pi * k


def _simplify_indices(xy: np.ndarray, eps: float) -> np.ndarray:
    """Ramer-Douglas-Peucker: indices of the vertices that survive
    simplification with tolerance ``eps`` pixels."""
    n = len(xy)
    keep = np.zeros(n, dtype=bool)
    keep[0] = keep[-1] = True
    stack = [(0, n - 1)]
    while stack:
        i, j = stack.pop()
        if j <= i + 1:
            continue
        chord = xy[j] - xy[i]
        rel = xy[i + 1:j] - xy[i]
        length = float(np.hypot(*chord))
        if length < 1e-12:
            dev = np.linalg.norm(rel, axis=1)
        else:
            dev = np.abs(chord[0] * rel[:, 1] - chord[1] * rel[:, 0]) / length
        k = int(np.argmax(dev))
        if dev[k] > eps:
            mid = i + 1 + k
            keep[mid] = True
            stack.append((i, mid))
            stack.append((mid, j))
    return np.where(keep)[0]


def _merge_close_vertices(xy: np.ndarray, idx: np.ndarray, min_gap: float) -> np.ndarray:
    """Drop interior simplified vertices that crowd within ``min_gap``
    pixels of their predecessor, keeping whichever deviates more from
    the chord of its neighbours.  Crowded pairs split one sharp corner
    into two shallow ones, hiding it from the turn threshold."""
    idx = list(idx)
    changed = True
    while changed and len(idx) > 3:
        changed = False
        for k in range(1, len(idx) - 2):
            a, b = idx[k], idx[k + 1]
            if np.linalg.norm(xy[b] - xy[a]) >= min_gap:
                continue
            lo, hi = xy[idx[k - 1]], xy[idx[k + 2]]
            chord = hi - lo
            length = float(np.hypot(*chord)) or 1.0

            def dev(p):
                return abs(chord[0] * (p[1] - lo[1]) - chord[1] * (p[0] - lo[0])) / length

            idx.pop(k if dev(xy[a]) < dev(xy[b]) else k + 1)
            changed = True
            break
    return np.asarray(idx)


def _sharp_turns(stroke: Stroke, cfg: ClassifierConfig) -> list[tuple[float, int, float]]:
    """Sharp direction reversals along a resampled stroke.

    The polyline is simplified first so corners are measured between
    long segments, where pen jitter barely moves the headings; jitter
    vertices that survive simplification carry only small angles.
    Returns (arc fraction, vertex index, signed turn) per reversal
    sharper than the backtrack threshold.
    """
    eps = min(cfg.simplify_eps, cfg.simplify_frac * stroke.arc_length())
    idx = _simplify_indices(stroke.xy, eps)
    if len(idx) >= 4:
        idx = _merge_close_vertices(stroke.xy, idx, 1.5 * eps)
    if len(idx) < 3:
        return []
    pts = stroke.xy[idx]
    deltas = np.diff(pts, axis=0)
    headings = np.arctan2(deltas[:, 1], deltas[:, 0])
    turns = np.pi - np.mod(np.pi - np.diff(headings), 2.0 * np.pi)
    arc = stroke.cumulative_arc()
    total = arc[-1]
    return [
        (float(arc[idx[k + 1]] / total), int(idx[k + 1]), float(a))
        for k, a in enumerate(turns)
        if abs(a) > cfg.backtrack_angle
    ]


# --- arrow detection ----------------------------------------------------------

def detect_arrowhead(
    strokes: Sequence[Stroke], config: ClassifierConfig = DEFAULT_CLASSIFIER
) -> ArrowGeometry | None:
    """Find an arrow among open strokes, or return None.

    Two drawing idioms are recognized:

    * separate head strokes: the longest stroke is the shaft, and one or
      two much shorter strokes whose nearest endpoint clusters at a
      common shaft endpoint form the head;
    * a head drawn without lifting the pen: at least two sharp
      direction reversals in the final quarter of a single stroke's arc
      length, with the arrow tip at the first reversal.
    """
    if not strokes:
        return None
    rs = [resample(s, RESAMPLE_N) for s in strokes]
    if len(rs) == 1:
        return _detect_drawn_on_head(rs[0], config)
    return _detect_separate_head(rs, config)


def _detect_separate_head(rs: list[Stroke], cfg: ClassifierConfig) -> ArrowGeometry | None:
    arcs = [s.arc_length() for s in rs]
    shaft_i = int(np.argmax(arcs))
    shaft = rs[shaft_i]
    others = [s for i, s in enumerate(rs) if i != shaft_i]
    if not 1 <= len(others) <= 2:
        return None
    shaft_ends = np.array([shaft.xy[0], shaft.xy[-1]])
    snap_votes = []
    for s in others:
        if s.arc_length() >= cfg.head_len_ratio * arcs[shaft_i]:
            return None
        own_ends = np.array([s.xy[0], s.xy[-1]])
        dists = np.linalg.norm(own_ends[:, None, :] - shaft_ends[None, :, :], axis=2)
        nearest = np.unravel_index(np.argmin(dists), dists.shape)
        if dists[nearest] > cfg.head_snap_px:
            return None
        snap_votes.append(nearest[1])  # which shaft endpoint it clusters at
    if len(set(snap_votes)) != 1:
        return None
    tip_at_start = snap_votes[0] == 0
    xy = shaft.xy[::-1] if tip_at_start else shaft.xy
    sweep = robust_net_turning(xy, cfg.end_window)
    return ArrowGeometry(
        start=(float(xy[0][0]), float(xy[0][1])),
        end=(float(xy[-1][0]), float(xy[-1][1])),
        sweep=sweep,
    )


def _detect_drawn_on_head(rs: Stroke, cfg: ClassifierConfig) -> ArrowGeometry | None:
    tail = [
        (frac, vertex, turn)
        for frac, vertex, turn in _sharp_turns(rs, cfg)
        if frac >= 1.0 - cfg.backtrack_tail
    ]
    if len(tail) < 2:
        return None
    apex_vertex = tail[0][1]  # the tip sits at the first reversal
    end = rs.xy[apex_vertex]
    sweep = robust_net_turning(rs.xy[: apex_vertex + 1], cfg.end_window)
    return ArrowGeometry(
        start=(float(rs.xy[0][0]), float(rs.xy[0][1])),
        end=(float(end[0]), float(end[1])),
        sweep=sweep,
    )


# --- circle fitting and U orientation ----------------------------------------

def fit_circle(xy: np.ndarray) -> CircleFit:
    """Least-squares circle through the points (algebraic fit)."""
    pts = np.asarray(xy, dtype=float)
    a = np.column_stack([2.0 * pts, np.ones(len(pts))])
    b = (pts ** 2).sum(axis=1)
    (cx, cy, c), *_ = np.linalg.lstsq(a, b, rcond=None)
    radius = math.sqrt(max(c + cx * cx + cy * cy, 0.0))
    return CircleFit(center=(float(cx), float(cy)), radius=float(radius))


def quantize_opening(vx: float, vy: float) -> ApproachDirection:
    """Map an image-space opening vector to an approach direction.

    Image y grows downward, so an opening that points up the image
    (negative y) means the gap faces away from the viewer's lap: grasp
    from above.  Ties between the axes resolve to Above.
    """
    if abs(vx) == abs(vy):
        return ApproachDirection.ABOVE
    if abs(vy) > abs(vx):
        return ApproachDirection.ABOVE if vy < 0 else ApproachDirection.FRONT
    return ApproachDirection.LEFT if vx < 0 else ApproachDirection.RIGHT


def u_opening_direction(stroke: Stroke) -> ApproachDirection:
    """Which way the gap of a U-shaped stroke faces.

    The opening vector runs from the arc centroid to the midpoint of the
    stroke endpoints; its dominant image axis picks the direction.
    """
    rs = resample(stroke, RESAMPLE_N)
    midpoint = (rs.xy[0] + rs.xy[-1]) / 2.0
    v = midpoint - rs.xy.mean(axis=0)
    return quantize_opening(float(v[0]), float(v[1]))


# --- the classifier -----------------------------------------------------------

def _max_extent(xy: np.ndarray) -> float:
    d = xy[:, None, :] - xy[None, :, :]
    return float(np.sqrt((d ** 2).sum(axis=2)).max())


def _is_closed(rs: Stroke, cfg: ClassifierConfig) -> bool:
    arc = rs.arc_length()
    if arc <= 0.0:
        return False
    closure = float(np.linalg.norm(rs.xy[-1] - rs.xy[0])) / arc
    if closure >= cfg.closure_max:
        return False
    return abs(abs(ring_turning(rs.xy)) - 2.0 * np.pi) <= cfg.closed_turn_tol


def classify_sketch(
    sketch: SketchSet, config: ClassifierConfig = DEFAULT_CLASSIFIER
) -> tuple[SketchShape, ShapeParams]:
    """Label a sketch with one of the five shapes and extract its geometry.

    Decision order: split strokes into closed and open; look for an
    arrow among the open strokes; a closed stroke plus an arrow is the
    composite; an arrow alone is an arrow; a single closed stroke is a
    circle; a single open stroke with a half-turn of net turning and a
    sizable endpoint gap is a U; anything else falls back to a path.
    """
    if not sketch.strokes:
        raise ValueError("cannot classify an empty sketch")
    rs = [resample(s, RESAMPLE_N) for s in sketch.strokes]
    closed = [i for i, s in enumerate(rs) if _is_closed(s, config)]
    open_idx = [i for i in range(len(rs)) if i not in closed]

    arrow = detect_arrowhead([sketch.strokes[i] for i in open_idx], config)

    if closed and arrow is not None:
        ring = max(closed, key=lambda i: rs[i].arc_length())
        circle = fit_circle(rs[ring].xy)
        return (
            SketchShape.CIRCLE_AND_ARROW,
            ShapeParams(composite=CompositeGeometry(circle=circle, arrow=arrow)),
        )
    if arrow is not None:
        return SketchShape.ARROW, ShapeParams(arrow=arrow)
    if len(closed) == 1 and not open_idx:
        return SketchShape.CIRCLE, ShapeParams(circle=fit_circle(rs[0].xy))
    if len(rs) == 1 and open_idx:
        s = rs[0]
        net = robust_net_turning(s.xy, config.end_window)
        separation = float(np.linalg.norm(s.xy[-1] - s.xy[0]))
        extent = _max_extent(s.xy)
        if (
            abs(abs(net) - np.pi) <= config.u_turn_tol
            and extent > 0.0
            and config.u_sep_lo * extent <= separation <= config.u_sep_hi * extent
        ):
            return (
                SketchShape.U_SHAPE,
                ShapeParams(u_shape=UGeometry(opening=u_opening_direction(sketch.strokes[0]))),
            )
    polyline = np.concatenate([s.xy for s in rs], axis=0)
    return SketchShape.PATH, ShapeParams(path=PathGeometry(polyline=polyline))


# --- synthetic sketches -------------------------------------------------------

@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for one synthetic sketch.

    The same spec always yields byte-identical output: every random
    choice comes from a generator seeded with ``seed``.
    """

    shape: SketchShape
    jitter_sigma: float = 0.0
    scale: float = 60.0
    rotation: float = 0.0
    seed: int = 0
    center: tuple[float, float] = (160.0, 120.0)
    arrow_style: str = "barbs"     # "barbs" | "backtrack"
    path_style: str = "s_curve"    # "s_curve" | "wiggle"
    arrow_sweep: float = 0.0
    label: str | None = None
    frame_id: str = ""


def _heading_points(start, heading: float, length: float, sweep: float, n: int) -> np.ndarray:
    """Unit-speed curve from tangent data: straight if sweep is 0, else a
    circular arc whose heading advances by ``sweep`` over ``length``."""
    start = np.asarray(start, dtype=float)
    s = np.linspace(0.0, length, n)
    if abs(sweep) < 1e-9:
        return start + np.outer(s, [math.cos(heading), math.sin(heading)])
    radius = length / sweep
    phi = heading + s * sweep / length
    x = start[0] + radius * (np.sin(phi) - math.sin(heading))
    y = start[1] + radius * (-np.cos(phi) + math.cos(heading))
    return np.column_stack([x, y])


def _as_stroke(xy: np.ndarray, stroke_index: int) -> Stroke:
    t = stroke_index * 1.0 + np.arange(len(xy)) * 0.008
    return Stroke(xy=xy, t=t)


def generate_synthetic(spec: SyntheticSpec) -> tuple[SketchSet, SketchShape, ShapeParams]:
    """Build a sketch of the requested shape plus exact ground truth.

    Ground-truth params describe the clean geometry before jitter is
    applied.
    """
    rng = np.random.default_rng(spec.seed)
    cx, cy = spec.center
    center = np.array([cx, cy])
    polylines: list[np.ndarray]

    if spec.shape == SketchShape.CIRCLE:
        sign = 1.0 if rng.random() < 0.5 else -1.0
        theta = spec.rotation + sign * np.linspace(0.0, 2.0 * np.pi, RESAMPLE_N)
        pts = center + spec.scale * np.column_stack([np.cos(theta), np.sin(theta)])
        pts[-1] = pts[0]
        polylines = [pts]
        truth = ShapeParams(circle=CircleFit(center=(cx, cy), radius=spec.scale))

    elif spec.shape == SketchShape.U_SHAPE:
        arc_turn = rng.uniform(1.0, 1.2) * np.pi
        a = np.linspace((np.pi - arc_turn) / 2.0, (np.pi + arc_turn) / 2.0, RESAMPLE_N)
        pts = center + spec.scale * np.column_stack([np.cos(a), np.sin(a)])
        pivot = pts.mean(axis=0)
        rot = np.array([
            [math.cos(spec.rotation), -math.sin(spec.rotation)],
            [math.sin(spec.rotation), math.cos(spec.rotation)],
        ])
        pts = (pts - pivot) @ rot.T + pivot
        opening = rot @ np.array([0.0, -1.0])
        truth = ShapeParams(
            u_shape=UGeometry(opening=quantize_opening(float(opening[0]), float(opening[1])))
        )
        polylines = [pts]

    elif spec.shape == SketchShape.ARROW:
        polylines, truth_arrow = _arrow_polylines(spec, rng, center, spec.scale)
        truth = ShapeParams(arrow=truth_arrow)

    elif spec.shape == SketchShape.PATH:
        if spec.path_style == "wiggle":
            length = 2.5 * spec.scale
            xs = np.linspace(0.0, length, RESAMPLE_N)
            ys = 0.25 * spec.scale * np.sin(2.0 * np.pi * 2.0 * xs / length)
            pts = np.column_stack([xs, ys])
        else:
            sgn = 1.0 if rng.random() < 0.5 else -1.0
            radius = 0.75 * spec.scale
            half1 = _heading_points((0, 0), spec.rotation, np.pi * radius, sgn * np.pi, 32)
            half2 = _heading_points(
                half1[-1], spec.rotation + sgn * np.pi, np.pi * radius, -sgn * np.pi, 33
            )[1:]
            pts = np.concatenate([half1, half2])
        rot = np.array([
            [math.cos(spec.rotation), -math.sin(spec.rotation)],
            [math.sin(spec.rotation), math.cos(spec.rotation)],
        ])
        if spec.path_style == "wiggle":
            pts = pts @ rot.T
        pts = pts - pts.mean(axis=0) + center
        polylines = [pts]
        truth = ShapeParams(path=PathGeometry(polyline=pts.copy()))

    elif spec.shape == SketchShape.CIRCLE_AND_ARROW:
        ring_r = 0.6 * spec.scale
        theta = np.linspace(0.0, 2.0 * np.pi, RESAMPLE_N)
        ring = np.column_stack([ring_r * np.cos(theta), ring_r * np.sin(theta)])
        ring[-1] = ring[0]
        u = np.array([math.cos(spec.rotation), math.sin(spec.rotation)])
        arrow_start = 1.1 * ring_r * u
        arrow_spec = SyntheticSpec(
            shape=SketchShape.ARROW,
            scale=0.8 * spec.scale,
            rotation=spec.rotation,
            seed=spec.seed,
            arrow_style=spec.arrow_style,
            arrow_sweep=spec.arrow_sweep,
        )
        arrow_lines, truth_arrow = _arrow_polylines(
            arrow_spec, rng, arrow_start, 0.8 * spec.scale, anchor="start"
        )
        all_pts = np.concatenate([ring] + arrow_lines)
        shift = center - all_pts.mean(axis=0)
        ring = ring + shift
        arrow_lines = [p + shift for p in arrow_lines]
        truth_arrow = ArrowGeometry(
            start=(truth_arrow.start[0] + shift[0], truth_arrow.start[1] + shift[1]),
            end=(truth_arrow.end[0] + shift[0], truth_arrow.end[1] + shift[1]),
            sweep=truth_arrow.sweep,
        )
        polylines = [ring] + arrow_lines
        truth = ShapeParams(
            composite=CompositeGeometry(
                circle=CircleFit(center=(float(shift[0]), float(shift[1])), radius=ring_r),
                arrow=truth_arrow,
            )
        )
    else:
        raise ValueError(f"unknown shape {spec.shape}")

    if spec.jitter_sigma > 0.0:
        polylines = [
            pts + rng.normal(0.0, spec.jitter_sigma, size=pts.shape) for pts in polylines
        ]
    strokes = tuple(_as_stroke(pts, i) for i, pts in enumerate(polylines))
    sketch = SketchSet(strokes=strokes, frame_id=spec.frame_id, label=spec.label)
    return sketch, spec.shape, truth


def _arrow_polylines(
    spec: SyntheticSpec,
    rng: np.random.Generator,
    anchor_point: np.ndarray,
    scale: float,
    anchor: str = "center",
) -> tuple[list[np.ndarray], ArrowGeometry]:
    """Polylines of one arrow plus its ground truth, placed so that either
    its midpoint or its start sits at ``anchor_point``."""
    shaft_len = 2.0 * scale
    if spec.arrow_style == "backtrack":
        total = 2.6 * scale
        sgn = 1.0 if rng.random() < 0.5 else -1.0
        # head corners land at 80% and 90% of arc, with leg sampling at
        # the same density as the shaft so jitter inflates both alike
        shaft = _heading_points((0, 0), spec.rotation, 0.80 * total, spec.arrow_sweep, 49)
        h_after = spec.rotation + spec.arrow_sweep
        leg1 = _heading_points(shaft[-1], h_after + sgn * 2.8, 0.10 * total, 0.0, 7)[1:]
        leg2 = _heading_points(leg1[-1], h_after, 0.10 * total, 0.0, 7)[1:]
        pts = np.concatenate([shaft, leg1, leg2])
        start_xy, end_xy = shaft[0], shaft[-1]
        lines = [pts]
    else:
        n_barbs = 1 if rng.random() < 0.2 else 2
        shaft = _heading_points((0, 0), spec.rotation, shaft_len, spec.arrow_sweep, 48)
        tip_heading = spec.rotation + spec.arrow_sweep
        back = tip_heading + np.pi
        barbs = [_heading_points(shaft[-1], back - 0.5, 0.45 * scale, 0.0, 8)]
        if n_barbs == 2:
            barbs.append(_heading_points(shaft[-1], back + 0.5, 0.45 * scale, 0.0, 8))
        start_xy, end_xy = shaft[0], shaft[-1]
        lines = [shaft] + barbs
        pts = np.concatenate(lines)
    if anchor == "start":
        shift = np.asarray(anchor_point, dtype=float) - start_xy
    else:
        shift = np.asarray(anchor_point, dtype=float) - pts.mean(axis=0)
    lines = [p + shift for p in lines]
    truth = ArrowGeometry(
        start=(float(start_xy[0] + shift[0]), float(start_xy[1] + shift[1])),
        end=(float(end_xy[0] + shift[0]), float(end_xy[1] + shift[1])),
        sweep=spec.arrow_sweep,
    )
    return lines, truth
