"""Stroke geometry: ingestion, resampling, summary features, bounding boxes.

Pixel coordinates use the image convention throughout: origin at the
top-left corner, x grows to the right (columns), y grows downward (rows).
A stroke is an ordered polyline of (x, y, t) samples as captured from a
pointer device; timestamps are kept but most geometry ignores them.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

#: Number of points every stroke is resampled to before feature
#: extraction or classification.
RESAMPLE_N = 64

#: Segments shorter than this many pixels are skipped when accumulating
#: turning angles; they carry direction noise, not shape.
MIN_TURN_SEGMENT = 0.5


class DegenerateStroke(ValueError):
    """Stroke has fewer than two distinct points or zero arc length."""


class EmptySketch(ValueError):
    """Sketch contains no strokes, or only empty strokes."""


@dataclass(frozen=True)
class StrokePoint:
    x: float
    y: float
    t: float = 0.0


@dataclass(frozen=True, eq=False)
class Stroke:
    """Polyline in pixel space.

    ``xy`` is an (n, 2) float array, ``t`` the matching (n,) timestamp
    array in seconds, non-decreasing.  Build instances through
    :meth:`from_points` to get ingestion validation (consecutive
    duplicate removal, minimum-length checks).
    """

    xy: np.ndarray
    t: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        xy = np.asarray(self.xy, dtype=float)
        if xy.ndim != 2 or xy.shape[1] != 2:
            raise ValueError(f"xy must be (n, 2), got {xy.shape}")
        object.__setattr__(self, "xy", xy)
        t = self.t
        if t is None:
            t = np.zeros(len(xy))
        t = np.asarray(t, dtype=float)
        if t.shape != (len(xy),):
            raise ValueError("t must have one entry per point")
        object.__setattr__(self, "t", t)

    @classmethod
    def from_points(cls, points: Iterable[StrokePoint | Sequence[float]]) -> "Stroke":
        """Validated ingestion from raw (x, y, t) samples.

        Consecutive duplicate positions are dropped.  Raises
        :class:`DegenerateStroke` if fewer than two distinct points
        remain or the polyline has zero arc length.
        """
        rows = []
        for p in points:
            if isinstance(p, StrokePoint):
                rows.append((p.x, p.y, p.t))
            else:
                seq = tuple(p)
                if len(seq) == 2:
                    rows.append((seq[0], seq[1], 0.0))
                else:
                    rows.append((seq[0], seq[1], seq[2]))
        if len(rows) < 2:
            raise DegenerateStroke(f"need at least 2 points, got {len(rows)}")
        arr = np.asarray(rows, dtype=float)
        keep = np.ones(len(arr), dtype=bool)
        keep[1:] = np.any(np.diff(arr[:, :2], axis=0) != 0.0, axis=1)
        arr = arr[keep]
        if len(arr) < 2:
            raise DegenerateStroke("all points identical")
        stroke = cls(xy=arr[:, :2], t=arr[:, 2])
        if stroke.arc_length() <= 0.0:
            raise DegenerateStroke("zero arc length")
        return stroke

    def __len__(self) -> int:
        return len(self.xy)

    @property
    def points(self) -> list[StrokePoint]:
        return [StrokePoint(x, y, t) for (x, y), t in zip(self.xy, self.t)]

    def segment_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.xy, axis=0), axis=1)

    def arc_length(self) -> float:
        return float(self.segment_lengths().sum())

    def cumulative_arc(self) -> np.ndarray:
        """(n,) arc-length position of each vertex, starting at 0."""
        out = np.zeros(len(self.xy))
        out[1:] = np.cumsum(self.segment_lengths())
        return out

    def translated(self, dx: float, dy: float) -> "Stroke":
        return Stroke(xy=self.xy + np.array([dx, dy]), t=self.t.copy())

    def transformed(self, matrix: np.ndarray, about: np.ndarray | None = None) -> "Stroke":
        """Apply a 2x2 linear map about a pivot (default: the origin)."""
        pivot = np.zeros(2) if about is None else np.asarray(about, dtype=float)
        xy = (self.xy - pivot) @ np.asarray(matrix, dtype=float).T + pivot
        return Stroke(xy=xy, t=self.t.copy())


@dataclass(frozen=True)
class SketchSet:
    """One user sketch: one or more strokes drawn over a single frame."""

    strokes: tuple[Stroke, ...]
    frame_id: str = ""
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "strokes", tuple(self.strokes))

    def all_points(self) -> np.ndarray:
        """(m, 2) concatenation of every stroke's points."""
        if not self.strokes:
            raise EmptySketch("sketch has no strokes")
        return np.concatenate([s.xy for s in self.strokes], axis=0)

    def translated(self, dx: float, dy: float) -> "SketchSet":
        return SketchSet(
            strokes=tuple(s.translated(dx, dy) for s in self.strokes),
            frame_id=self.frame_id,
            label=self.label,
        )


@dataclass(frozen=True)
class PixelBox:
    """Axis-aligned box in pixel coordinates, edges inclusive."""

    min_x: float
    min_y: float
    max_x: float
    max_y: float

    def __post_init__(self):
        if self.max_x < self.min_x or self.max_y < self.min_y:
            raise ValueError(f"inverted box {self}")

    @property
    def width(self) -> float:
        return self.max_x - self.min_x

    @property
    def height(self) -> float:
        return self.max_y - self.min_y

    @property
    def center(self) -> tuple[float, float]:
        return ((self.min_x + self.max_x) / 2.0, (self.min_y + self.max_y) / 2.0)

    def contains(self, x: float, y: float) -> bool:
        return self.min_x <= x <= self.max_x and self.min_y <= y <= self.max_y

    def pixel_range(self, width: int | None = None, height: int | None = None):
        """Integer pixel index ranges covered by the box, both ends
        inclusive: ((x0, x1), (y0, y1)).  A pixel (u, v) is covered when
        min_x <= u <= max_x and likewise for v.  Optionally clipped to a
        frame of the given size."""
        x0 = int(np.ceil(self.min_x))
        x1 = int(np.floor(self.max_x))
        y0 = int(np.ceil(self.min_y))
        y1 = int(np.floor(self.max_y))
        if width is not None:
            x0, x1 = max(x0, 0), min(x1, width - 1)
        if height is not None:
            y0, y1 = max(y0, 0), min(y1, height - 1)
        return (x0, x1), (y0, y1)


@dataclass(frozen=True)
class StrokeFeatures:
    """Scale-aware summary statistics of a single stroke.

    All values are computed on the stroke resampled to
    :data:`RESAMPLE_N` points.
    """

    arc_length: float
    closure_ratio: float     # endpoint distance / arc length
    net_turning: float       # sum of signed turning angles, radians
    radius_cv: float         # std/mean of centroid-to-point distances
    endpoint_vector: tuple[float, float]
    centroid: tuple[float, float]


def resample(stroke: Stroke, n: int = RESAMPLE_N) -> Stroke:
    """Return ``n`` points equally spaced by arc length along the stroke.

    First and last points are preserved exactly; interior points are
    linear interpolations on the original polyline.  Timestamps are
    interpolated on the same arc-length grid.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    arc = stroke.cumulative_arc()
    total = arc[-1]
    if total <= 0.0:
        raise DegenerateStroke("zero arc length")
    targets = np.linspace(0.0, total, n)
    xs = np.interp(targets, arc, stroke.xy[:, 0])
    ys = np.interp(targets, arc, stroke.xy[:, 1])
    ts = np.interp(targets, arc, stroke.t)
    xy = np.column_stack([xs, ys])
    xy[0] = stroke.xy[0]
    xy[-1] = stroke.xy[-1]
    return Stroke(xy=xy, t=ts)


def _wrap_angle(a):
    """Wrap to (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(a), 2.0 * np.pi)


def turning_angles(xy: np.ndarray, min_segment: float = MIN_TURN_SEGMENT) -> np.ndarray:
    """Signed angle change between consecutive segments of a polyline.

    Segments shorter than ``min_segment`` pixels are dropped before the
    angles are taken, so pauses and sensor dither do not register as
    turns.  Returns an array of wrapped angles in (-pi, pi].
    """
    xy = np.asarray(xy, dtype=float)
    deltas = np.diff(xy, axis=0)
    lengths = np.linalg.norm(deltas, axis=1)
    deltas = deltas[lengths > min_segment]
    if len(deltas) < 2:
        return np.zeros(0)
    headings = np.arctan2(deltas[:, 1], deltas[:, 0])
    return _wrap_angle(np.diff(headings))


def stroke_features(stroke: Stroke) -> StrokeFeatures:
    """Summary features of a stroke, computed at the standard resampling."""
    rs = resample(stroke, RESAMPLE_N)
    arc = rs.arc_length()
    endpoint = rs.xy[-1] - rs.xy[0]
    closure = float(np.linalg.norm(endpoint) / arc) if arc > 0 else 0.0
    net_turn = float(turning_angles(rs.xy).sum())
    centroid = rs.xy.mean(axis=0)
    radii = np.linalg.norm(rs.xy - centroid, axis=1)
    mean_r = float(radii.mean())
    radius_cv = float(radii.std() / mean_r) if mean_r > 0 else 0.0
    return StrokeFeatures(
        arc_length=arc,
        closure_ratio=closure,
        net_turning=net_turn,
        radius_cv=radius_cv,
        endpoint_vector=(float(endpoint[0]), float(endpoint[1])),
        centroid=(float(centroid[0]), float(centroid[1])),
    )


def compose_bbox(
    sketch: SketchSet,
    shape=None,
    *,
    arrow_start: tuple[float, float] | None = None,
    arrow_end: tuple[float, float] | None = None,
    frame_size: tuple[int, int] | None = None,
    pad_degenerate: float = 4.0,
) -> PixelBox:
    """Pixel box that downstream object lookup should scan.

    For arrow sketches the box spans exactly the arrow start and end
    points (pass them in); for every other shape it is the min/max over
    all points of all strokes.  A box that is degenerate in either
    dimension is padded by ``pad_degenerate`` pixels per side in that
    dimension so segment lookup never sees an empty region.  When
    ``frame_size`` (width, height) is given the box is clamped to the
    frame.
    """
    from .vocab import SketchShape  # local import keeps module deps one-way

    if shape == SketchShape.ARROW:
        if arrow_start is None or arrow_end is None:
            raise ValueError("arrow boxes need arrow_start and arrow_end")
        pts = np.array([arrow_start, arrow_end], dtype=float)
    else:
        pts = sketch.all_points()
    if pts.size == 0:
        raise EmptySketch("no points to bound")
    min_x, min_y = pts.min(axis=0)
    max_x, max_y = pts.max(axis=0)
    if max_x - min_x == 0.0:
        min_x -= pad_degenerate
        max_x += pad_degenerate
    if max_y - min_y == 0.0:
        min_y -= pad_degenerate
        max_y += pad_degenerate
    if frame_size is not None:
        w, h = frame_size
        min_x = min(max(min_x, 0.0), w - 1.0)
        max_x = min(max(max_x, 0.0), w - 1.0)
        min_y = min(max(min_y, 0.0), h - 1.0)
        max_y = min(max(max_y, 0.0), h - 1.0)
    return PixelBox(float(min_x), float(min_y), float(max_x), float(max_y))


# --- wire serialization ---------------------------------------------------
#
# A sketch crosses the wire as:
#   {"frame_id": str, "label": str | null,
#    "strokes": [[[x, y, t], ...], ...]}


def sketch_to_dict(sketch: SketchSet) -> dict:
    return {
        "frame_id": sketch.frame_id,
        "label": sketch.label,
        "strokes": [
            [[float(x), float(y), float(t)] for (x, y), t in zip(s.xy, s.t)]
            for s in sketch.strokes
        ],
    }


def sketch_from_dict(data: dict) -> SketchSet:
    if not isinstance(data, dict) or "strokes" not in data:
        raise EmptySketch("sketch payload missing 'strokes'")
    raw_strokes = data["strokes"]
    if not isinstance(raw_strokes, list) or not raw_strokes:
        raise EmptySketch("sketch has no strokes")
    strokes = [Stroke.from_points(pts) for pts in raw_strokes]
    label = data.get("label")
    if label is not None:
        label = str(label)
    return SketchSet(
        strokes=tuple(strokes),
        frame_id=str(data.get("frame_id", "")),
        label=label,
    )


def sketch_to_json(sketch: SketchSet) -> str:
    return json.dumps(sketch_to_dict(sketch))


def sketch_from_json(text: str) -> SketchSet:
    return sketch_from_dict(json.loads(text))
