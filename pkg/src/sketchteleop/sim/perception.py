"""Reading the rendered maps: object lookup, backprojection, floor paths.

Everything here works from one ObservationFrame; nothing reaches into the
scene except :func:`grasp_target`, which needs the target's bounding box.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..interpret import ArrowProbe
from ..shapes import ArrowGeometry
from ..strokes import PixelBox, SketchSet
from ..vocab import ApproachDirection
from .camera import CameraIntrinsics, backproject_pixel
from .geom import BasePose, EEPose, orthonormal_from_approach, rotz
from .scene import SceneObject

__all__ = [
    "GraspTarget",
    "InvalidDepth",
    "NoObjectFound",
    "ObservationFrame",
    "PathOffFloor",
    "PathTooShort",
    "arrow_probe",
    "backproject",
    "detect_object",
    "grasp_target",
    "path_from_sketch",
    "sketch_pixel_box",
]


class NoObjectFound(Exception):
    """The queried image region contains only floor or sky."""


class InvalidDepth(Exception):
    """The pixel has no surface behind it (or lies outside the image)."""


class PathOffFloor(Exception):
    """Too much of the sketched route leaves the ground."""


class PathTooShort(Exception):
    """After snapping to the floor the route has fewer than two waypoints."""


@dataclass(frozen=True, eq=False)
class ObservationFrame:
    """One camera observation plus the pose that produced it."""

    rgb: np.ndarray
    depth: np.ndarray
    instances: np.ndarray
    camera_pose: np.ndarray
    intrinsics: CameraIntrinsics
    frame_id: str = ""
    graspable_ids: frozenset[int] = frozenset()
    support_ids: frozenset[int] = frozenset()

    @property
    def width(self) -> int:
        return int(self.instances.shape[1])

    @property
    def height(self) -> int:
        return int(self.instances.shape[0])

    def _at(self, u: float, v: float) -> tuple[int, float]:
        """(instance id, depth) at the rounded pixel; (0, 0.0) off-image."""
        col, row = int(round(u)), int(round(v))
        if not (0 <= col < self.width and 0 <= row < self.height):
            return 0, 0.0
        return int(self.instances[row, col]), float(self.depth[row, col])


def sketch_pixel_box(sketch: SketchSet) -> PixelBox:
    pts = sketch.all_points()
    return PixelBox(
        float(pts[:, 0].min()), float(pts[:, 1].min()),
        float(pts[:, 0].max()), float(pts[:, 1].max()),
    )


def detect_object(
    frame: ObservationFrame, box: PixelBox, *, among: frozenset[int] | None = None
) -> int:
    """Most common non-background instance inside the box, smallest id on ties.

    With ``among``, only those instance ids take part in the vote.  A sketch
    that asks for something to manipulate should vote among the graspable
    ids, otherwise a small object sitting on a large surface loses to the
    surface it sits on.
    """
    (x0, x1), (y0, y1) = box.pixel_range(frame.width, frame.height)
    if x0 > x1 or y0 > y1:
        raise NoObjectFound("query box covers no pixels")
    window = frame.instances[y0 : y1 + 1, x0 : x1 + 1]
    counts = np.bincount(window.ravel())
    counts[0] = 0
    if among is not None:
        keep = [i for i in among if 0 < i < len(counts)]
        kept = np.zeros_like(counts)
        kept[keep] = counts[keep]
        counts = kept
    if counts.sum() == 0:
        raise NoObjectFound("query box holds nothing that can be picked out")
    return int(counts.argmax())


def backproject(frame: ObservationFrame, u: float, v: float) -> np.ndarray:
    """World point under pixel (u, v), using the depth at the rounded pixel."""
    _, d = frame._at(u, v)
    if d <= 0.0:
        raise InvalidDepth(f"no depth at pixel ({u:.1f}, {v:.1f})")
    return backproject_pixel(u, v, d, frame.camera_pose, frame.intrinsics)


def path_from_sketch(
    frame: ObservationFrame,
    sketch: SketchSet,
    *,
    min_spacing: float = 0.10,
    min_floor_fraction: float = 0.5,
) -> np.ndarray:
    """Project a sketched route onto the floor and thin it to waypoints.

    Points must mostly land on the ground (instance 0 with real depth);
    the survivors are pinned to z = 0 and thinned so consecutive waypoints
    sit at least ``min_spacing`` meters apart.
    """
    points = sketch.all_points()
    floor_world: list[np.ndarray] = []
    on_floor = 0
    for u, v in points[:, :2]:
        inst, d = frame._at(float(u), float(v))
        if inst == 0 and d > 0.0:
            on_floor += 1
            world = backproject_pixel(float(u), float(v), d, frame.camera_pose, frame.intrinsics)
            world[2] = 0.0
            floor_world.append(world)
    if on_floor < min_floor_fraction * len(points):
        raise PathOffFloor(
            f"only {on_floor}/{len(points)} sketch points touch the floor"
        )
    kept: list[np.ndarray] = []
    for world in floor_world:
        if not kept or np.hypot(*(world[:2] - kept[-1][:2])) >= min_spacing:
            kept.append(world)
    if len(kept) < 2:
        raise PathTooShort(f"route thinned to {len(kept)} waypoint(s)")
    return np.asarray(kept)


def arrow_probe(
    frame: ObservationFrame, arrow: ArrowGeometry, *, far_distance: float = 0.6
) -> ArrowProbe:
    """Collect the scene facts the rule table needs about an arrow.

    ``end_far_on_support`` means the tip lands somewhere an object could
    be set down (a support surface or open floor) at least ``far_distance``
    meters of ground distance from the tail.
    """
    su, sv = float(arrow.start[0]), float(arrow.start[1])
    eu, ev = float(arrow.end[0]), float(arrow.end[1])
    start_id, start_d = frame._at(su, sv)
    end_id, end_d = frame._at(eu, ev)

    start_on_object = start_id in frame.graspable_ids
    end_on_object = end_id in frame.graspable_ids

    placeable = end_id in frame.support_ids or end_id == 0
    far = False
    if placeable and start_d > 0.0 and end_d > 0.0:
        a = backproject_pixel(su, sv, start_d, frame.camera_pose, frame.intrinsics)
        b = backproject_pixel(eu, ev, end_d, frame.camera_pose, frame.intrinsics)
        far = float(np.hypot(*(b[:2] - a[:2]))) >= far_distance

    return ArrowProbe(
        start_on_object=start_on_object,
        end_on_object=end_on_object,
        end_image_dy=ev - sv,
        end_far_on_support=far and not end_on_object,
    )


@dataclass(frozen=True, eq=False)
class GraspTarget:
    """Pre-grasp and grasp poses for one object from one approach side."""

    pregrasp: EEPose
    grasp: EEPose
    outward: np.ndarray  # unit vector from the object toward the approach side


def _outward_vector(direction: ApproachDirection, obj_center, base: BasePose) -> np.ndarray:
    if direction is ApproachDirection.ABOVE:
        return np.array([0.0, 0.0, 1.0])
    toward = np.asarray(obj_center, dtype=float) - base.position()
    toward[2] = 0.0
    norm = np.linalg.norm(toward)
    toward = toward / norm if norm > 1e-9 else np.array([1.0, 0.0, 0.0])
    if direction is ApproachDirection.FRONT:
        return -toward
    right = rotz(base.yaw) @ np.array([0.0, -1.0, 0.0])
    return right if direction is ApproachDirection.RIGHT else -right


def grasp_target(
    obj: SceneObject,
    direction: ApproachDirection,
    base: BasePose,
    *,
    standoff: float = 0.10,
) -> GraspTarget:
    """Build grasp poses against the object's bounding box.

    The outward direction snaps to the box axis it mostly points along, so
    the pre-grasp sits over a face center, ``standoff`` meters out.  The
    grasp pose itself is at the object center with the fingers pointing
    back along the approach.
    """
    center = np.asarray(obj.center, dtype=float)
    half = obj.half_extents()
    d = _outward_vector(direction, center, base)
    axis = int(np.argmax(np.abs(d)))
    outward = np.zeros(3)
    outward[axis] = np.sign(d[axis]) if d[axis] != 0 else 1.0
    face_center = center + outward * half[axis]
    rotation = orthonormal_from_approach(-outward, hint=base.forward())
    pregrasp = EEPose(face_center + outward * standoff, rotation)
    grasp = EEPose(center, rotation)
    return GraspTarget(pregrasp=pregrasp, grasp=grasp, outward=outward)
