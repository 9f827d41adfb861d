"""Task templates and their tick-level execution.

A plan is a short list of primitives (gripper moves, base driving, grasp
and release events, confirmation pauses).  The executor advances one
primitive at a time at a fixed tick rate against a SimAuthority, so the
same plans run under the live service and the headless scenario runner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.spatial.transform import Rotation, Slerp

from .interpret import InterpretationResult
from .shapes import ShapeParams
from .sim.geom import BasePose, EEPose, orthonormal_from_approach
from .sim.perception import (
    InvalidDepth,
    ObservationFrame,
    backproject,
    detect_object,
    grasp_target,
    path_from_sketch,
    sketch_pixel_box,
)
from .strokes import PixelBox, SketchSet, Stroke
from .vocab import ApproachDirection, TaskKind

__all__ = [
    "BaseFollow",
    "BaseTurn",
    "Executor",
    "Grasp",
    "JoystickAxes",
    "MoveEE",
    "Pause",
    "PlannerConfig",
    "PlanningError",
    "Release",
    "RotateWrist",
    "TaskOutcome",
    "TaskPlan",
    "apply_joystick",
    "execute",
    "greedy_ee_trajectory",
    "plan_task",
    "quantize_wrist_request",
]


class PlanningError(ValueError):
    """The interpretation cannot be grounded in the current scene."""


@dataclass(frozen=True)
class PlannerConfig:
    ee_step: float = 0.05
    standoff: float = 0.10
    lift: float = 0.15
    place_hover: float = 0.12
    drop_hover: float = 0.25
    push_clamp: float = 0.30
    pull_clamp: float = 0.30
    tick_hz: int = 20
    drive_speed: float = 0.2
    turn_gain: float = 2.5
    turn_rate_max: float = 1.2
    heading_tol: float = 0.1
    reach_tol: float = 0.05
    stuck_timeout: float = 5.0
    wrist_steps: int = 8
    joystick_gain: float = 0.05  # meters per second per unit deflection


DEFAULT_PLANNER = PlannerConfig()


# --------------------------------------------------------------------------
# primitives


@dataclass(frozen=True, eq=False)
class MoveEE:
    target: EEPose


@dataclass(frozen=True)
class Pause:
    message: str = "confirm to continue"


@dataclass(frozen=True)
class Grasp:
    pass


@dataclass(frozen=True)
class Release:
    pass


@dataclass(frozen=True)
class BaseTurn:
    heading: float


@dataclass(frozen=True, eq=False)
class BaseFollow:
    waypoints: np.ndarray  # (n, 2) or (n, 3) floor points


@dataclass(frozen=True)
class RotateWrist:
    angle: float
    steps: int = 8


Primitive = Union[MoveEE, Pause, Grasp, Release, BaseTurn, BaseFollow, RotateWrist]


@dataclass(frozen=True, eq=False)
class TaskPlan:
    task: TaskKind
    primitives: tuple[Primitive, ...]
    target_object: int | None = None


@dataclass(frozen=True)
class TaskOutcome:
    success: bool
    reason: str
    ticks: int
    sim_time_s: float


# --------------------------------------------------------------------------
# gripper trajectory


def greedy_ee_trajectory(start: EEPose, goal: EEPose, step: float = 0.05) -> list[EEPose]:
    """Straight-line waypoints from start to goal, none farther than ``step``.

    Rotation is interpolated along the same fractions; the final waypoint
    is the goal pose exactly, not an interpolant.
    """
    dist = float(np.linalg.norm(goal.position - start.position))
    n = max(1, math.ceil(dist / step))
    rotations = Rotation.from_matrix(np.stack([start.rotation, goal.rotation]))
    slerp = Slerp([0.0, 1.0], rotations)
    waypoints: list[EEPose] = []
    for i in range(1, n):
        t = i / n
        position = start.position + t * (goal.position - start.position)
        waypoints.append(EEPose(position, slerp(t).as_matrix()))
    waypoints.append(goal)
    return waypoints


def quantize_wrist_request(sweep: float) -> float:
    """Snap a drawn arc to a quarter or half turn of the wrist.

    The sketch sweep is positive clockwise on screen; the wrist request is
    its negation, then snapped to the nearer of a 90 or 180 degree turn.
    """
    request = -sweep
    if request == 0.0:
        return math.pi / 2
    magnitude = math.pi / 2 if abs(request) < 3 * math.pi / 4 else math.pi
    return math.copysign(magnitude, request)


# --------------------------------------------------------------------------
# plan templates


def _fingers_down() -> np.ndarray:
    return orthonormal_from_approach([0.0, 0.0, -1.0])


def _point_box(u: float, v: float, pad: float = 8.0) -> PixelBox:
    return PixelBox(u - pad, v - pad, u + pad, v + pad)


def _circle_box(center, radius: float) -> PixelBox:
    r = max(float(radius), 4.0)
    return PixelBox(center[0] - r, center[1] - r, center[0] + r, center[1] + r)


def _detection_box(result, params: ShapeParams, sketch: SketchSet | None) -> PixelBox:
    if params.composite is not None:
        circle = params.composite.circle
        return _circle_box(circle.center, circle.radius)
    if params.circle is not None:
        return _circle_box(params.circle.center, params.circle.radius)
    if params.arrow is not None:
        return _point_box(*params.arrow.start)
    if sketch is not None:
        return sketch_pixel_box(sketch)
    raise PlanningError(f"cannot locate a target for {result.task.value} without a sketch")


def _approach_for(params: ShapeParams) -> ApproachDirection:
    if params.u_shape is not None:
        return params.u_shape.opening
    return ApproachDirection.ABOVE


def _world_arrow(frame: ObservationFrame, params: ShapeParams):
    """Ground the drawn arrow: world start, end, and horizontal direction."""
    arrow = params.arrow if params.arrow is not None else (
        params.composite.arrow if params.composite is not None else None
    )
    if arrow is None:
        return None
    try:
        a = backproject(frame, *arrow.start)
        b = backproject(frame, *arrow.end)
    except InvalidDepth:
        return None
    flat = np.array([b[0] - a[0], b[1] - a[1], 0.0])
    norm = float(np.linalg.norm(flat))
    if norm < 1e-9:
        return None
    return a, b, flat / norm, norm


def _arrow_tip_world(frame: ObservationFrame, params: ShapeParams) -> np.ndarray:
    arrow = params.arrow if params.arrow is not None else (
        params.composite.arrow if params.composite is not None else None
    )
    if arrow is None:
        raise PlanningError("this task needs an arrow tip to aim for")
    return backproject(frame, *arrow.end)


def plan_task(
    result: InterpretationResult,
    params: ShapeParams,
    frame: ObservationFrame,
    authority,
    *,
    sketch: SketchSet | None = None,
    config: PlannerConfig = DEFAULT_PLANNER,
) -> TaskPlan:
    """Ground one interpreted task into primitives against the live scene.

    Raises PlanningError (or a perception error) when the sketch does not
    pin down a target in this frame.
    """
    task = result.task
    base: BasePose = authority.base

    if task is TaskKind.PICK:
        target = detect_object(frame, _detection_box(result, params, sketch),
                               among=frame.graspable_ids)
        approach = _approach_for(params)
        grasp = grasp_target(
            authority.object_for(target), approach, base, standoff=config.standoff
        )
        lift = grasp.grasp.with_position(grasp.grasp.position + [0.0, 0.0, config.lift])
        steps: list[Primitive] = []
        if approach is not ApproachDirection.ABOVE:
            # come down over the pre-grasp spot first, so the approach into
            # the object happens along the fingers and never sideswipes it
            stage = grasp.pregrasp.position.copy()
            stage[2] = grasp.grasp.position[2] + 0.25
            steps.append(MoveEE(grasp.pregrasp.with_position(stage)))
        steps += [
            MoveEE(grasp.pregrasp),
            Pause("confirm grasp"),
            MoveEE(grasp.grasp),
            Grasp(),
            MoveEE(lift),
        ]
        return TaskPlan(task, tuple(steps), target_object=target)

    if task is TaskKind.PLACE:
        if params.arrow is not None:
            spot = _arrow_tip_world(frame, params)
        elif params.circle is not None:
            spot = backproject(frame, *params.circle.center)
        else:
            raise PlanningError("place needs an arrow tip or a circled spot")
        hover = EEPose(spot + [0.0, 0.0, config.place_hover], _fingers_down())
        return TaskPlan(task, (MoveEE(hover), Pause("confirm place"), Release()))

    if task is TaskKind.DROP:
        spot = _arrow_tip_world(frame, params)
        hover = EEPose(spot + [0.0, 0.0, config.drop_hover], _fingers_down())
        return TaskPlan(task, (MoveEE(hover), Pause("confirm drop"), Release()))

    if task is TaskKind.MOVE:
        route_sketch = sketch
        if route_sketch is None:
            if params.path is None and params.arrow is None:
                raise PlanningError("move needs a sketched route")
            polyline = params.path.polyline if params.path is not None else np.stack(
                [params.arrow.start, params.arrow.end]
            )
            route_sketch = SketchSet(strokes=(Stroke.from_points(polyline),))
        waypoints = path_from_sketch(frame, route_sketch)
        first = waypoints[0]
        heading = math.atan2(first[1] - base.y, first[0] - base.x)
        return TaskPlan(task, (BaseTurn(heading), BaseFollow(waypoints[:, :2])))

    if task is TaskKind.PULL:
        target = detect_object(frame, _detection_box(result, params, sketch),
                               among=frame.graspable_ids)
        obj = authority.object_for(target)
        grasp = grasp_target(obj, ApproachDirection.ABOVE, base, standoff=config.standoff)
        grounded = _world_arrow(frame, params)
        if grounded is not None:
            _, _, direction, length = grounded
            distance = min(length, config.pull_clamp)
        else:
            toward = base.position() - np.asarray(obj.center)
            toward[2] = 0.0
            norm = float(np.linalg.norm(toward))
            direction = toward / norm if norm > 1e-9 else np.array([-1.0, 0.0, 0.0])
            distance = config.pull_clamp * 0.8
        dragged = grasp.grasp.with_position(grasp.grasp.position + direction * distance)
        return TaskPlan(
            task,
            (MoveEE(grasp.pregrasp), MoveEE(grasp.grasp), Grasp(), MoveEE(dragged), Release()),
            target_object=target,
        )

    if task is TaskKind.PUSH:
        target = detect_object(frame, _detection_box(result, params, sketch),
                               among=frame.graspable_ids)
        obj = authority.object_for(target)
        grounded = _world_arrow(frame, params)
        if grounded is None:
            raise PlanningError("push needs an arrow grounded on the floor or a surface")
        _, _, direction, length = grounded
        center = np.asarray(obj.center, dtype=float)
        reach = float(np.dot(obj.half_extents(), np.abs(direction)))
        behind = center - direction * (reach + config.standoff)
        travel = config.standoff + reach + min(length, config.push_clamp)
        swept = behind + direction * travel
        hover = behind + [0.0, 0.0, 0.25]
        rot = _fingers_down()
        return TaskPlan(
            task,
            (MoveEE(EEPose(hover, rot)), MoveEE(EEPose(behind, rot)), MoveEE(EEPose(swept, rot))),
            target_object=target,
        )

    if task is TaskKind.PICK_AND_PLACE:
        target = detect_object(frame, _detection_box(result, params, sketch),
                               among=frame.graspable_ids)
        spot = _arrow_tip_world(frame, params)
        grasp = grasp_target(
            authority.object_for(target), ApproachDirection.ABOVE, base, standoff=config.standoff
        )
        lift = grasp.grasp.with_position(grasp.grasp.position + [0.0, 0.0, config.lift])
        hover = EEPose(spot + [0.0, 0.0, config.place_hover], _fingers_down())
        return TaskPlan(
            task,
            (
                MoveEE(grasp.pregrasp),
                MoveEE(grasp.grasp),
                Grasp(),
                MoveEE(lift),
                MoveEE(hover),
                Release(),
            ),
            target_object=target,
        )

    if task is TaskKind.ROTATE:
        if params.arrow is None:
            raise PlanningError("rotate needs an arrow to read the turn from")
        angle = quantize_wrist_request(params.arrow.sweep)
        return TaskPlan(
            task, (Pause("confirm rotate"), RotateWrist(angle, steps=config.wrist_steps))
        )

    raise PlanningError(f"no template for task {task.value!r}")  # pragma: no cover


# --------------------------------------------------------------------------
# execution


@dataclass(frozen=True)
class JoystickAxes:
    left_y: float = 0.0
    right_x: float = 0.0
    right_y: float = 0.0


def apply_joystick(
    authority, axes: JoystickAxes, dt: float, config: PlannerConfig = DEFAULT_PLANNER
) -> None:
    """Jog the gripper in camera axes: forward/back, left/right, up/down."""
    pose = authority.camera.pose_in_world(authority.base)
    motion = (
        axes.left_y * pose[:3, 2]
        + axes.right_x * pose[:3, 0]
        - axes.right_y * pose[:3, 1]
    )
    ee = authority.ee_pose
    authority.set_ee_pose(ee.with_position(ee.position + config.joystick_gain * dt * motion))


def _wrap_angle(a: float) -> float:
    return float((a + math.pi) % (2.0 * math.pi) - math.pi)


class Executor:
    """Advances a plan one tick at a time against an authority.

    States reported by tick(): "running", "awaiting_feedback", "done",
    "failed".  A Pause primitive parks the executor until resume().
    """

    def __init__(self, authority, plan: TaskPlan, config: PlannerConfig = DEFAULT_PLANNER):
        self.authority = authority
        self.plan = plan
        self.config = config
        self.dt = 1.0 / config.tick_hz
        self.ticks = 0
        self.outcome: TaskOutcome | None = None
        self.pause_message: str | None = None
        self._index = 0
        self._trajectory: list[EEPose] | None = None
        self._follow_cursor = 0
        self._last_progress_time: float | None = None
        self._follow_best_dist: float | None = None
        self._wrist_done = 0

    @property
    def awaiting_feedback(self) -> bool:
        return self.pause_message is not None

    def resume(self) -> None:
        if self.pause_message is not None:
            self.pause_message = None
            self._index += 1

    def _finish(self, success: bool, reason: str) -> str:
        self.authority.set_base_twist(0.0, 0.0)
        self.outcome = TaskOutcome(success, reason, self.ticks, self.ticks * self.dt)
        return "done" if success else "failed"

    def tick(self) -> str:
        if self.outcome is not None:
            return "done" if self.outcome.success else "failed"
        self.ticks += 1
        status = self._advance()
        self.authority.step(self.dt)
        return status

    def _advance(self) -> str:
        if self._index >= len(self.plan.primitives):
            return self._finish(True, "plan complete")
        prim = self.plan.primitives[self._index]

        if isinstance(prim, Pause):
            self.pause_message = prim.message
            return "awaiting_feedback"

        if isinstance(prim, MoveEE):
            if self._trajectory is None:
                self._trajectory = greedy_ee_trajectory(
                    self.authority.ee_pose, prim.target, self.config.ee_step
                )
            self.authority.set_ee_pose(self._trajectory.pop(0))
            if not self._trajectory:
                self._trajectory = None
                self._index += 1
            return "running"

        if isinstance(prim, Grasp):
            if not self.authority.grasp():
                return self._finish(False, "grasp_missed")
            self._index += 1
            return "running"

        if isinstance(prim, Release):
            self.authority.release()
            self._index += 1
            return "running"

        if isinstance(prim, BaseTurn):
            err = _wrap_angle(prim.heading - self.authority.base.yaw)
            if abs(err) < self.config.heading_tol:
                self.authority.set_base_twist(0.0, 0.0)
                self._index += 1
                return "running"
            rate = float(np.clip(self.config.turn_gain * err, -self.config.turn_rate_max,
                                 self.config.turn_rate_max))
            self.authority.set_base_twist(0.0, rate)
            return "running"

        if isinstance(prim, BaseFollow):
            return self._follow_tick(prim)

        if isinstance(prim, RotateWrist):
            self.authority.rotate_wrist(prim.angle / prim.steps)
            self._wrist_done += 1
            if self._wrist_done >= prim.steps:
                self._wrist_done = 0
                self._index += 1
            return "running"

        return self._finish(False, f"unknown primitive {type(prim).__name__}")

    def _follow_tick(self, prim: BaseFollow) -> str:
        base = self.authority.base
        now = self.authority.time_s
        if self._last_progress_time is None:
            self._last_progress_time = now
        waypoints = np.asarray(prim.waypoints, dtype=float)
        while self._follow_cursor < len(waypoints):
            wp = waypoints[self._follow_cursor]
            dx, dy = wp[0] - base.x, wp[1] - base.y
            if math.hypot(dx, dy) < self.config.reach_tol:
                self._follow_cursor += 1
                self._last_progress_time = now
                self._follow_best_dist = None
                continue
            break
        if self._follow_cursor >= len(waypoints):
            self.authority.set_base_twist(0.0, 0.0)
            self._follow_cursor = 0
            self._last_progress_time = None
            self._follow_best_dist = None
            self._index += 1
            return "running"
        # Progress means closing in on the current waypoint, not reaching it;
        # the first leg of a route can easily be longer than the stuck window
        # allows at cruise speed.
        wp = waypoints[self._follow_cursor]
        dist = math.hypot(wp[0] - base.x, wp[1] - base.y)
        if self._follow_best_dist is None or dist < self._follow_best_dist - 0.01:
            self._follow_best_dist = dist
            self._last_progress_time = now
        if now - self._last_progress_time > self.config.stuck_timeout:
            return self._finish(False, "stuck")
        err = _wrap_angle(math.atan2(wp[1] - base.y, wp[0] - base.x) - base.yaw)
        rate = float(np.clip(self.config.turn_gain * err, -self.config.turn_rate_max,
                             self.config.turn_rate_max))
        speed = self.config.drive_speed if abs(err) <= self.config.heading_tol else 0.0
        self.authority.set_base_twist(speed, rate)
        return "running"


def execute(
    authority,
    plan: TaskPlan,
    *,
    auto_confirm: bool = True,
    max_sim_time_s: float = 60.0,
    config: PlannerConfig = DEFAULT_PLANNER,
) -> TaskOutcome:
    """Run a plan to completion; pauses self-confirm when auto_confirm."""
    executor = Executor(authority, plan, config)
    max_ticks = int(max_sim_time_s * config.tick_hz)
    while executor.ticks < max_ticks:
        status = executor.tick()
        if status == "awaiting_feedback":
            if not auto_confirm:
                raise RuntimeError("plan paused but auto_confirm is off")
            executor.resume()
            continue
        if status in ("done", "failed"):
            return executor.outcome
    executor.authority.set_base_twist(0.0, 0.0)
    return TaskOutcome(False, "timeout", executor.ticks, executor.ticks * executor.dt)
