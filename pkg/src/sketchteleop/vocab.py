"""Shared vocabulary for the whole stack.

Sketch shapes, robot tasks, grasp approach directions, and the
task/shape compatibility matrix that both the dataset generator and
the response validator enforce.
"""
from __future__ import annotations

import enum


class SketchShape(enum.Enum):
    CIRCLE = "circle"
    U_SHAPE = "u_shape"
    ARROW = "arrow"
    PATH = "path"
    CIRCLE_AND_ARROW = "circle_and_arrow"


class TaskKind(enum.Enum):
    PICK = "pick"
    PLACE = "place"
    MOVE = "move"
    PULL = "pull"
    PUSH = "push"
    DROP = "drop"
    PICK_AND_PLACE = "pick_and_place"
    ROTATE = "rotate"


class ApproachDirection(enum.Enum):
    """Side of an object the gripper comes in from, in the robot frame."""

    RIGHT = "right"
    LEFT = "left"
    ABOVE = "above"
    FRONT = "front"


#: Which sketch shapes may request which task.  Validation rejects any
#: (task, shape) pair outside this set, and the synthetic dataset
#: generator only emits pairs from it.
COMPATIBLE_PAIRS: frozenset[tuple[TaskKind, SketchShape]] = frozenset({
    (TaskKind.PICK, SketchShape.CIRCLE),
    (TaskKind.PICK, SketchShape.U_SHAPE),
    (TaskKind.PLACE, SketchShape.CIRCLE),
    (TaskKind.PLACE, SketchShape.ARROW),
    (TaskKind.MOVE, SketchShape.ARROW),
    (TaskKind.MOVE, SketchShape.PATH),
    (TaskKind.PULL, SketchShape.CIRCLE),
    (TaskKind.PULL, SketchShape.U_SHAPE),
    (TaskKind.PULL, SketchShape.ARROW),
    (TaskKind.PULL, SketchShape.CIRCLE_AND_ARROW),
    (TaskKind.PUSH, SketchShape.ARROW),
    (TaskKind.PUSH, SketchShape.CIRCLE_AND_ARROW),
    (TaskKind.DROP, SketchShape.ARROW),
    (TaskKind.PICK_AND_PLACE, SketchShape.ARROW),
    (TaskKind.PICK_AND_PLACE, SketchShape.CIRCLE_AND_ARROW),
    (TaskKind.ROTATE, SketchShape.ARROW),
})


def compatible_shapes(task: TaskKind) -> tuple[SketchShape, ...]:
    """Shapes that may request ``task``, in declaration order."""
    return tuple(s for s in SketchShape if (task, s) in COMPATIBLE_PAIRS)


def compatible_tasks(shape: SketchShape) -> tuple[TaskKind, ...]:
    """Tasks that ``shape`` may request, in declaration order."""
    return tuple(t for t in TaskKind if (t, shape) in COMPATIBLE_PAIRS)
