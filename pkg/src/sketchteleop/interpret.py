"""Turn a classified sketch plus robot state into a task request.

Two backends produce the same result type: a local rule table keyed on the
sketch shape, and a remote vision-language endpoint that reads the sketch
drawn over the camera image (see :mod:`sketchteleop.remote`).  Both answer
with a task name and a shape name, and both are checked against the
task/shape compatibility table before anything downstream runs.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources

import numpy as np

from .strokes import SketchSet
from .vocab import COMPATIBLE_PAIRS, SketchShape, TaskKind

__all__ = [
    "ArrowProbe",
    "ConstraintState",
    "FrameMismatch",
    "HoldingConflict",
    "IncompatiblePair",
    "InterpretationResult",
    "InterpretationSource",
    "NoJsonFound",
    "ParseError",
    "PromptBundle",
    "TaskCatalog",
    "UnknownShape",
    "UnknownTask",
    "compose_prompt",
    "constraint_text",
    "default_catalog",
    "interpret_rule_based",
    "overlay",
    "parse_response",
    "result_to_json",
]


# --------------------------------------------------------------------------
# robot-state constraint


@dataclass(frozen=True)
class ConstraintState:
    """What the gripper is doing right now.

    holding:     whether the gripper currently holds something.
    held_object: instance id of the held object, or None.  Must be None
                 exactly when holding is False.
    """

    holding: bool
    held_object: int | None = None

    def __post_init__(self) -> None:
        if self.holding and self.held_object is None:
            raise ValueError("holding is True but held_object is None")
        if not self.holding and self.held_object is not None:
            raise ValueError("held_object set while holding is False")


_HOLDING_TEXT = "The robot is holding an object."
_EMPTY_TEXT = "The robot is not holding an object."


def constraint_text(state: ConstraintState) -> str:
    """One-sentence gripper status for the prompt, fixed wording."""
    return _HOLDING_TEXT if state.holding else _EMPTY_TEXT


# --------------------------------------------------------------------------
# task catalog and prompt composition


@dataclass(frozen=True)
class TaskCatalog:
    """Ordered task names with one-line descriptions for the prompt."""

    entries: tuple[tuple[TaskKind, str], ...]

    def lines(self) -> str:
        return "\n".join(f"- {task.value}: {desc}" for task, desc in self.entries)

    def names(self) -> tuple[str, ...]:
        return tuple(task.value for task, _ in self.entries)


_DEFAULT_ENTRIES: tuple[tuple[TaskKind, str], ...] = (
    (TaskKind.PICK, "grasp the indicated object and lift it"),
    (TaskKind.PLACE, "set the held object down at the indicated spot"),
    (TaskKind.MOVE, "drive the base along the indicated route"),
    (TaskKind.PULL, "grasp the indicated object and drag it toward the robot"),
    (TaskKind.PUSH, "press against the indicated object to slide it away"),
    (TaskKind.DROP, "open the gripper above the indicated spot so the held object falls"),
    (
        TaskKind.PICK_AND_PLACE,
        "grasp the indicated object, carry it, and set it down at the target",
    ),
    (TaskKind.ROTATE, "turn the held object by the sketched amount"),
)

_SHAPE_DESCRIPTIONS: tuple[tuple[SketchShape, str], ...] = (
    (SketchShape.CIRCLE, "a closed loop drawn around one object or spot"),
    (SketchShape.U_SHAPE, "an open curve that hugs an object from one side"),
    (SketchShape.ARROW, "a line with an arrowhead at one end"),
    (SketchShape.PATH, "a free line tracing a route, with no arrowhead"),
    (
        SketchShape.CIRCLE_AND_ARROW,
        "a closed loop around an object plus an arrow giving a direction",
    ),
)


def default_catalog() -> TaskCatalog:
    return TaskCatalog(_DEFAULT_ENTRIES)


@dataclass(frozen=True)
class PromptBundle:
    """The four prompt sections sent to the remote interpreter.

    system_text carries the task and shape vocabulary; examples_text is
    empty in zero-shot mode; request_text asks the actual question;
    dynamic_text holds the per-call robot state and the output format.
    """

    system_text: str
    examples_text: str
    request_text: str
    dynamic_text: str

    def full_text(self) -> str:
        parts = [self.system_text, self.examples_text, self.request_text, self.dynamic_text]
        return "\n\n".join(p.strip() for p in parts if p.strip())


def _prompt_file(name: str) -> str:
    return resources.files("sketchteleop").joinpath("prompts", name).read_text(encoding="utf-8")


def compose_prompt(
    state: ConstraintState,
    *,
    catalog: TaskCatalog | None = None,
    few_shot: bool = False,
) -> PromptBundle:
    """Assemble the prompt sections for one interpretation call.

    Zero-shot by default; ``few_shot=True`` adds worked examples covering
    every sketch shape.
    """
    catalog = catalog or default_catalog()
    shape_lines = "\n".join(f"- {shape.value}: {desc}" for shape, desc in _SHAPE_DESCRIPTIONS)
    system_text = _prompt_file("system.txt").format(
        task_lines=catalog.lines(), shape_lines=shape_lines
    )
    examples_text = _prompt_file("examples.txt") if few_shot else ""
    request_text = _prompt_file("request.txt")
    dynamic_text = _prompt_file("dynamic.txt").format(constraint=constraint_text(state))
    return PromptBundle(system_text, examples_text, request_text, dynamic_text)


# --------------------------------------------------------------------------
# response parsing


class ParseError(ValueError):
    """A remote reply that could not be turned into a valid result."""

    def __init__(self, message: str, raw: str):
        super().__init__(message)
        self.raw = raw


class NoJsonFound(ParseError):
    pass


class UnknownTask(ParseError):
    pass


class UnknownShape(ParseError):
    pass


class IncompatiblePair(ParseError):
    pass


class HoldingConflict(Exception):
    """The sketch asks for something the gripper state rules out."""


class InterpretationSource(Enum):
    RULE_BASED = "rule_based"
    REMOTE = "remote"


@dataclass(frozen=True)
class InterpretationResult:
    task: TaskKind
    shape: SketchShape
    source: InterpretationSource
    raw_text: str = ""


def _normalise(token: str) -> str:
    return re.sub(r"[\s\-&]+", "_", token.strip().lower())


_TASK_SYNONYMS: dict[str, TaskKind] = {
    "pick": TaskKind.PICK,
    "pick_up": TaskKind.PICK,
    "grasp": TaskKind.PICK,
    "grab": TaskKind.PICK,
    "place": TaskKind.PLACE,
    "put": TaskKind.PLACE,
    "put_down": TaskKind.PLACE,
    "set_down": TaskKind.PLACE,
    "move": TaskKind.MOVE,
    "go": TaskKind.MOVE,
    "go_to": TaskKind.MOVE,
    "navigate": TaskKind.MOVE,
    "drive": TaskKind.MOVE,
    "pull": TaskKind.PULL,
    "drag": TaskKind.PULL,
    "push": TaskKind.PUSH,
    "press": TaskKind.PUSH,
    "shove": TaskKind.PUSH,
    "drop": TaskKind.DROP,
    "release": TaskKind.DROP,
    "let_go": TaskKind.DROP,
    "pick_and_place": TaskKind.PICK_AND_PLACE,
    "pick_place": TaskKind.PICK_AND_PLACE,
    "pickandplace": TaskKind.PICK_AND_PLACE,
    "pick_then_place": TaskKind.PICK_AND_PLACE,
    "rotate": TaskKind.ROTATE,
    "turn": TaskKind.ROTATE,
    "spin": TaskKind.ROTATE,
    "twist": TaskKind.ROTATE,
}

_SHAPE_SYNONYMS: dict[str, SketchShape] = {
    "circle": SketchShape.CIRCLE,
    "ring": SketchShape.CIRCLE,
    "ellipse": SketchShape.CIRCLE,
    "loop": SketchShape.CIRCLE,
    "oval": SketchShape.CIRCLE,
    "u_shape": SketchShape.U_SHAPE,
    "u": SketchShape.U_SHAPE,
    "ushape": SketchShape.U_SHAPE,
    "u_shaped": SketchShape.U_SHAPE,
    "u_shaped_line": SketchShape.U_SHAPE,
    "semicircle": SketchShape.U_SHAPE,
    "half_circle": SketchShape.U_SHAPE,
    "hook": SketchShape.U_SHAPE,
    "arrow": SketchShape.ARROW,
    "arrow_line": SketchShape.ARROW,
    "path": SketchShape.PATH,
    "line": SketchShape.PATH,
    "curve": SketchShape.PATH,
    "route": SketchShape.PATH,
    "trajectory": SketchShape.PATH,
    "polyline": SketchShape.PATH,
    "squiggle": SketchShape.PATH,
    "scribble": SketchShape.PATH,
    "freeform_line": SketchShape.PATH,
    "circle_and_arrow": SketchShape.CIRCLE_AND_ARROW,
    "circle_arrow": SketchShape.CIRCLE_AND_ARROW,
    "circle_with_arrow": SketchShape.CIRCLE_AND_ARROW,
    "circleandarrow": SketchShape.CIRCLE_AND_ARROW,
    "ring_and_arrow": SketchShape.CIRCLE_AND_ARROW,
    "ring_with_arrow": SketchShape.CIRCLE_AND_ARROW,
}


def _first_json_object(raw: str) -> dict | None:
    """Scan for the first decodable JSON object anywhere in the text."""
    decoder = json.JSONDecoder()
    for start in range(len(raw)):
        if raw[start] != "{":
            continue
        try:
            obj, _ = decoder.raw_decode(raw, start)
        except json.JSONDecodeError:
            continue
        if isinstance(obj, dict):
            return obj
    return None


def validate_pair(task: TaskKind, shape: SketchShape, raw: str = "") -> None:
    if (task, shape) not in COMPATIBLE_PAIRS:
        raise IncompatiblePair(
            f"task {task.value!r} cannot be requested with shape {shape.value!r}", raw
        )


def parse_response(
    raw: str, source: InterpretationSource = InterpretationSource.REMOTE
) -> InterpretationResult:
    """Extract the first JSON object from a reply and validate it.

    Tolerates code fences, surrounding prose, and common synonyms for the
    task and shape names.  Raises a :class:`ParseError` subclass otherwise.
    """
    obj = _first_json_object(raw)
    if obj is None:
        raise NoJsonFound("no JSON object in reply", raw)
    lowered = {str(k).strip().lower(): v for k, v in obj.items()}
    task_token = lowered.get("task")
    shape_token = lowered.get("sketch_shape", lowered.get("shape"))
    if not isinstance(task_token, str) or not task_token.strip():
        raise UnknownTask("reply is missing a task name", raw)
    if not isinstance(shape_token, str) or not shape_token.strip():
        raise UnknownShape("reply is missing a sketch shape", raw)
    task = _TASK_SYNONYMS.get(_normalise(task_token))
    if task is None:
        raise UnknownTask(f"unrecognised task name {task_token!r}", raw)
    shape = _SHAPE_SYNONYMS.get(_normalise(shape_token))
    if shape is None:
        raise UnknownShape(f"unrecognised sketch shape {shape_token!r}", raw)
    validate_pair(task, shape, raw)
    return InterpretationResult(task, shape, source, raw_text=raw)


def result_to_json(result: InterpretationResult) -> str:
    return json.dumps({"task": result.task.value, "sketch_shape": result.shape.value})


# --------------------------------------------------------------------------
# sketch-over-image composition for the remote call


class FrameMismatch(ValueError):
    """Sketch and camera frame carry different frame ids."""


def overlay(frame, sketch: SketchSet, *, color=(255, 0, 0), thickness: int = 3) -> np.ndarray:
    """Stamp the sketch onto a copy of the frame's RGB image.

    ``frame`` needs ``rgb`` (H, W, 3 uint8) and ``frame_id`` attributes.
    Strokes are densified to sub-pixel steps so fast strokes stay solid.
    """
    if sketch.frame_id and frame.frame_id and sketch.frame_id != frame.frame_id:
        raise FrameMismatch(
            f"sketch is for frame {sketch.frame_id!r}, image is frame {frame.frame_id!r}"
        )
    img = np.array(frame.rgb, dtype=np.uint8, copy=True)
    height, width = img.shape[:2]
    half = max(thickness // 2, 0)
    for stroke in sketch.strokes:
        xy = stroke.xy
        for a, b in zip(xy[:-1], xy[1:]):
            seg = float(np.hypot(*(b - a)))
            steps = max(int(seg / 0.4) + 1, 2)
            for t in np.linspace(0.0, 1.0, steps):
                px, py = a + t * (b - a)
                cx, cy = int(round(px)), int(round(py))
                x0, x1 = max(cx - half, 0), min(cx + half, width - 1)
                y0, y1 = max(cy - half, 0), min(cy + half, height - 1)
                if x0 > x1 or y0 > y1:
                    continue
                img[y0 : y1 + 1, x0 : x1 + 1] = color
    return img


# --------------------------------------------------------------------------
# rule-based backend


@dataclass(frozen=True)
class ArrowProbe:
    """Scene facts about an arrow's endpoints, measured by perception.

    start_on_object:    the arrow starts on some manipulable object.
    end_on_object:      the arrow ends on some manipulable object.
    end_image_dy:       tip row minus tail row in pixels (positive means
                        the arrow points down the image, toward the robot).
    end_far_on_support: the tip lands on a support surface well away from
                        the start object, so a carry is plausible.
    """

    start_on_object: bool
    end_on_object: bool
    end_image_dy: float
    end_far_on_support: bool = False


def interpret_rule_based(
    shape: SketchShape,
    state: ConstraintState,
    *,
    probe: ArrowProbe | None = None,
    label: str | None = None,
) -> InterpretationResult:
    """Map a classified shape to a task with a fixed decision table.

    Raises :class:`HoldingConflict` when the shape asks for a grasp while
    the gripper is full (or a rotate while it is empty), and ValueError
    when an arrow needs scene facts but no probe was given.
    """
    holding = state.holding
    tag = (label or "").strip().lower()

    if shape is SketchShape.CIRCLE:
        task = TaskKind.PLACE if holding else TaskKind.PICK
    elif shape is SketchShape.U_SHAPE:
        if holding:
            raise HoldingConflict("gripper already holds an object; cannot grasp another")
        task = TaskKind.PICK
    elif shape is SketchShape.PATH:
        task = TaskKind.MOVE
    elif shape is SketchShape.CIRCLE_AND_ARROW:
        if holding:
            raise HoldingConflict("gripper already holds an object; cannot grasp another")
        task = TaskKind.PICK_AND_PLACE
    elif shape is SketchShape.ARROW:
        if tag == "rotate":
            if not holding:
                raise HoldingConflict("nothing in the gripper to rotate")
            task = TaskKind.ROTATE
        elif holding:
            task = TaskKind.PLACE
        else:
            if probe is None:
                raise ValueError("arrow interpretation needs an ArrowProbe")
            if not probe.start_on_object:
                task = TaskKind.MOVE
            elif probe.end_far_on_support and not probe.end_on_object:
                task = TaskKind.PICK_AND_PLACE
            elif probe.end_image_dy > 0 and not probe.end_on_object:
                task = TaskKind.PULL
            elif probe.end_image_dy <= 0:
                task = TaskKind.PUSH
            else:
                task = TaskKind.PULL
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unhandled shape {shape!r}")

    validate_pair(task, shape)
    raw = json.dumps({"task": task.value, "sketch_shape": shape.value})
    return InterpretationResult(task, shape, InterpretationSource.RULE_BASED, raw_text=raw)
