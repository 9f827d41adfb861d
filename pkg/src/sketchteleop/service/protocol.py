"""Wire protocol for the operator connection.

Every frame on the socket is one JSON object with exactly three fields:

    {"type": "<name>", "seq": <int>, "payload": {...}}

Sequence numbers increase strictly in each direction; receivers drop
replays silently.  Twelve message types: the robot sends hello,
observation, interpretation, status, feedback_request, task_result and
error; the operator sends sketch_submit, confirm, joystick, grasp and
release.  The protocol version rides in the hello payload, which the
robot sends first on every connection.

The same contract is written out as JSON Schema in protocol_schema.json,
which front ends can consume directly; the decoder here stays hand-rolled
so the runtime has no schema dependency.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any, Callable

from ..interpret import ConstraintState, constraint_text
from ..vocab import SketchShape, TaskKind

__all__ = [
    "ALL_MESSAGE_TYPES",
    "CLIENT_MESSAGE_TYPES",
    "PROTOCOL_VERSION",
    "SERVER_MESSAGE_TYPES",
    "SESSION_PHASES",
    "MalformedMessage",
    "Message",
    "UnknownType",
    "decode_message",
    "encode_message",
]

PROTOCOL_VERSION = 1


class MalformedMessage(ValueError):
    """The frame is not a valid protocol message."""


class UnknownType(ValueError):
    """Valid envelope, but a type this end does not speak."""

    def __init__(self, type_name: str):
        super().__init__(f"unknown message type {type_name!r}")
        self.type_name = type_name


@dataclass(frozen=True)
class Message:
    seq: int
    type: str
    payload: dict = field(default_factory=dict)


def _is_str(v: Any) -> bool:
    return isinstance(v, str)


def _is_bool(v: Any) -> bool:
    return isinstance(v, bool)


def _is_num(v: Any) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _is_int(v: Any) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_strokes(v: Any) -> bool:
    # full geometric validation happens at ingestion; here we only insist
    # on the nesting: a list of strokes, each a list of [x, y, (t)] numbers
    if not isinstance(v, list) or not v:
        return False
    for stroke in v:
        if not isinstance(stroke, list) or not stroke:
            return False
        for point in stroke:
            if not isinstance(point, list) or not 2 <= len(point) <= 3:
                return False
            if not all(_is_num(c) for c in point):
                return False
    return True


def _is_bbox(v: Any) -> bool:
    if not isinstance(v, dict):
        return False
    keys = ("min_x", "min_y", "max_x", "max_y")
    return set(v) == set(keys) and all(_is_num(v[k]) for k in keys)


def _exact_object(**fields: Callable[[Any], bool]) -> Callable[[Any], bool]:
    def check(v: Any) -> bool:
        if not isinstance(v, dict) or set(v) != set(fields):
            return False
        return all(checker(v[name]) for name, checker in fields.items())

    return check


def _one_of(*options: str) -> Callable[[Any], bool]:
    def check(v: Any) -> bool:
        return isinstance(v, str) and v in options

    return check


# rates travel as fixed-point strings ("20.000") so both ends agree on
# the exact value without float round-trips
_RATE_RE = re.compile(r"[0-9]+\.[0-9]{3}")


def _is_rate(v: Any) -> bool:
    return isinstance(v, str) and _RATE_RE.fullmatch(v) is not None


SESSION_PHASES = (
    "idle",
    "awaiting_sketch",
    "interpreting",
    "awaiting_confirm",
    "executing",
    "awaiting_feedback",
    "done",
    "failed",
)

_CONSTRAINT_TEXTS = (
    constraint_text(ConstraintState(holding=False)),
    constraint_text(ConstraintState(holding=True, held_object=0)),
)

_is_intrinsics = _exact_object(fx=_is_num, fy=_is_num, cx=_is_num, cy=_is_num)
_is_robot_state = _exact_object(
    base_x=_is_num,
    base_y=_is_num,
    base_yaw=_is_num,
    ee_x=_is_num,
    ee_y=_is_num,
    ee_z=_is_num,
    wrist_rad=_is_num,
    holding=_is_bool,
)


# field name -> (checker, required)
_SPECS: dict[str, dict[str, tuple[Callable[[Any], bool], bool]]] = {
    # robot -> operator
    "hello": {
        "protocol_version": (lambda v: _is_int(v) and v == PROTOCOL_VERSION, True),
        "session_id": (_is_str, True),
        "observation_hz": (_is_rate, True),
        "tick_hz": (_is_rate, True),
    },
    "observation": {
        "frame_id": (_is_str, True),
        "png_b64": (_is_str, True),
        "width": (_is_int, True),
        "height": (_is_int, True),
        "intrinsics": (_is_intrinsics, True),
        "robot": (_is_robot_state, True),
        "constraint": (_one_of(*_CONSTRAINT_TEXTS), True),
    },
    "interpretation": {
        "task": (_one_of(*(t.value for t in TaskKind)), True),
        "sketch_shape": (_one_of(*(s.value for s in SketchShape)), True),
        "source": (_one_of("rule_based", "remote"), True),
        "bbox": (_is_bbox, True),
    },
    "status": {
        "phase": (_one_of(*SESSION_PHASES), True),
        "detail": (_is_str, True),
    },
    "feedback_request": {
        "reason": (_is_str, True),
    },
    "task_result": {
        "success": (_is_bool, True),
        "detail": (_is_str, True),
        "sim_time_s": (_is_num, True),
        "constraint": (_one_of(*_CONSTRAINT_TEXTS), True),
    },
    "error": {
        "code": (_is_str, True),
        "detail": (_is_str, False),
    },
    # operator -> robot
    "sketch_submit": {
        "frame_id": (_is_str, True),
        "strokes": (_is_strokes, True),
        "label": (lambda v: v is None or _is_str(v), False),
    },
    "confirm": {
        "accept": (_is_bool, True),
    },
    "joystick": {
        "left_y": (_is_num, True),
        "right_x": (_is_num, True),
        "right_y": (_is_num, True),
        "done": (_is_bool, True),
    },
    "grasp": {},
    "release": {},
}

SERVER_MESSAGE_TYPES = frozenset(
    ("hello", "observation", "interpretation", "status", "feedback_request",
     "task_result", "error")
)
CLIENT_MESSAGE_TYPES = frozenset(
    ("sketch_submit", "confirm", "joystick", "grasp", "release")
)
ALL_MESSAGE_TYPES = CLIENT_MESSAGE_TYPES | SERVER_MESSAGE_TYPES


def _validate_payload(type_name: str, payload: Any) -> dict:
    if not isinstance(payload, dict):
        raise MalformedMessage(f"{type_name}: payload must be an object")
    spec = _SPECS[type_name]
    for name, (checker, required) in spec.items():
        if name not in payload:
            if required:
                raise MalformedMessage(f"{type_name}: missing field {name!r}")
            continue
        if not checker(payload[name]):
            raise MalformedMessage(f"{type_name}: bad value for field {name!r}")
    extras = set(payload) - set(spec)
    if extras:
        raise MalformedMessage(f"{type_name}: unexpected fields {sorted(extras)}")
    return payload


def decode_message(raw: str | bytes) -> Message:
    """Parse and validate one frame; raises MalformedMessage or UnknownType."""
    try:
        data = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedMessage(f"not JSON: {exc}") from None
    if not isinstance(data, dict):
        raise MalformedMessage("frame must be a JSON object")
    extras = set(data) - {"seq", "type", "payload"}
    if extras:
        raise MalformedMessage(f"unexpected envelope fields {sorted(extras)}")
    seq = data.get("seq")
    if not _is_int(seq) or seq < 0:
        raise MalformedMessage("seq must be a non-negative integer")
    type_name = data.get("type")
    if not _is_str(type_name):
        raise MalformedMessage("type must be a string")
    if type_name not in _SPECS:
        raise UnknownType(type_name)
    if "payload" not in data:
        raise MalformedMessage("missing payload")
    payload = _validate_payload(type_name, data["payload"])
    return Message(seq=seq, type=type_name, payload=payload)


def encode_message(message: Message) -> str:
    if message.type not in _SPECS:
        raise ValueError(f"refusing to encode unknown type {message.type!r}")
    _validate_payload(message.type, message.payload)
    return json.dumps(
        {"type": message.type, "seq": message.seq, "payload": message.payload},
        separators=(",", ":"),
    )
