"""Sans-IO session: one operator driving one simulated robot.

The session owns the full conversation state but never touches a socket
or a clock.  Callers announce connections with :meth:`Session.on_connect`,
feed decoded messages to :meth:`Session.handle` (or raw frames to
:meth:`Session.handle_raw`), advance simulated time with
:meth:`Session.tick`, and collect outbound messages with
:meth:`Session.drain`.  The websocket server and the headless scenario
runner are both thin shells around this class, which is what keeps the
behaviour testable tick by tick.

Phase graph::

    idle --connect--> awaiting_sketch --sketch_submit--> interpreting
        interpreting --ok--> awaiting_confirm --confirm accept--> executing
        interpreting --conflict/parse failure--> awaiting_sketch
        executing --Pause primitive--> awaiting_feedback
        awaiting_feedback --joystick done--> executing
        executing --plan finished/failed/cancelled--> awaiting_sketch
        awaiting_sketch --joystick done--> done

A ``confirm {accept: false}`` while a task runs (executing or paused)
cancels it between primitives.  During the feedback pause the joystick
jogs the gripper in camera axes and ``grasp``/``release`` drive the
fingers; ``done: true`` hands control back to the plan.

``failed`` is reserved for internal faults: an exception escaping the
executor ends the session rather than pretending the world is still
consistent.
"""

from __future__ import annotations

import base64
import io
import logging
import time
import uuid
from collections import OrderedDict
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction

from PIL import Image

from ..interpret import (
    HoldingConflict,
    InterpretationResult,
    ParseError,
    compose_prompt,
    constraint_text,
    interpret_rule_based,
    overlay,
)
from ..planner import (
    DEFAULT_PLANNER,
    Executor,
    JoystickAxes,
    PlannerConfig,
    PlanningError,
    apply_joystick,
    plan_task,
)
from ..remote import RemoteRequest, TransportError, interpret_remote
from ..shapes import ShapeParams, classify_sketch
from ..sim import (
    InvalidDepth,
    NoObjectFound,
    ObservationFrame,
    PathOffFloor,
    PathTooShort,
    SimAuthority,
    arrow_probe,
)
from ..strokes import EmptySketch, SketchSet, compose_bbox, sketch_from_dict
from ..vocab import SketchShape, TaskKind
from .protocol import (
    CLIENT_MESSAGE_TYPES,
    PROTOCOL_VERSION,
    MalformedMessage,
    Message,
    UnknownType,
    decode_message,
    encode_message,
)

__all__ = [
    "Phase",
    "Session",
    "SessionConfig",
    "render_rate",
]

log = logging.getLogger(__name__)


class Phase(Enum):
    IDLE = "idle"
    AWAITING_SKETCH = "awaiting_sketch"
    INTERPRETING = "interpreting"
    AWAITING_CONFIRM = "awaiting_confirm"
    EXECUTING = "executing"
    AWAITING_FEEDBACK = "awaiting_feedback"
    DONE = "done"
    FAILED = "failed"


def render_rate(rate: Fraction) -> str:
    """Fixed-point text for a rate, three decimals, no float detour.

    Exact integer arithmetic with round-half-to-even on the third
    decimal, so the same rational always renders to the same bytes.
    """
    if rate < 0:
        raise ValueError(f"rate must not be negative, got {rate}")
    milli = rate * 1000
    q, r = divmod(milli.numerator, milli.denominator)
    if 2 * r > milli.denominator or (2 * r == milli.denominator and q % 2 == 1):
        q += 1
    whole, part = divmod(q, 1000)
    return f"{whole}.{part:03d}"


#: Whether a task needs the gripper full (True), empty (False), or either
#: (None).  Rule-based interpretation enforces this by construction; replies
#: from a remote model are checked against it before they reach the operator.
_HOLDING_REQUIRED: dict[TaskKind, bool | None] = {
    TaskKind.PICK: False,
    TaskKind.PLACE: True,
    TaskKind.MOVE: None,
    TaskKind.PULL: False,
    TaskKind.PUSH: False,
    TaskKind.DROP: True,
    TaskKind.PICK_AND_PLACE: False,
    TaskKind.ROTATE: True,
}

_PLANNING_ERRORS = (PlanningError, NoObjectFound, InvalidDepth, PathOffFloor, PathTooShort)


@dataclass(frozen=True)
class SessionConfig:
    tick_hz: Fraction = Fraction(20)
    observation_hz: Fraction = Fraction(2)
    frame_cache_size: int = 8
    max_task_sim_s: float = 60.0
    #: "rule" resolves sketches with the local decision table; "remote"
    #: hands the overlaid image to a vision-language model.
    backend: str = "rule"
    remote_timeout_s: float = 30.0
    #: skip the confirm step and execute interpretations immediately
    auto_confirm: bool = False
    #: stale joystick axes are zeroed after this much simulated silence
    joystick_deadman_s: float = 0.5
    #: auto-resume a feedback pause after this much simulated silence
    #: (None keeps the pause open until the operator says done)
    feedback_timeout_s: float | None = None
    planner: PlannerConfig = DEFAULT_PLANNER

    def __post_init__(self):
        if self.backend not in ("rule", "remote"):
            raise ValueError(f"backend must be 'rule' or 'remote', got {self.backend!r}")
        ratio = Fraction(self.tick_hz) / Fraction(self.observation_hz)
        if ratio.denominator != 1 or ratio < 1:
            raise ValueError(
                f"tick_hz must be an integer multiple of observation_hz "
                f"(got {self.tick_hz}/{self.observation_hz})"
            )


@dataclass
class _PendingRemote:
    request: RemoteRequest
    frame: ObservationFrame
    sketch: SketchSet
    shape: SketchShape
    params: ShapeParams
    taken: bool = False


@dataclass
class _ReadSketch:
    result: InterpretationResult
    params: ShapeParams
    frame: ObservationFrame
    sketch: SketchSet
    shape: SketchShape


def _png_bytes(rgb) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(rgb).save(buf, format="PNG", compress_level=1)
    return buf.getvalue()


def _png_b64(rgb) -> str:
    return base64.b64encode(_png_bytes(rgb)).decode("ascii")


@dataclass
class Session:
    """State machine for one operator connection (see module docstring)."""

    authority: SimAuthority = field(default_factory=SimAuthority)
    config: SessionConfig = field(default_factory=SessionConfig)
    transport: object | None = None
    session_id: str = ""

    def __post_init__(self):
        if not self.session_id:
            self.session_id = uuid.uuid4().hex[:12]
        if self.config.backend == "remote" and self.transport is None:
            raise ValueError("remote backend needs a transport")
        self.phase = Phase.IDLE
        self._dt = 1.0 / float(self.config.tick_hz)
        self._obs_every = int(Fraction(self.config.tick_hz) / Fraction(self.config.observation_hz))
        self._tick_count = 0
        self._seq_in = -1
        self._seq_out = 0
        self._out: list[Message] = []
        self._frames: "OrderedDict[str, ObservationFrame]" = OrderedDict()
        self._axes = JoystickAxes()
        self._axes_tick: int | None = None
        self._pause_activity_tick = 0
        self._pending: _PendingRemote | None = None
        self._read: _ReadSketch | None = None
        self._executor: Executor | None = None
        self._last_frame: ObservationFrame | None = None
        self._last_frame_key: tuple | None = None
        self._last_frame_png: str = ""

    # -- outbound ---------------------------------------------------------

    def drain(self) -> list[Message]:
        out, self._out = self._out, []
        return out

    def frame(self, frame_id: str) -> ObservationFrame | None:
        """The cached observation behind ``frame_id``, if it is still live."""
        return self._frames.get(frame_id)

    def drain_raw(self) -> list[str]:
        return [encode_message(m) for m in self.drain()]

    def _send(self, type_name: str, payload: dict) -> None:
        self._out.append(Message(seq=self._seq_out, type=type_name, payload=payload))
        self._seq_out += 1

    def _error(self, code: str, detail: str = "") -> None:
        payload = {"code": code}
        if detail:
            payload["detail"] = detail
        self._send("error", payload)

    def _status(self, detail: str) -> None:
        self._send("status", {"phase": self.phase.value, "detail": detail})

    def _set_phase(self, phase: Phase, detail: str) -> None:
        """Transition, announce it, and stream a fresh view of the world."""
        log.info(
            "session %s: %s -> %s (sim %.2fs): %s",
            self.session_id, self.phase.value, phase.value,
            self.authority.time_s, detail,
        )
        self.phase = phase
        self._status(detail)
        self._emit_observation()

    def _world_key(self) -> tuple:
        """Everything that can change what a render would show.

        Object positions only move while simulated time advances or while
        the gripper state flips (a release drops its load), so a matching
        key means the previous frame is still a faithful picture.
        """
        base = self.authority.base
        ee = self.authority.ee_pose.position
        return (
            self.authority.time_s,
            self.authority.holding,
            self.authority.held_object,
            base.x, base.y, base.yaw,
            float(ee[0]), float(ee[1]), float(ee[2]),
            self.authority.wrist_angle,
        )

    def _emit_observation(self) -> None:
        key = self._world_key()
        if key == self._last_frame_key and self._last_frame is not None:
            # World unchanged since the last render: reuse the pixels under
            # a fresh id so frame ids stay strictly increasing.
            frame = replace(self._last_frame, frame_id=self.authority.next_frame_id())
            png = self._last_frame_png
        else:
            frame = self.authority.observe()
            png = _png_b64(frame.rgb)
            self._last_frame_key, self._last_frame_png = key, png
        self._last_frame = frame
        self._frames[frame.frame_id] = frame
        while len(self._frames) > self.config.frame_cache_size:
            self._frames.popitem(last=False)
        base = self.authority.base
        ee = self.authority.ee_pose
        intr = frame.intrinsics
        self._send(
            "observation",
            {
                "frame_id": frame.frame_id,
                "png_b64": png,
                "width": frame.width,
                "height": frame.height,
                "intrinsics": {"fx": intr.fx, "fy": intr.fy, "cx": intr.cx, "cy": intr.cy},
                "robot": {
                    "base_x": base.x,
                    "base_y": base.y,
                    "base_yaw": base.yaw,
                    "ee_x": float(ee.position[0]),
                    "ee_y": float(ee.position[1]),
                    "ee_z": float(ee.position[2]),
                    "wrist_rad": self.authority.wrist_angle,
                    "holding": self.authority.holding,
                },
                "constraint": constraint_text(self.authority.constraint_state()),
            },
        )

    # -- inbound ----------------------------------------------------------

    def on_connect(self) -> None:
        """A client attached: greet it and stream the first view.

        The first connection arms the session; later ones are treated as
        the same operator coming back, so nothing about a task in flight
        is reset.
        """
        self._send(
            "hello",
            {
                "protocol_version": PROTOCOL_VERSION,
                "session_id": self.session_id,
                "observation_hz": render_rate(Fraction(self.config.observation_hz)),
                "tick_hz": render_rate(Fraction(self.config.tick_hz)),
            },
        )
        if self.phase is Phase.IDLE:
            self._set_phase(Phase.AWAITING_SKETCH, "ready for a sketch")
        else:
            self._status("reconnected")
            self._emit_observation()

    def handle_raw(self, raw: str | bytes) -> None:
        try:
            msg = decode_message(raw)
        except UnknownType as exc:
            self._error("unknown_type", str(exc))
            return
        except MalformedMessage as exc:
            self._error("malformed", str(exc))
            return
        self.handle(msg)

    def handle(self, msg: Message) -> None:
        if msg.type not in CLIENT_MESSAGE_TYPES:
            self._error("unknown_type", f"robot side does not accept {msg.type!r}")
            return
        if msg.seq <= self._seq_in:
            return  # replay of something already processed; drop without comment
        self._seq_in = msg.seq

        if msg.type == "sketch_submit":
            self._on_sketch_submit(msg.payload)
        elif msg.type == "confirm":
            self._on_confirm(msg.payload)
        elif msg.type == "joystick":
            self._on_joystick(msg.payload)
        elif msg.type == "grasp":
            self._on_grasp()
        elif msg.type == "release":
            self._on_release()

    # -- time -------------------------------------------------------------

    def tick(self) -> None:
        """Advance one tick of simulated time (1 / tick_hz seconds)."""
        if self.phase in (Phase.IDLE, Phase.DONE, Phase.FAILED):
            return
        self._tick_count += 1

        if self.phase is Phase.EXECUTING:
            self._tick_executor()
        elif self.phase is Phase.AWAITING_FEEDBACK:
            self._tick_adjustment()
        else:
            # awaiting_sketch / interpreting / awaiting_confirm: the world
            # keeps its clock running but nothing is commanded
            self.authority.step(self._dt)

        if self._tick_count % self._obs_every == 0:
            self._emit_observation()

    def _tick_adjustment(self) -> None:
        if self._axes_tick is not None:
            silence = (self._tick_count - self._axes_tick) * self._dt
            if silence > self.config.joystick_deadman_s:
                self._axes = JoystickAxes()
                self._axes_tick = None
        if self._axes != JoystickAxes():
            apply_joystick(self.authority, self._axes, self._dt, self.config.planner)
        self.authority.step(self._dt)
        timeout = self.config.feedback_timeout_s
        if timeout is not None:
            idle = (self._tick_count - self._pause_activity_tick) * self._dt
            if idle > timeout:
                self._end_adjustment("feedback window timed out; resuming")

    def _tick_executor(self) -> None:
        assert self._executor is not None
        try:
            state = self._executor.tick()
        except Exception as exc:  # noqa: BLE001 - contain, report, stop
            self.authority.set_base_twist(0.0, 0.0)
            self._send(
                "task_result",
                {
                    "success": False,
                    "detail": f"internal fault: {exc}",
                    "sim_time_s": self._executor.ticks * self._dt,
                    "constraint": constraint_text(self.authority.constraint_state()),
                },
            )
            self._executor = None
            self._read = None
            self._set_phase(Phase.FAILED, "session halted by an internal fault")
            return
        if state == "awaiting_feedback":
            self._axes = JoystickAxes()
            self._axes_tick = None
            self._pause_activity_tick = self._tick_count
            reason = self._executor.pause_message or "paused for adjustment"
            self._set_phase(Phase.AWAITING_FEEDBACK, reason)
            self._send("feedback_request", {"reason": reason})
        elif state == "done":
            outcome = self._executor.outcome
            self._finish_task(True, outcome.reason, outcome.sim_time_s)
        elif state == "failed":
            outcome = self._executor.outcome
            self._finish_task(False, outcome.reason, outcome.sim_time_s)
        elif self._executor.ticks * self._dt > self.config.max_task_sim_s:
            self._finish_task(False, "timeout", self._executor.ticks * self._dt)

    def _finish_task(self, success: bool, detail: str, sim_time_s: float) -> None:
        self.authority.set_base_twist(0.0, 0.0)
        self._executor = None
        self._read = None
        self._send(
            "task_result",
            {
                "success": success,
                "detail": detail,
                "sim_time_s": sim_time_s,
                "constraint": constraint_text(self.authority.constraint_state()),
            },
        )
        self._set_phase(Phase.AWAITING_SKETCH, "ready for a sketch")

    # -- message handlers ---------------------------------------------------

    def _on_sketch_submit(self, payload: dict) -> None:
        if self.phase is not Phase.AWAITING_SKETCH:
            self._error("bad_phase", f"cannot accept a sketch while {self.phase.value}")
            return
        frame = self._frames.get(payload["frame_id"])
        if frame is None:
            self._error(
                "unknown_frame",
                f"frame {payload['frame_id']!r} is not in the cache; sketch on a recent frame",
            )
            return
        try:
            sketch = sketch_from_dict(
                {
                    "frame_id": payload["frame_id"],
                    "label": payload.get("label"),
                    "strokes": payload["strokes"],
                }
            )
        except (EmptySketch, ValueError) as exc:
            self._error("malformed", f"unusable sketch: {exc}")
            return

        self._set_phase(Phase.INTERPRETING, "reading the sketch")
        try:
            shape, params = classify_sketch(sketch)
        except ValueError as exc:
            self._fail_interpret(f"could not classify the sketch: {exc}")
            return

        if self.config.backend == "rule":
            self._interpret_locally(frame, sketch, shape, params)
        else:
            image = overlay(frame, sketch)
            bundle = compose_prompt(self.authority.constraint_state(), few_shot=True)
            self._pending = _PendingRemote(
                request=RemoteRequest(
                    image_png=_png_bytes(image),
                    bundle=bundle,
                    timeout_s=self.config.remote_timeout_s,
                ),
                frame=frame,
                sketch=sketch,
                shape=shape,
                params=params,
            )
            self._status("asking the remote interpreter")

    def _interpret_locally(
        self,
        frame: ObservationFrame,
        sketch: SketchSet,
        shape: SketchShape,
        params: ShapeParams,
    ) -> None:
        probe = None
        label = (sketch.label or "").strip().lower()
        if shape is SketchShape.ARROW and not self.authority.holding and label != "rotate":
            probe = arrow_probe(frame, params.arrow)
        try:
            result = interpret_rule_based(
                shape,
                self.authority.constraint_state(),
                probe=probe,
                label=sketch.label,
            )
        except HoldingConflict as exc:
            self._error("holding_conflict", str(exc))
            self._set_phase(Phase.AWAITING_SKETCH, "ready for a sketch")
            return
        self._present_interpretation(result, frame, sketch, shape, params)

    # -- remote interpretation hooks ---------------------------------------

    @property
    def pending_remote(self) -> bool:
        """True while a sketch is waiting on the remote interpreter."""
        return self._pending is not None and not self._pending.taken

    def take_remote_request(self) -> RemoteRequest | None:
        """Claim the outstanding remote request, once.  The caller resolves
        it off-thread and reports back through :meth:`deliver_interpretation`
        or :meth:`deliver_interpret_failure`."""
        if self._pending is None or self._pending.taken:
            return None
        self._pending.taken = True
        return self._pending.request

    def run_remote(self, transport=None, clock=time.monotonic) -> None:
        """Resolve the pending remote request synchronously (headless path)."""
        request = self.take_remote_request()
        if request is None:
            return
        transport = transport if transport is not None else self.transport
        try:
            result = interpret_remote(
                request.image_png,
                request.bundle,
                transport,
                timeout_s=request.timeout_s,
                clock=clock,
            )
        except (ParseError, TransportError) as exc:
            self.deliver_interpret_failure(exc)
            return
        self.deliver_interpretation(result)

    def deliver_interpretation(self, result: InterpretationResult) -> None:
        pending = self._pending
        if pending is None or self.phase is not Phase.INTERPRETING:
            return  # the operator moved on while the model was thinking
        self._pending = None
        needs = _HOLDING_REQUIRED[result.task]
        if needs is not None and needs != self.authority.holding:
            if needs:
                detail = f"{result.task.value} needs a held object and the gripper is empty"
            else:
                detail = f"{result.task.value} needs an empty gripper and it is holding something"
            self._error("holding_conflict", detail)
            self._set_phase(Phase.AWAITING_SKETCH, "ready for a sketch")
            return
        self._present_interpretation(
            result, pending.frame, pending.sketch, pending.shape, pending.params
        )

    def deliver_interpret_failure(self, exc: Exception) -> None:
        if self._pending is None or self.phase is not Phase.INTERPRETING:
            return
        self._pending = None
        self._fail_interpret(str(exc))

    def _fail_interpret(self, detail: str) -> None:
        self._error("interpret_failed", detail)
        self._set_phase(Phase.AWAITING_SKETCH, "ready for a sketch")

    def _present_interpretation(
        self,
        result: InterpretationResult,
        frame: ObservationFrame,
        sketch: SketchSet,
        shape: SketchShape,
        params: ShapeParams,
    ) -> None:
        kwargs = {}
        if shape is SketchShape.ARROW and params.arrow is not None:
            kwargs = {"arrow_start": params.arrow.start, "arrow_end": params.arrow.end}
        box = compose_bbox(sketch, shape, frame_size=(frame.width, frame.height), **kwargs)
        self._read = _ReadSketch(result, params, frame, sketch, shape)
        self._send(
            "interpretation",
            {
                "task": result.task.value,
                "sketch_shape": result.shape.value,
                "source": result.source.value,
                "bbox": {
                    "min_x": box.min_x,
                    "min_y": box.min_y,
                    "max_x": box.max_x,
                    "max_y": box.max_y,
                },
            },
        )
        if self.config.auto_confirm:
            self._begin_execution()
        else:
            self._set_phase(Phase.AWAITING_CONFIRM, "confirm or reject the interpretation")

    def _begin_execution(self) -> None:
        read = self._read
        assert read is not None
        try:
            plan = plan_task(
                read.result,
                read.params,
                read.frame,
                self.authority,
                sketch=read.sketch,
                config=self.config.planner,
            )
        except _PLANNING_ERRORS as exc:
            self._read = None
            self._error("planning_failed", str(exc))
            self._set_phase(Phase.AWAITING_SKETCH, "ready for a sketch")
            return
        self._executor = Executor(self.authority, plan, self.config.planner)
        self._set_phase(Phase.EXECUTING, f"executing {read.result.task.value}")

    def _on_confirm(self, payload: dict) -> None:
        accept = payload["accept"]
        if self.phase is Phase.AWAITING_CONFIRM:
            if accept:
                self._begin_execution()
            else:
                self._read = None
                self._set_phase(
                    Phase.AWAITING_SKETCH, "interpretation rejected; ready for a sketch"
                )
            return
        if self.phase in (Phase.EXECUTING, Phase.AWAITING_FEEDBACK):
            if accept:
                self._error("bad_phase", "a task is already running")
                return
            sim_time = (self._executor.ticks * self._dt) if self._executor else 0.0
            self._finish_task(False, "cancelled by operator", sim_time)
            return
        if self.phase is Phase.INTERPRETING:
            if accept:
                self._error("bad_phase", "the sketch is still being interpreted")
                return
            self._pending = None
            self._read = None
            self._set_phase(
                Phase.AWAITING_SKETCH, "interpretation dropped; ready for a sketch"
            )
            return
        self._error("bad_phase", f"nothing to confirm while {self.phase.value}")

    def _end_adjustment(self, detail: str) -> None:
        assert self._executor is not None
        self._axes = JoystickAxes()
        self._axes_tick = None
        self._executor.resume()
        self._set_phase(Phase.EXECUTING, detail)

    def _on_joystick(self, payload: dict) -> None:
        done = payload["done"]
        if self.phase is Phase.AWAITING_FEEDBACK:
            self._pause_activity_tick = self._tick_count
            if done:
                self._end_adjustment("adjustment finished; resuming")
                return

            def clamp(v: float) -> float:
                return max(-1.0, min(1.0, float(v)))

            self._axes = JoystickAxes(
                left_y=clamp(payload["left_y"]),
                right_x=clamp(payload["right_x"]),
                right_y=clamp(payload["right_y"]),
            )
            self._axes_tick = self._tick_count
            return
        if self.phase is Phase.AWAITING_SKETCH and done:
            self._set_phase(Phase.DONE, "session closed by operator")
            return
        self._error("bad_phase", "the joystick is only live during a feedback pause")

    def _on_grasp(self) -> None:
        if self.phase is not Phase.AWAITING_FEEDBACK:
            self._error("bad_phase", "grasp is only live during a feedback pause")
            return
        self._pause_activity_tick = self._tick_count
        if self.authority.grasp():
            name = self.authority.object_for(self.authority.held_object).name
            self._status(f"grasped {name}")
        else:
            self._status("nothing within grasp range")

    def _on_release(self) -> None:
        if self.phase is not Phase.AWAITING_FEEDBACK:
            self._error("bad_phase", "release is only live during a feedback pause")
            return
        self._pause_activity_tick = self._tick_count
        idx = self.authority.release()
        if idx is None:
            self._status("gripper already empty")
        else:
            self._status(f"released {self.authority.object_for(idx).name}")
