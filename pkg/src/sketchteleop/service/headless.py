"""Scripted operator: runs sketch scenarios against a session without a UI.

A scenario is a plain dict (usually one line of a JSONL file) naming a
backend and a list of steps.  Each step either acts (draw a sketch,
confirm, send feedback) or checks (the interpretation, the task result,
where an object ended up).  The runner plays the operator: it keeps its
own client sequence numbers, watches the observation stream for frame
ids, resumes paused plans, and turns every failed check into a recorded
failure rather than an exception, so a suite always runs to the end.

Sketches are drawn programmatically in pixel space on the most recent
camera frame.  Objects are addressed by scene name and located by
projecting their center through the frame's own camera pose, which keeps
the scenarios valid even after the base has driven somewhere else.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from ..planner import PlannerConfig
from ..remote import StubTransport
from ..shapes import SyntheticSpec, generate_synthetic
from ..sim import EEPose, ObservationFrame, SimAuthority, grasp_target
from ..sim.camera import project_points
from ..sim.geom import orthonormal_from_approach
from ..strokes import SketchSet, Stroke, sketch_to_dict
from ..vocab import ApproachDirection, SketchShape
from .protocol import Message
from .session import Phase, Session, SessionConfig, render_rate

__all__ = [
    "EvalReport",
    "ScenarioOutcome",
    "ScenarioRunner",
    "SuiteReport",
    "build_eval_report",
    "compute_rates",
    "load_scenarios",
    "run_headless",
    "run_scenarios",
]


class _StepFailed(Exception):
    """Internal control flow: a check failed, stop this scenario."""


@dataclass
class ScenarioOutcome:
    name: str
    passed: bool
    task_class: str | None = None
    variation: str | None = None
    failures: list[str] = field(default_factory=list)
    interpretation_checks: int = 0
    interpretation_passed: int = 0
    result_checks: int = 0
    result_passed: int = 0
    # checks of the varied motion parameter (approach face, wrist angle)
    param_checks: int = 0
    param_passed: int = 0
    sim_time_s: float = 0.0


@dataclass
class SuiteReport:
    outcomes: list[ScenarioOutcome]

    @property
    def total(self) -> int:
        return len(self.outcomes)

    @property
    def passed(self) -> int:
        return sum(1 for o in self.outcomes if o.passed)

    def scenario_rate(self) -> Fraction:
        return Fraction(self.passed, self.total) if self.total else Fraction(0)

    def interpretation_rate(self) -> Fraction:
        checks = sum(o.interpretation_checks for o in self.outcomes)
        good = sum(o.interpretation_passed for o in self.outcomes)
        return Fraction(good, checks) if checks else Fraction(0)

    def task_rate(self) -> Fraction:
        checks = sum(o.result_checks for o in self.outcomes)
        good = sum(o.result_passed for o in self.outcomes)
        return Fraction(good, checks) if checks else Fraction(0)

    def summary_lines(self) -> list[str]:
        lines = []
        for o in self.outcomes:
            mark = "pass" if o.passed else "FAIL"
            line = f"[{mark}] {o.name} ({o.sim_time_s:.1f}s sim)"
            if o.failures:
                line += " :: " + "; ".join(o.failures)
            lines.append(line)
        i_good = sum(o.interpretation_passed for o in self.outcomes)
        i_all = sum(o.interpretation_checks for o in self.outcomes)
        r_good = sum(o.result_passed for o in self.outcomes)
        r_all = sum(o.result_checks for o in self.outcomes)
        lines.append(
            f"scenarios {self.passed}/{self.total}"
            f"  interpretations {i_good}/{i_all}"
            f"  task results {r_good}/{r_all}"
        )
        return lines


@dataclass
class EvalReport:
    """Suite metrics grouped three ways.

    ``per_class_counts`` holds raw correct/total tallies in three sections:
    ``interpretation`` and ``execution`` keyed by task class, ``variation``
    keyed by the declared variation label.  The rate maps render each tally
    as an exact rational to three decimals.  Classes with zero samples are
    left out of the rate maps and listed in ``skipped`` instead.
    """

    per_class_counts: dict[str, dict[str, dict[str, int]]]
    isr: dict[str, str]
    tsr: dict[str, str]
    vsr: dict[str, str]
    skipped: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        body = {
            "per_class_counts": self.per_class_counts,
            "isr": self.isr,
            "tsr": self.tsr,
            "vsr": self.vsr,
            "skipped": self.skipped,
        }
        return json.dumps(body, indent=2, sort_keys=True) + "\n"

    def table_lines(self) -> list[str]:
        """One row per task class with its ISR and TSR columns."""
        interp = self.per_class_counts.get("interpretation", {})
        execu = self.per_class_counts.get("execution", {})
        tasks = sorted(set(interp) | set(execu))
        width = max([len(t) for t in tasks] + [len("task")])

        def cell(counts: dict[str, dict[str, int]], rates: dict[str, str], name: str) -> str:
            c = counts.get(name)
            if c is None or c["total"] == 0:
                return "-".center(14)
            return f"{c['correct']:>2}/{c['total']:<3} ({rates.get(name, '-')})"

        lines = [f"{'task':<{width}}  {'ISR':^14}  {'TSR':^14}"]
        for name in tasks:
            lines.append(
                f"{name:<{width}}  {cell(interp, self.isr, name)}  {cell(execu, self.tsr, name)}"
            )
        if self.vsr:
            lines.append("")
            vwidth = max(len(v) for v in self.vsr)
            lines.append(f"{'variation':<{max(vwidth, 9)}}  {'VSR':^14}")
            var = self.per_class_counts.get("variation", {})
            for name in sorted(self.vsr):
                lines.append(f"{name:<{max(vwidth, 9)}}  {cell(var, self.vsr, name)}")
        return lines


def compute_rates(per_class_counts: dict[str, dict[str, dict[str, int]]]) -> EvalReport:
    """Turn raw tallies into an EvalReport with rendered rates.

    Zero-total classes cannot produce a rate; they are dropped from the
    rate maps and flagged by name so a silent hole in a suite shows up.
    """
    skipped: list[str] = []

    def rates(section: str) -> dict[str, str]:
        out: dict[str, str] = {}
        for name in sorted(per_class_counts.get(section, {})):
            tally = per_class_counts[section][name]
            correct, total = int(tally["correct"]), int(tally["total"])
            if correct > total:
                raise ValueError(f"{section}/{name}: correct {correct} exceeds total {total}")
            if total == 0:
                skipped.append(f"{section}/{name}: no samples")
                continue
            out[name] = render_rate(Fraction(correct, total))
        return out

    return EvalReport(
        per_class_counts=per_class_counts,
        isr=rates("interpretation"),
        tsr=rates("execution"),
        vsr=rates("variation"),
        skipped=skipped,
    )


def build_eval_report(report: SuiteReport) -> EvalReport:
    counts: dict[str, dict[str, dict[str, int]]] = {
        "interpretation": {},
        "execution": {},
        "variation": {},
    }

    def bump(section: str, name: str, correct: int, total: int) -> None:
        tally = counts[section].setdefault(name, {"correct": 0, "total": 0})
        tally["correct"] += correct
        tally["total"] += total

    for o in report.outcomes:
        cls = o.task_class or "unclassified"
        if o.interpretation_checks:
            bump("interpretation", cls, o.interpretation_passed, o.interpretation_checks)
        if o.result_checks:
            bump("execution", cls, int(o.passed), 1)
        if o.variation is not None:
            ok = o.param_checks > 0 and o.param_passed == o.param_checks
            bump("variation", o.variation, int(ok), 1)
    return compute_rates(counts)


def load_scenarios(path: str | Path) -> list[dict]:
    """Read scenarios from a JSONL file (blank lines and # comments skipped)."""
    scenarios = []
    for lineno, line in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            scenarios.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{lineno}: bad scenario JSON: {exc}") from None
    return scenarios


def run_scenarios(scenarios: list[dict], planner: PlannerConfig | None = None) -> SuiteReport:
    outcomes = [ScenarioRunner(s, planner=planner).run() for s in scenarios]
    return SuiteReport(outcomes)


def run_headless(path: str | Path, planner: PlannerConfig | None = None) -> EvalReport:
    """Run every scenario in a JSONL file and fold the outcomes into rates."""
    return build_eval_report(run_scenarios(load_scenarios(path), planner=planner))


# --------------------------------------------------------------------------
# sketch builders (pixel space)

_U_ROTATION = {
    ApproachDirection.ABOVE: 0.0,
    ApproachDirection.RIGHT: math.pi / 2.0,
    ApproachDirection.FRONT: math.pi,
    ApproachDirection.LEFT: -math.pi / 2.0,
}

# Centered sticks with the done flag set: ends a feedback pause.
_JOYSTICK_DONE = {"left_y": 0.0, "right_x": 0.0, "right_y": 0.0, "done": True}


def _ring_stroke(cx: float, cy: float, radius: float, index: int = 0) -> Stroke:
    theta = np.linspace(0.0, 2.0 * math.pi, 48)
    xy = np.column_stack([cx + radius * np.cos(theta), cy + radius * np.sin(theta)])
    xy[-1] = xy[0]
    t = index * 1.0 + np.arange(len(xy)) * 0.01
    return Stroke(xy=xy, t=t)


def _arrow_strokes(
    start: tuple[float, float],
    end: tuple[float, float],
    sweep: float = 0.0,
    first_index: int = 0,
) -> list[Stroke]:
    """Shaft plus two barb strokes; a nonzero sweep bends the shaft into an
    arc whose heading advances by that many radians tail to tip."""
    a = np.asarray(start, dtype=float)
    b = np.asarray(end, dtype=float)
    chord = b - a
    chord_len = float(np.linalg.norm(chord))
    if chord_len < 1e-9:
        raise ValueError("arrow needs distinct endpoints")
    if abs(sweep) < 1e-9:
        s = np.linspace(0.0, 1.0, 32)
        shaft = a + np.outer(s, chord)
        tip_heading = math.atan2(chord[1], chord[0])
    else:
        # a circular arc through both endpoints turning by `sweep`
        radius = chord_len / (2.0 * math.sin(abs(sweep) / 2.0))
        chord_ang = math.atan2(chord[1], chord[0])
        start_heading = chord_ang - sweep / 2.0
        phi = start_heading + np.linspace(0.0, sweep, 32)
        arc_len = radius * abs(sweep)
        signed_r = arc_len / sweep
        shaft = np.column_stack([
            a[0] + signed_r * (np.sin(phi) - math.sin(start_heading)),
            a[1] - signed_r * (np.cos(phi) - math.cos(start_heading)),
        ])
        tip_heading = start_heading + sweep
    shaft_arc = float(np.sum(np.linalg.norm(np.diff(shaft, axis=0), axis=1)))
    barb_len = min(max(0.16 * shaft_arc, 7.0), 0.3 * shaft_arc)
    strokes = [shaft]
    for side in (+2.6, -2.6):
        ang = tip_heading + side  # ~149 degrees back from the tip direction
        barb = np.stack([
            shaft[-1],
            shaft[-1] + barb_len * np.array([math.cos(ang), math.sin(ang)]),
        ])
        strokes.append(barb)
    out = []
    for i, xy in enumerate(strokes):
        t = (first_index + i) * 1.0 + np.arange(len(xy)) * 0.01
        out.append(Stroke(xy=xy, t=t))
    return out


def _polyline_stroke(points: np.ndarray, per_segment: int = 12) -> Stroke:
    dense = [points[0]]
    for p, q in zip(points[:-1], points[1:]):
        for k in range(1, per_segment + 1):
            dense.append(p + (q - p) * (k / per_segment))
    xy = np.asarray(dense, dtype=float)
    t = np.arange(len(xy)) * 0.01
    return Stroke(xy=xy, t=t)


# --------------------------------------------------------------------------


class ScenarioRunner:
    """Plays one scenario against a fresh session and reports the outcome."""

    def __init__(self, scenario: dict, *, planner: PlannerConfig | None = None):
        self.scenario = scenario
        self.name = scenario.get("name", "unnamed scenario")
        backend = scenario.get("backend", "rule")
        transport = None
        if backend == "remote":
            transport = StubTransport(replies=list(scenario.get("replies", [])))
        kwargs = {"backend": backend}
        if planner is not None:
            kwargs["planner"] = planner
        self.session = Session(config=SessionConfig(**kwargs), transport=transport)
        self.authority = self.session.authority
        task_class = scenario.get("task")
        if task_class is None:
            for step in scenario.get("steps", ()):
                if step.get("op") == "expect_interpretation" and "task" in step:
                    task_class = step["task"]
                    break
        self.outcome = ScenarioOutcome(
            name=self.name,
            passed=True,
            task_class=task_class,
            variation=scenario.get("variation"),
        )
        self._seq = 0
        self._frame_id: str | None = None
        self._last_interpretation: dict | None = None
        self._last_result: dict | None = None
        self._last_error: dict | None = None
        self._start_centers = {
            obj.name: np.asarray(obj.center, dtype=float)
            for obj in self.authority.scene.objects
        }

    # -- plumbing -------------------------------------------------------

    def _send(self, type_name: str, payload: dict) -> None:
        self.session.handle(Message(seq=self._seq, type=type_name, payload=payload))
        self._seq += 1
        self._collect()

    def _collect(self) -> None:
        for msg in self.session.drain():
            if msg.type == "observation":
                self._frame_id = msg.payload["frame_id"]
            elif msg.type == "interpretation":
                self._last_interpretation = msg.payload
            elif msg.type == "task_result":
                self._last_result = msg.payload
                self.outcome.sim_time_s += msg.payload["sim_time_s"]
            elif msg.type == "error":
                self._last_error = msg.payload

    def _fail(self, message: str) -> None:
        self.outcome.passed = False
        self.outcome.failures.append(message)
        raise _StepFailed(message)

    def _frame(self) -> ObservationFrame:
        if self._frame_id is None:
            self._fail("no observation frame seen yet")
        frame = self.session.frame(self._frame_id)
        if frame is None:
            self._fail(f"frame {self._frame_id} fell out of the cache")
        return frame

    def _pixel_of(self, spec: dict, role: str) -> tuple[float, float]:
        """Resolve one endpoint spec: an object name, a raw pixel, or a
        world point, with an optional pixel offset on top."""
        frame = self._frame()
        if f"{role}_px" in spec:
            u, v = spec[f"{role}_px"]
            return float(u), float(v)
        if f"{role}_world" in spec:
            w = list(spec[f"{role}_world"])
            if len(w) == 2:
                w.append(0.0)
            px, _ = project_points(np.asarray([w], dtype=float), frame.camera_pose,
                                   frame.intrinsics)
            return float(px[0, 0]), float(px[0, 1])
        name = spec.get(role)
        if name is None:
            self._fail(f"sketch step needs {role!r}, {role}_px, or {role}_world")
        obj = self.authority.object_for(self.authority.instance_id(name))
        # aim at the middle of the top face, the way a person sketches on
        # an object; a ray through the volumetric center can clip a box's
        # near face and backproject to a point just outside its footprint
        target = np.array([obj.center[0], obj.center[1], obj.top_z()], dtype=float)
        px, _ = project_points(target[None, :], frame.camera_pose, frame.intrinsics)
        u, v = float(px[0, 0]), float(px[0, 1])
        du, dv = spec.get(f"{role}_offset", (0.0, 0.0))
        return u + du, v + dv

    # -- steps ----------------------------------------------------------

    def run(self) -> ScenarioOutcome:
        try:
            self.session.on_connect()
            self._collect()
            for step in self.scenario.get("steps", []):
                self._dispatch(dict(step))
        except _StepFailed:
            pass
        return self.outcome

    def _dispatch(self, step: dict) -> None:
        op = step.pop("op")
        handler = getattr(self, f"_op_{op}", None)
        if handler is None:
            self._fail(f"unknown op {op!r}")
        handler(step)

    def _op_ticks(self, step: dict) -> None:
        for _ in range(int(step.get("n", 1))):
            self.session.tick()
        self._collect()

    def _op_force_attach(self, step: dict) -> None:
        """Put an object straight into the gripper, bypassing the sketch
        loop, for scenarios that start mid-task (place, drop, rotate)."""
        name = step["object"]
        idx = self.authority.instance_id(name)
        center = self.authority.object_center(idx)
        rot = orthonormal_from_approach(
            np.array([0.0, 0.0, -1.0]), hint=self.authority.base.forward()
        )
        above = center + [0.0, 0.0, 0.3]
        self.authority.set_ee_pose(EEPose(above, rot))
        self.authority.set_ee_pose(EEPose(center, rot))
        if not self.authority.grasp():
            self._fail(f"force_attach could not grasp {name}")
        self.authority.set_ee_pose(EEPose(center + [0.0, 0.0, 0.25], rot))

    def _op_sketch(self, step: dict) -> None:
        shape = SketchShape(step["shape"])
        frame = self._frame()
        strokes: list[Stroke]

        if shape is SketchShape.CIRCLE:
            u, v = self._pixel_of(step, "on")
            strokes = [_ring_stroke(u, v, float(step.get("radius", 12.0)))]
        elif shape is SketchShape.U_SHAPE:
            u, v = self._pixel_of(step, "on")
            opening = ApproachDirection(step.get("opening", "above"))
            sk, _, _ = generate_synthetic(
                SyntheticSpec(
                    shape=shape,
                    scale=float(step.get("radius", 14.0)),
                    rotation=_U_ROTATION[opening],
                    center=(u, v),
                    seed=int(step.get("seed", 1)),
                )
            )
            strokes = list(sk.strokes)
        elif shape is SketchShape.ARROW:
            a = self._pixel_of(step, "from")
            b = self._pixel_of(step, "to")
            strokes = _arrow_strokes(a, b, float(step.get("sweep", 0.0)))
        elif shape is SketchShape.PATH:
            frame_pts = []
            if "via_world" in step:
                pts = [list(w) + [0.0] * (3 - len(w)) for w in step["via_world"]]
                px, _ = project_points(
                    np.asarray(pts, dtype=float), frame.camera_pose, frame.intrinsics
                )
                frame_pts = px
            elif "via_px" in step:
                frame_pts = np.asarray(step["via_px"], dtype=float)
            else:
                self._fail("path sketch needs via_world or via_px")
            strokes = [_polyline_stroke(np.asarray(frame_pts, dtype=float))]
        elif shape is SketchShape.CIRCLE_AND_ARROW:
            u, v = self._pixel_of(step, "on")
            strokes = [_ring_stroke(u, v, float(step.get("radius", 12.0)))]
            b = self._pixel_of(step, "to")
            strokes += _arrow_strokes((u, v), b, float(step.get("sweep", 0.0)),
                                      first_index=1)
        else:  # pragma: no cover - enum is closed
            self._fail(f"no builder for shape {shape}")

        sketch = SketchSet(
            strokes=tuple(strokes), frame_id=frame.frame_id, label=step.get("label")
        )
        payload = sketch_to_dict(sketch)
        self._send("sketch_submit", payload)
        if self.session.pending_remote:
            self.session.run_remote()
            self._collect()

    def _op_expect_error(self, step: dict) -> None:
        got = self._last_error
        if got is None:
            self._fail("no error message was produced")
        want = step.get("code")
        if want is not None and got["code"] != want:
            self._fail(f"error code {got['code']!r}, wanted {want!r}")
        self._last_error = None

    def _op_expect_interpretation(self, step: dict) -> None:
        self.outcome.interpretation_checks += 1
        got = self._last_interpretation
        if got is None:
            self._fail("no interpretation was produced")
        want_task = step.get("task")
        if want_task is not None and got["task"] != want_task:
            self._fail(f"interpreted as {got['task']}, wanted {want_task}")
        want_shape = step.get("shape")
        if want_shape is not None and got["sketch_shape"] != want_shape:
            self._fail(f"classified as {got['sketch_shape']}, wanted {want_shape}")
        self.outcome.interpretation_passed += 1

    def _op_confirm(self, step: dict) -> None:
        self._send("confirm", {"accept": bool(step.get("accept", True))})

    def _op_feedback(self, step: dict) -> None:
        # Scenario files speak in operator intents; translate to wire messages.
        action = step["action"]
        if action in ("resume", "done"):
            self._send("joystick", _JOYSTICK_DONE)
        elif action == "abort":
            self._send("confirm", {"accept": False})
        elif action == "jog":
            self._send(
                "joystick",
                {
                    "left_y": float(step.get("left_y", 0.0)),
                    "right_x": float(step.get("right_x", 0.0)),
                    "right_y": float(step.get("right_y", 0.0)),
                    "done": False,
                },
            )
        elif action == "grasp":
            self._send("grasp", {})
        elif action == "release":
            self._send("release", {})
        else:
            self._fail(f"unknown feedback action {action!r}")

    def _op_stub_reply(self, step: dict) -> None:
        transport = self.session.transport
        if not isinstance(transport, StubTransport):
            self._fail("stub_reply only works with the remote backend")
        transport.replies.append(step["text"])

    def _op_run_until_result(self, step: dict) -> None:
        self._last_result = None
        budget_s = float(step.get("max_sim_s", 75.0))
        max_ticks = int(budget_s * float(self.session.config.tick_hz))
        for _ in range(max_ticks):
            self.session.tick()
            if self.session.phase is Phase.AWAITING_FEEDBACK:
                self._collect()
                self._send("joystick", _JOYSTICK_DONE)
            self._collect()
            if self._last_result is not None:
                return
        self._fail(f"no task result within {budget_s}s of simulated time")

    def _op_expect_result(self, step: dict) -> None:
        self.outcome.result_checks += 1
        got = self._last_result
        if got is None:
            self._fail("no task result to check")
        want = bool(step.get("success", True))
        if got["success"] != want:
            self._fail(
                f"task {'succeeded' if got['success'] else 'failed'}"
                f" ({got['detail']}), wanted {'success' if want else 'failure'}"
            )
        want_reason = step.get("reason")
        if want_reason is not None and got["detail"] != want_reason:
            self._fail(f"result detail {got['detail']!r}, wanted {want_reason!r}")
        self.outcome.result_passed += 1

    # -- world checks ----------------------------------------------------

    def _op_expect_holding(self, step: dict) -> None:
        if not self.authority.holding:
            self._fail("expected the gripper to hold something")
        want = step.get("object")
        if want is not None:
            held = self.authority.object_for(self.authority.held_object).name
            if held != want:
                self._fail(f"holding {held}, wanted {want}")

    def _op_expect_not_holding(self, step: dict) -> None:
        if self.authority.holding:
            held = self.authority.object_for(self.authority.held_object).name
            self._fail(f"expected an empty gripper, holding {held}")

    def _op_expect_on(self, step: dict) -> None:
        obj = self.authority.object_for(self.authority.instance_id(step["object"]))
        support_name = step["support"]
        tol = float(step.get("tol", 0.02))
        if support_name == "floor":
            if abs(obj.bottom_z()) > tol:
                self._fail(f"{obj.name} bottom at {obj.bottom_z():.3f}, not on the floor")
            return
        support = self.authority.object_for(self.authority.instance_id(support_name))
        lo, hi = support.aabb()
        cx, cy = obj.center[0], obj.center[1]
        if not (lo[0] <= cx <= hi[0] and lo[1] <= cy <= hi[1]):
            self._fail(f"{obj.name} center is not over {support_name}")
        if abs(obj.bottom_z() - support.top_z()) > tol:
            self._fail(
                f"{obj.name} bottom {obj.bottom_z():.3f} is not resting on "
                f"{support_name} top {support.top_z():.3f}"
            )

    def _op_expect_near(self, step: dict) -> None:
        obj = self.authority.object_for(self.authority.instance_id(step["object"]))
        want = np.asarray(step["world"], dtype=float)
        have = np.asarray(obj.center, dtype=float)[: len(want)]
        tol = float(step.get("tol", 0.05))
        dist = float(np.linalg.norm(have - want))
        if dist > tol:
            self._fail(f"{obj.name} is {dist:.3f}m from {want.tolist()}, tol {tol}")

    def _op_expect_base_near(self, step: dict) -> None:
        x, y = step["world"]
        tol = float(step.get("tol", 0.2))
        base = self.authority.base
        dist = math.hypot(base.x - x, base.y - y)
        if dist > tol:
            self._fail(f"base is {dist:.3f}m from ({x}, {y}), tol {tol}")

    def _op_expect_wrist(self, step: dict) -> None:
        self.outcome.param_checks += 1
        want = float(step["angle"])
        tol = float(step.get("tol", 1e-6))
        have = self.authority.wrist_angle
        if abs(have - want) > tol:
            self._fail(f"wrist at {have:.4f} rad, wanted {want:.4f}")
        self.outcome.param_passed += 1

    def _op_expect_moved(self, step: dict) -> None:
        name = step["object"]
        obj = self.authority.object_for(self.authority.instance_id(name))
        start = self._start_centers[name]
        now = np.asarray(obj.center, dtype=float)
        moved = float(np.linalg.norm((now - start)[:2]))
        least = float(step.get("min", 0.05))
        if moved < least:
            self._fail(f"{name} moved {moved:.3f}m, wanted at least {least}")
        direction = step.get("direction")
        if direction is not None:
            base = self.authority.base.position()[:2]
            before = float(np.linalg.norm(start[:2] - base))
            after = float(np.linalg.norm(now[:2] - base))
            if direction == "toward_robot" and after >= before:
                self._fail(f"{name} did not move toward the robot")
            if direction == "away_from_robot" and after <= before:
                self._fail(f"{name} did not move away from the robot")

    def _op_expect_approach(self, step: dict) -> None:
        self.outcome.param_checks += 1
        pose = self.authority.last_grasp_pose
        if pose is None:
            self._fail("nothing has been grasped yet")
        direction = ApproachDirection(step["direction"])
        held = self.authority.held_object
        if held is None:
            self._fail("expect_approach needs the object still in the gripper")
        target = grasp_target(
            self.authority.object_for(held), direction, self.authority.base
        )
        expected_approach = -target.outward
        actual = pose.rotation[:, 2]
        if float(np.dot(actual, expected_approach)) < 0.9:
            self._fail(
                f"grasp approached along {np.round(actual, 3).tolist()}, "
                f"wanted roughly {np.round(expected_approach, 3).tolist()}"
            )
        self.outcome.param_passed += 1
