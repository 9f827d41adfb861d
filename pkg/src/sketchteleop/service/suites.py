"""Canned scenario suites for regression runs and acceptance checks.

Two suites, both against the default room:

* the task suite exercises every task type ten times over different
  objects, sketch styles, and target spots;
* the grasp-direction suite draws the open side of a U ten times per
  direction and checks the gripper really came in from that side.

The dicts returned here are plain JSON-ready data; the command line can
write them to JSONL for editing or replay.
"""

from __future__ import annotations

import math

__all__ = ["build_task_suite", "build_direction_suite"]

_DROP_REPLY = '{"task": "drop", "sketch_shape": "arrow"}'


def _run_and_expect(extra: list[dict] | None = None) -> list[dict]:
    steps = [
        {"op": "confirm"},
        {"op": "run_until_result"},
        {"op": "expect_result", "success": True},
    ]
    return steps + (extra or [])


def _pick(name: str, obj: str, shape: str = "circle", radius: float = 12.0,
          **sketch_extra) -> dict:
    sketch = {"op": "sketch", "shape": shape, "on": obj, "radius": radius}
    sketch.update(sketch_extra)
    return {
        "name": name,
        "steps": [
            sketch,
            {"op": "expect_interpretation", "task": "pick", "shape": shape},
        ]
        + _run_and_expect([{"op": "expect_holding", "object": obj}]),
    }


def _place(name: str, obj: str, sketch: dict, checks: list[dict]) -> dict:
    return {
        "name": name,
        "steps": [
            {"op": "force_attach", "object": obj},
            sketch,
            {"op": "expect_interpretation", "task": "place"},
        ]
        + _run_and_expect([{"op": "expect_not_holding"}] + checks),
    }


def _move(name: str, sketch: dict, end: list[float], tol: float) -> dict:
    return {
        "name": name,
        "steps": [
            sketch,
            {"op": "expect_interpretation", "task": "move"},
        ]
        + _run_and_expect([{"op": "expect_base_near", "world": end, "tol": tol}]),
    }


def _pull(name: str, obj: str, to_world: list[float]) -> dict:
    return {
        "name": name,
        "steps": [
            {"op": "sketch", "shape": "arrow", "from": obj, "to_world": to_world},
            {"op": "expect_interpretation", "task": "pull", "shape": "arrow"},
        ]
        + _run_and_expect([
            {"op": "expect_moved", "object": obj, "direction": "toward_robot", "min": 0.2},
            {"op": "expect_not_holding"},
            {"op": "expect_on", "object": obj, "support": "floor"},
        ]),
    }


def _push(name: str, obj: str, to_world: list[float]) -> dict:
    return {
        "name": name,
        "steps": [
            {"op": "sketch", "shape": "arrow", "from": obj, "to_world": to_world},
            {"op": "expect_interpretation", "task": "push", "shape": "arrow"},
        ]
        + _run_and_expect([
            {"op": "expect_moved", "object": obj, "direction": "away_from_robot", "min": 0.05},
            {"op": "expect_on", "object": obj, "support": "floor"},
        ]),
    }


def _drop(name: str, obj: str, sketch: dict, checks: list[dict]) -> dict:
    return {
        "name": name,
        "backend": "remote",
        "replies": [_DROP_REPLY],
        "steps": [
            {"op": "force_attach", "object": obj},
            sketch,
            {"op": "expect_interpretation", "task": "drop", "shape": "arrow"},
        ]
        + _run_and_expect([{"op": "expect_not_holding"}] + checks),
    }


def _carry(name: str, sketch: dict, obj: str, checks: list[dict]) -> dict:
    return {
        "name": name,
        "steps": [
            sketch,
            {"op": "expect_interpretation", "task": "pick_and_place"},
        ]
        + _run_and_expect([{"op": "expect_not_holding"}] + checks),
    }


_TURN_LABELS = {
    math.pi / 2: "quarter turn ccw",
    -math.pi / 2: "quarter turn cw",
    math.pi: "half turn ccw",
    -math.pi: "half turn cw",
}


def _rotate(name: str, obj: str, arrow: dict, wrist: float) -> dict:
    sketch = {"op": "sketch", "shape": "arrow", "label": "rotate"}
    sketch.update(arrow)
    return {
        "name": name,
        "variation": _TURN_LABELS[wrist],
        "steps": [
            {"op": "force_attach", "object": obj},
            sketch,
            {"op": "expect_interpretation", "task": "rotate", "shape": "arrow"},
        ]
        + _run_and_expect([{"op": "expect_wrist", "angle": wrist, "tol": 1e-6}]),
    }


def build_task_suite() -> list[dict]:
    """Eighty scenarios: ten per task type."""
    quarter = math.pi / 2
    half = math.pi
    scenarios: list[dict] = []

    scenarios += [
        _pick("pick the bowl off the table", "bowl"),
        _pick("pick the red cube", "cube_red"),
        _pick("pick the blue cube", "cube_blue"),
        _pick("pick the green can", "can_green", radius=10),
        _pick("pick the yellow ball", "ball_yellow", radius=10),
        _pick("pick the long block", "block_long"),
        _pick("pick the white can with a U", "can_white", shape="u_shape",
              radius=14, opening="above"),
        _pick("pick the orange ball", "ball_orange", radius=9),
        _pick("pick a cube out of the tray", "tray_cube_a", radius=8),
        _pick("pick the middle tray cube with a U", "tray_cube_b", shape="u_shape",
              radius=10, opening="above"),
    ]

    scenarios += [
        _place("set the red cube on a circled spot", "cube_red",
               {"op": "sketch", "shape": "circle", "on_world": [1.1, 0.45, 0.0]},
               [{"op": "expect_on", "object": "cube_red", "support": "floor"},
                {"op": "expect_near", "object": "cube_red", "world": [1.1, 0.45], "tol": 0.1}]),
        _place("set the blue cube down to the right", "cube_blue",
               {"op": "sketch", "shape": "circle", "on_world": [1.3, -0.5, 0.0]},
               [{"op": "expect_on", "object": "cube_blue", "support": "floor"},
                {"op": "expect_near", "object": "cube_blue", "world": [1.3, -0.5], "tol": 0.1}]),
        _place("set the green can down to the left", "can_green",
               {"op": "sketch", "shape": "circle", "on_world": [1.7, 0.8, 0.0]},
               [{"op": "expect_on", "object": "can_green", "support": "floor"}]),
        _place("put the yellow ball on the table with an arrow", "ball_yellow",
               {"op": "sketch", "shape": "arrow", "from_world": [1.2, 0.0],
                "to_world": [2.15, -0.6, 0.7]},
               [{"op": "expect_on", "object": "ball_yellow", "support": "table"}]),
        _place("put the long block on the tray with an arrow", "block_long",
               {"op": "sketch", "shape": "arrow", "from_world": [1.5, 0.3], "to": "tray"},
               [{"op": "expect_on", "object": "block_long", "support": "tray"}]),
        _place("set the white can down nearby", "can_white",
               {"op": "sketch", "shape": "circle", "on_world": [1.15, -0.25, 0.0]},
               [{"op": "expect_on", "object": "can_white", "support": "floor"}]),
        _place("set the orange ball down mid-room", "ball_orange",
               {"op": "sketch", "shape": "circle", "on_world": [2.1, 0.55, 0.0]},
               [{"op": "expect_on", "object": "ball_orange", "support": "floor"}]),
        _place("set a tray cube on the floor", "tray_cube_a",
               {"op": "sketch", "shape": "circle", "on_world": [1.5, 0.0, 0.0]},
               [{"op": "expect_on", "object": "tray_cube_a", "support": "floor"},
                {"op": "expect_near", "object": "tray_cube_a", "world": [1.5, 0.0], "tol": 0.1}]),
        _place("put the bowl back on the table", "bowl",
               {"op": "sketch", "shape": "arrow", "from_world": [1.4, 0.1],
                "to_world": [2.3, -1.1, 0.7]},
               [{"op": "expect_on", "object": "bowl", "support": "table"}]),
        _place("set the red cube down with an arrow", "cube_red",
               {"op": "sketch", "shape": "arrow", "from_world": [1.3, 0.4],
                "to_world": [1.2, -0.8]},
               [{"op": "expect_on", "object": "cube_red", "support": "floor"},
                {"op": "expect_near", "object": "cube_red", "world": [1.2, -0.8], "tol": 0.1}]),
    ]

    scenarios += [
        _move("drive straight ahead",
              {"op": "sketch", "shape": "path", "via_world": [[1.1, 0.0], [1.9, 0.0]]},
              [1.9, 0.0], 0.25),
        _move("drive forward and left",
              {"op": "sketch", "shape": "path",
               "via_world": [[1.1, 0.2], [1.6, 0.55], [2.0, 0.75]]},
              [2.0, 0.75], 0.25),
        _move("drive toward the table side",
              {"op": "sketch", "shape": "path",
               "via_world": [[1.25, -0.3], [1.6, -0.55], [1.85, -0.85]]},
              [1.85, -0.85], 0.25),
        _move("weave across the room",
              {"op": "sketch", "shape": "path",
               "via_world": [[1.1, 0.1], [1.5, 0.35], [1.9, 0.1], [2.3, 0.35]]},
              [2.3, 0.35], 0.25),
        _move("drive deep into the room",
              {"op": "sketch", "shape": "path", "via_world": [[1.2, 0.3], [3.1, 0.5]]},
              [3.1, 0.5], 0.25),
        _move("skirt the table edge",
              {"op": "sketch", "shape": "path",
               "via_world": [[1.2, -0.1], [1.85, -0.15], [2.6, -0.1]]},
              [2.6, -0.1], 0.25),
        _move("short hop by arrow",
              {"op": "sketch", "shape": "arrow", "from_world": [1.15, 0.05],
               "to_world": [1.75, 0.1]},
              [1.75, 0.1], 0.35),
        _move("arrow toward the table corner",
              {"op": "sketch", "shape": "arrow", "from_world": [1.3, -0.3],
               "to_world": [1.9, -0.45]},
              [1.9, -0.45], 0.35),
        _move("arrow up the left side",
              {"op": "sketch", "shape": "arrow", "from_world": [1.2, 0.5],
               "to_world": [1.8, 0.85]},
              [1.8, 0.85], 0.35),
        _move("long arrow across the floor",
              {"op": "sketch", "shape": "arrow", "from_world": [1.5, 0.0],
               "to_world": [2.6, 0.35]},
              [2.6, 0.35], 0.35),
    ]

    scenarios += [
        _pull("pull the red cube closer", "cube_red", [1.2, 0.2]),
        _pull("pull the blue cube closer", "cube_blue", [1.55, -0.3]),
        _pull("pull the green can closer", "can_green", [1.85, 0.4]),
        _pull("pull the yellow ball closer", "ball_yellow", [1.45, -0.55]),
        _pull("pull the long block closer", "block_long", [2.15, 0.15]),
        _pull("pull the white can closer", "can_white", [1.05, -0.15]),
        _pull("pull the orange ball closer", "ball_orange", [2.5, 0.7]),
        _pull("pull the red cube left and near", "cube_red", [1.25, 0.5]),
        _pull("pull the blue cube toward the table side", "cube_blue", [1.6, -0.6]),
        _pull("pull the green can up the middle", "can_green", [1.9, 0.7]),
    ]

    scenarios += [
        _push("push the red cube away", "cube_red", [2.0, 0.3]),
        _push("push the blue cube away", "cube_blue", [2.4, -0.3]),
        _push("push the green can away", "can_green", [2.7, 0.5]),
        _push("push the yellow ball past the table corner", "ball_yellow", [2.1, -0.45]),
        _push("push the long block toward the wall", "block_long", [3.0, 0.25]),
        _push("push the white can away", "can_white", [1.75, -0.1]),
        _push("push the orange ball toward the wall", "ball_orange", [3.25, 0.85]),
        _push("push the red cube away and right", "cube_red", [1.95, -0.05]),
        _push("push the blue cube up the middle", "cube_blue", [2.3, -0.1]),
        _push("push the white can toward the table", "can_white", [1.8, -0.35]),
    ]

    scenarios += [
        _drop("drop the red cube into the bin", "cube_red",
              {"op": "sketch", "shape": "arrow", "from_world": [1.5, 0.4], "to": "bin"},
              [{"op": "expect_on", "object": "cube_red", "support": "bin"}]),
        _drop("drop the green can into the bin", "can_green",
              {"op": "sketch", "shape": "arrow", "from_world": [1.9, 0.6], "to": "bin"},
              [{"op": "expect_on", "object": "can_green", "support": "bin"}]),
        _drop("drop the yellow ball onto the bin", "ball_yellow",
              {"op": "sketch", "shape": "arrow", "from_world": [1.4, -0.1],
               "to_world": [2.25, 0.95, 0.25]},
              [{"op": "expect_on", "object": "ball_yellow", "support": "bin"}]),
        _drop("drop the blue cube onto the tray", "cube_blue",
              {"op": "sketch", "shape": "arrow", "from_world": [1.6, -0.2], "to": "tray"},
              [{"op": "expect_on", "object": "cube_blue", "support": "tray"}]),
        _drop("drop a tray cube onto the table", "tray_cube_c",
              {"op": "sketch", "shape": "arrow", "from_world": [1.7, 0.1],
               "to_world": [2.2, -0.7, 0.7]},
              [{"op": "expect_on", "object": "tray_cube_c", "support": "table"}]),
        _drop("drop the white can onto the tray", "can_white",
              {"op": "sketch", "shape": "arrow", "from_world": [1.3, 0.1],
               "to_world": [2.5, -0.8, 0.74]},
              [{"op": "expect_on", "object": "can_white", "support": "tray"}]),
        _drop("drop the long block on the floor", "block_long",
              {"op": "sketch", "shape": "arrow", "from_world": [2.2, 0.6],
               "to_world": [1.3, 0.2]},
              [{"op": "expect_on", "object": "block_long", "support": "floor"},
               {"op": "expect_near", "object": "block_long", "world": [1.3, 0.2], "tol": 0.1}]),
        _drop("drop the orange ball mid-room", "ball_orange",
              {"op": "sketch", "shape": "arrow", "from_world": [2.6, 0.9],
               "to_world": [1.6, 0.6]},
              [{"op": "expect_on", "object": "ball_orange", "support": "floor"}]),
        _drop("drop a tray cube on the floor", "tray_cube_b",
              {"op": "sketch", "shape": "arrow", "from_world": [1.8, -0.4],
               "to_world": [1.9, -0.2]},
              [{"op": "expect_on", "object": "tray_cube_b", "support": "floor"}]),
        _drop("drop the bowl onto the table", "bowl",
              {"op": "sketch", "shape": "arrow", "from_world": [2.0, -0.3],
               "to_world": [2.2, -1.1, 0.7]},
              [{"op": "expect_on", "object": "bowl", "support": "table"}]),
    ]

    scenarios += [
        _carry("carry the blue cube onto the tray",
               {"op": "sketch", "shape": "arrow", "from": "cube_blue", "to": "tray"},
               "cube_blue",
               [{"op": "expect_on", "object": "cube_blue", "support": "tray"}]),
        _carry("carry the red cube to the bin",
               {"op": "sketch", "shape": "arrow", "from": "cube_red", "to": "bin"},
               "cube_red",
               [{"op": "expect_on", "object": "cube_red", "support": "bin"}]),
        _carry("carry the green can onto the tray",
               {"op": "sketch", "shape": "arrow", "from": "can_green", "to": "tray"},
               "can_green",
               [{"op": "expect_on", "object": "can_green", "support": "tray"}]),
        _carry("carry the yellow ball to the bin",
               {"op": "sketch", "shape": "arrow", "from": "ball_yellow", "to": "bin"},
               "ball_yellow",
               [{"op": "expect_on", "object": "ball_yellow", "support": "bin"}]),
        _carry("carry the white can onto the tray",
               {"op": "sketch", "shape": "arrow", "from": "can_white", "to": "tray"},
               "can_white",
               [{"op": "expect_on", "object": "can_white", "support": "tray"}]),
        _carry("carry the orange ball onto the tray",
               {"op": "sketch", "shape": "arrow", "from": "ball_orange", "to": "tray"},
               "ball_orange",
               [{"op": "expect_on", "object": "ball_orange", "support": "tray"}]),
        _carry("carry the long block to the bin",
               {"op": "sketch", "shape": "arrow", "from": "block_long", "to": "bin"},
               "block_long",
               [{"op": "expect_on", "object": "block_long", "support": "bin"}]),
        _carry("carry the red cube onto the table",
               {"op": "sketch", "shape": "arrow", "from": "cube_red",
                "to_world": [2.2, -0.8, 0.7]},
               "cube_red",
               [{"op": "expect_on", "object": "cube_red", "support": "table"}]),
        _carry("circle the blue cube, arrow to the far floor",
               {"op": "sketch", "shape": "circle_and_arrow", "on": "cube_blue",
                "to_world": [3.0, -0.1]},
               "cube_blue",
               [{"op": "expect_on", "object": "cube_blue", "support": "floor"},
                {"op": "expect_near", "object": "cube_blue", "world": [3.0, -0.1], "tol": 0.12}]),
        _carry("circle the yellow ball, arrow onto the table",
               {"op": "sketch", "shape": "circle_and_arrow", "on": "ball_yellow",
                "to_world": [2.4, -0.6, 0.7]},
               "ball_yellow",
               [{"op": "expect_on", "object": "ball_yellow", "support": "table"}]),
    ]

    # Hand-drawn "straight" strokes never fit a sweep of exactly zero, and the
    # sign of the residual decides the turn direction, so every shaft here
    # carries a deliberate gentle bend.
    rotate_arrows = [
        ({"from_world": [1.4, 0.15], "to_world": [1.8, 0.4]}, -0.4, quarter),
        ({"from_world": [1.6, -0.3], "to_world": [2.0, -0.1]}, -0.4, quarter),
        ({"from_world": [1.3, 0.35], "to_world": [1.75, 0.6]}, -0.4, quarter),
        ({"from_world": [1.9, 0.2], "to_world": [2.35, 0.45]}, -0.4, quarter),
        ({"from_world": [1.4, 0.1], "to_world": [1.85, 0.35]}, 0.9, -quarter),
        ({"from_world": [1.7, -0.2], "to_world": [2.1, 0.05]}, 0.9, -quarter),
        ({"from_world": [1.35, 0.25], "to_world": [1.8, 0.5]}, -0.9, quarter),
        ({"from_world": [1.8, 0.0], "to_world": [2.25, 0.25]}, -0.9, quarter),
        ({"from_world": [1.5, 0.2], "to_world": [1.95, 0.45]}, 2.9, -half),
        ({"from_world": [1.6, 0.0], "to_world": [2.05, 0.25]}, -2.9, half),
    ]
    rotate_objects = ["cube_red", "cube_blue", "can_green", "ball_yellow", "block_long",
                      "can_white", "ball_orange", "bowl", "tray_cube_a", "tray_cube_c"]
    for i, (obj, (arrow, sweep, wrist)) in enumerate(zip(rotate_objects, rotate_arrows)):
        spec = dict(arrow)
        if sweep:
            spec["sweep"] = sweep
        kind = "quarter" if abs(wrist) < 2 else "half"
        sign = "counterclockwise" if wrist > 0 else "clockwise"
        scenarios.append(
            _rotate(f"rotate the held {obj} a {sign} {kind} turn", obj, spec, wrist)
        )

    return scenarios


def build_direction_suite() -> list[dict]:
    """Forty scenarios: ten U sketches per grasp direction."""
    objects = ["cube_red", "cube_blue", "can_green", "ball_yellow", "block_long",
               "can_white", "ball_orange", "bowl"]
    variations = [("cube_red", 18.0, 3), ("can_white", 11.0, 7)]
    scenarios = []
    for opening in ("above", "right", "left", "front"):
        entries = [(obj, 14.0, 1) for obj in objects] + variations
        for obj, radius, seed in entries:
            scenarios.append({
                "name": f"grasp {obj} from {opening} (r{radius:.0f} s{seed})",
                "variation": f"grasp from {opening}",
                "steps": [
                    {"op": "sketch", "shape": "u_shape", "on": obj,
                     "opening": opening, "radius": radius, "seed": seed},
                    {"op": "expect_interpretation", "task": "pick", "shape": "u_shape"},
                    {"op": "confirm"},
                    {"op": "run_until_result"},
                    {"op": "expect_result", "success": True},
                    {"op": "expect_holding", "object": obj},
                    {"op": "expect_approach", "direction": opening},
                ],
            })
    return scenarios
