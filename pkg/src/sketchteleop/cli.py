"""Command line front door.

Four subcommands: ``serve`` runs the websocket robot, ``gen-dataset``
writes synthetic sketch corpora, ``eval-classifier`` scores the shape
classifier on such a corpus, and ``run-headless`` replays scenario
suites and writes the metrics report.  ``gen-scenarios`` regenerates
the shipped suite files.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import logging
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from .planner import PlannerConfig
from .remote import HttpTransport, RemoteEndpoint
from .service.headless import build_eval_report, load_scenarios, run_scenarios
from .service.server import RobotServer
from .service.session import Session, SessionConfig, render_rate
from .service.suites import build_direction_suite, build_task_suite
from .shapes import SyntheticSpec, classify_sketch, generate_synthetic
from .sim import SimAuthority
from .sim.scene import load_scene
from .strokes import sketch_from_dict, sketch_to_dict
from .vocab import SketchShape

log = logging.getLogger(__name__)

_DATASET_SHAPES = (
    SketchShape.CIRCLE,
    SketchShape.U_SHAPE,
    SketchShape.ARROW,
    SketchShape.PATH,
    SketchShape.CIRCLE_AND_ARROW,
)


# -- serve --------------------------------------------------------------


def _session_from_config(args) -> Session:
    cfg = {}
    if args.config:
        cfg = json.loads(Path(args.config).read_text("utf-8"))

    planner = replace(PlannerConfig(), **cfg.get("planner", {}))
    kwargs: dict = {"backend": args.interpreter, "planner": planner}
    for key in ("auto_confirm", "feedback_timeout_s", "max_task_sim_s", "joystick_deadman_s"):
        if key in cfg:
            kwargs[key] = cfg[key]
    for key in ("tick_hz", "observation_hz"):
        if key in cfg:
            kwargs[key] = Fraction(str(cfg[key]))

    interp = cfg.get("interpreter", {})
    if "timeout_s" in interp:
        kwargs["remote_timeout_s"] = float(interp["timeout_s"])

    transport = None
    if args.interpreter == "remote":
        url = interp.get("url")
        if not url:
            raise SystemExit("remote interpreter needs interpreter.url in the config file")
        endpoint = RemoteEndpoint(
            url=url,
            model=interp.get("model", "gpt-4o"),
            api_key_env=interp.get("api_key_env", "SKETCHTELEOP_API_KEY"),
            timeout_s=float(interp.get("timeout_s", 30.0)),
        )
        transport = HttpTransport(endpoint)

    authority = SimAuthority(scene=load_scene(args.scene)) if args.scene else SimAuthority()
    session_id = f"s{args.seed:08x}" if args.seed is not None else ""
    return Session(
        authority=authority,
        config=SessionConfig(**kwargs),
        transport=transport,
        session_id=session_id,
    )


def _cmd_serve(args) -> int:
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    session = _session_from_config(args)
    server = RobotServer(session, host=args.host, port=args.port)
    log.info("serving session %s on ws://%s:%d", session.session_id, args.host, args.port)
    try:
        asyncio.run(server.serve_forever())
    except KeyboardInterrupt:
        pass
    return 0


# -- gen-dataset --------------------------------------------------------


def _params_payload(shape: SketchShape, params) -> dict:
    if shape is SketchShape.CIRCLE:
        fit = params.circle
        return {"center": list(fit.center), "radius": fit.radius}
    if shape is SketchShape.ARROW:
        arrow = params.arrow
        return {"start": list(arrow.start), "end": list(arrow.end), "sweep": arrow.sweep}
    if shape is SketchShape.U_SHAPE:
        return {"opening": params.u_shape.opening.value}
    if shape is SketchShape.PATH:
        return {"polyline": params.path.polyline.tolist()}
    comp = params.composite
    return {
        "circle": {"center": list(comp.circle.center), "radius": comp.circle.radius},
        "arrow": {
            "start": list(comp.arrow.start),
            "end": list(comp.arrow.end),
            "sweep": comp.arrow.sweep,
        },
    }


def _cmd_gen_dataset(args) -> int:
    rng = np.random.default_rng(args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8") as fh:
        for i in range(args.count):
            shape = _DATASET_SHAPES[i % len(_DATASET_SHAPES)]
            spec = SyntheticSpec(
                shape=shape,
                jitter_sigma=args.sigma,
                scale=float(rng.uniform(40.0, 160.0)),
                rotation=float(rng.uniform(-np.pi, np.pi)),
                center=(float(rng.uniform(60.0, 260.0)), float(rng.uniform(50.0, 190.0))),
                arrow_style=str(rng.choice(["barbs", "backtrack"])),
                path_style=str(rng.choice(["s_curve", "wiggle"])),
                arrow_sweep=float(rng.uniform(-2.2, 2.2)) if rng.random() < 0.5 else 0.0,
                seed=int(rng.integers(0, 2**31 - 1)),
            )
            sketch, truth_shape, truth_params = generate_synthetic(spec)
            row = {
                "sketch": sketch_to_dict(sketch),
                "shape": truth_shape.value,
                "task": None,
                "params": _params_payload(truth_shape, truth_params),
            }
            fh.write(json.dumps(row) + "\n")
    print(f"wrote {args.count} rows to {out}")
    return 0


# -- eval-classifier ----------------------------------------------------


def _cmd_eval_classifier(args) -> int:
    per_shape: dict[str, dict[str, int]] = {}
    with Path(args.dataset).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SystemExit(f"{args.dataset}:{lineno}: bad row: {exc}")
            got, _ = classify_sketch(sketch_from_dict(row["sketch"]))
            tally = per_shape.setdefault(row["shape"], {"correct": 0, "total": 0})
            tally["total"] += 1
            tally["correct"] += int(got.value == row["shape"])

    correct = sum(t["correct"] for t in per_shape.values())
    total = sum(t["total"] for t in per_shape.values())
    if total == 0:
        raise SystemExit(f"{args.dataset}: no rows")
    report = {
        "per_shape": {
            name: {**tally, "accuracy": render_rate(Fraction(tally["correct"], tally["total"]))}
            for name, tally in sorted(per_shape.items())
        },
        "overall": {
            "correct": correct,
            "total": total,
            "accuracy": render_rate(Fraction(correct, total)),
        },
    }
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
    print(text, end="")
    return 0


# -- run-headless -------------------------------------------------------


def _cmd_run_headless(args) -> int:
    scenarios = load_scenarios(args.scenarios)
    suite = run_scenarios(scenarios)
    for line in suite.summary_lines():
        print(line)
    evaluation = build_eval_report(suite)
    print()
    for line in evaluation.table_lines():
        print(line)
    if args.report:
        Path(args.report).write_text(evaluation.to_json(), encoding="utf-8")
    return 0 if suite.passed == suite.total else 1


# -- gen-scenarios ------------------------------------------------------


def _cmd_gen_scenarios(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = {
        "tsr_suite.jsonl": (
            "# Ten scenarios per task type, run with the rule interpreter\n",
            build_task_suite(),
        ),
        "u_variations.jsonl": (
            "# Ten U-shape grasps per opening direction\n",
            build_direction_suite(),
        ),
    }
    for name, (header, scenarios) in files.items():
        path = out_dir / name
        with path.open("w", encoding="utf-8") as fh:
            fh.write(header)
            for scenario in scenarios:
                fh.write(json.dumps(scenario) + "\n")
        print(f"wrote {len(scenarios)} scenarios to {path}")
    return 0


# -- argument plumbing ---------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sketchteleop",
        description="Sketch-driven teleoperation of a simulated mobile manipulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the websocket robot service")
    serve.add_argument("--port", type=int, default=8765)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--scene", default=None, help="scene JSON (default: built-in room)")
    serve.add_argument("--interpreter", choices=("rule", "remote"), default="rule")
    serve.add_argument("--config", default=None, help="service config JSON")
    serve.add_argument("--seed", type=int, default=None)
    serve.set_defaults(func=_cmd_serve)

    gen = sub.add_parser("gen-dataset", help="write a synthetic sketch corpus")
    gen.add_argument("--count", type=int, required=True)
    gen.add_argument("--sigma", type=float, default=0.0, help="per-point jitter in pixels")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output JSONL path")
    gen.set_defaults(func=_cmd_gen_dataset)

    ev = sub.add_parser("eval-classifier", help="score the classifier on a corpus")
    ev.add_argument("--dataset", required=True)
    ev.add_argument("--report", default=None, help="write the JSON report here")
    ev.set_defaults(func=_cmd_eval_classifier)

    head = sub.add_parser("run-headless", help="replay a scenario suite")
    head.add_argument("--scenarios", required=True)
    head.add_argument("--report", default=None, help="write the metrics JSON here")
    head.set_defaults(func=_cmd_run_headless)

    gs = sub.add_parser("gen-scenarios", help="regenerate the shipped scenario suites")
    gs.add_argument("--out-dir", default="scenarios")
    gs.set_defaults(func=_cmd_gen_scenarios)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
