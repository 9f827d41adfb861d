"""Sketch-driven teleoperation for a simulated mobile manipulator.

The stack turns free-hand sketches drawn over a camera image into
manipulation and navigation tasks: stroke geometry and shape
classification, task interpretation (rule-based or via a remote
vision-language endpoint), a small kinematic scene simulator, a greedy
task planner, and a websocket teleoperation service tying them together.
"""

__version__ = "0.1.0"

from .vocab import ApproachDirection, SketchShape, TaskKind  # noqa: F401
