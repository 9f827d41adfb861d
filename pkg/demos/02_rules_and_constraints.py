"""
From shape to task: the rule table and the holding constraint
=============================================================

The same drawing means different things depending on what the gripper
is doing. A circle over an object says "pick it up" with an empty hand
and "put it down here" with a full one. This script walks the whole
decision table.
"""

from sketchteleop.interpret import (
    ArrowProbe,
    ConstraintState,
    HoldingConflict,
    interpret_rule_based,
)
from sketchteleop.vocab import SketchShape

EMPTY = ConstraintState(holding=False)
FULL = ConstraintState(holding=True, held_object="cube_red")


def show(shape, state, label=None, probe=None):
    hand = "holding" if state.holding else "empty  "
    try:
        result = interpret_rule_based(shape, state, label=label, probe=probe)
        out = result.task.value
    except HoldingConflict as exc:
        out = f"conflict ({exc})"
    tag = f" label={label!r}" if label else ""
    print(f"  {shape.value:<17} {hand}{tag:<16} -> {out}")


# --- the unambiguous shapes -------------------------------------------

print("shapes that ignore arrow geometry:")
show(SketchShape.CIRCLE, EMPTY)
show(SketchShape.CIRCLE, FULL)
show(SketchShape.U_SHAPE, EMPTY)
show(SketchShape.U_SHAPE, FULL)          # can't pick with a full gripper
show(SketchShape.PATH, EMPTY)
show(SketchShape.CIRCLE_AND_ARROW, EMPTY)
show(SketchShape.CIRCLE_AND_ARROW, FULL)  # same story

# --- arrows need more context -----------------------------------------

# Where an arrow starts and ends in the scene decides what it asks for.
# The probe answers: does the tail sit on an object, does the tip land
# on another object or far along the same support, and does the tip
# point down the image (toward the operator) or up (away)?

print()
print("arrows with an empty gripper, by probe:")

cases = [
    ("tail off any object", ArrowProbe(False, False, 5.0)),
    ("tip far along the table, nothing there",
     ArrowProbe(True, False, -3.0, end_far_on_support=True)),
    ("tip onto a neighbouring object", ArrowProbe(True, True, -3.0)),
    ("tip toward operator (down-image)", ArrowProbe(True, False, 8.0)),
    ("tip away from operator (up-image)", ArrowProbe(True, False, -8.0)),
]
for name, probe in cases:
    result = interpret_rule_based(SketchShape.ARROW, EMPTY, probe=probe)
    print(f"  {name:<40} -> {result.task.value}")

print()
print("arrows that skip the probe:")
show(SketchShape.ARROW, FULL)                    # carrying: arrow = destination
show(SketchShape.ARROW, EMPTY, label="rotate")   # a written word wins
show(SketchShape.ARROW, FULL, label="rotate")
