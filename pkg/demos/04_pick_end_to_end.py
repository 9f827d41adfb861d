"""
One complete pick, narrated message by message
==============================================

Everything a live operator would do over the websocket, done here by
calling the session object directly: receive an observation, draw a
circle around the red cube, confirm the proposed task, let the arm run
to its pause, wave it off, and read the result.
"""

import math

import numpy as np

from sketchteleop.service.protocol import Message
from sketchteleop.service.session import Phase, Session, SessionConfig
from sketchteleop.sim.camera import project_points
from sketchteleop.strokes import SketchSet, Stroke, sketch_to_dict

session = Session(config=SessionConfig())
seq = 0
latest_frame = None


def pump(note=""):
    """Print whatever the session queued for the operator."""
    global latest_frame
    for msg in session.drain():
        if msg.type == "observation":
            latest_frame = msg.payload["frame_id"]
            continue  # one per phase change, too chatty to print
        detail = {k: v for k, v in msg.payload.items()
                  if k not in ("frame_id", "session_id")}
        print(f"  <- {msg.type:<16} {detail}")


def send(type_name, payload):
    global seq
    print(f"  -> {type_name}")
    session.handle(Message(seq=seq, type=type_name, payload=payload))
    seq += 1
    pump()


print("operator connects:")
session.on_connect()
pump()

# --- draw a circle around the red cube --------------------------------

auth = session.authority
center = auth.object_center(auth.instance_id("cube_red"))
pose = auth.camera.pose_in_world(auth.base)
px, _ = project_points(np.asarray([center]), pose, auth.camera.intrinsics)
u, v = float(px[0][0]), float(px[0][1])

theta = np.linspace(0.0, 2 * math.pi, 40)
xy = np.column_stack([u + 12 * np.cos(theta), v + 12 * np.sin(theta)])
xy[-1] = xy[0]
sketch = SketchSet(strokes=(Stroke(xy=xy, t=np.arange(len(xy)) * 0.01),),
                   frame_id=latest_frame)

print()
print(f"ringing cube_red at pixel ({u:.0f},{v:.0f}):")
send("sketch_submit", sketch_to_dict(sketch))

print()
print("accepting the proposal:")
send("confirm", {"accept": True})

# --- run the plan, answer every pause with "looks good" ---------------

print()
print("executing (ticks are silent, pauses are not):")
JOY_DONE = {"left_y": 0.0, "right_x": 0.0, "right_y": 0.0, "done": True}
for _ in range(2000):
    session.tick()
    pump()
    if session.phase is Phase.AWAITING_FEEDBACK:
        send("joystick", JOY_DONE)
    if session.phase in (Phase.AWAITING_SKETCH, Phase.FAILED):
        break

print()
held = auth.object_for(auth.held_object).name if auth.holding else "nothing"
print(f"gripper now holds: {held}")
print(f"session back in phase {session.phase.value}, ready for the next sketch")
