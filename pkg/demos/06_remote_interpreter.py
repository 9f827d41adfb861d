"""
Swapping the rule table for a vision-language endpoint
======================================================

With backend="remote" the session stops deciding tasks itself. It
renders the sketch over the camera frame, packs a prompt, and waits
for an external model's answer. Here a canned transport stands in for
the real endpoint, which also lets us see exactly what would be sent.

The remote path is how "drop" ever happens: an arrow alone cannot
distinguish drop from place, so the rule table never proposes it, but
a model that read the words next to the arrow can.
"""

import math

import numpy as np

from sketchteleop.interpret import parse_response
from sketchteleop.remote import StubTransport
from sketchteleop.service.protocol import Message
from sketchteleop.service.session import Session, SessionConfig
from sketchteleop.sim.camera import project_points
from sketchteleop.strokes import SketchSet, Stroke, sketch_to_dict

# the stub plays these back in order, noise and all; the parser is
# expected to dig the JSON out of chatty model output
REPLY = 'Looking at the sketch: {"task": "drop", "sketch_shape": "arrow"}'

transport = StubTransport(replies=[REPLY])
session = Session(config=SessionConfig(backend="remote"), transport=transport)
session.on_connect()


def drain(quiet=False):
    """Collect queued messages, remember the newest frame id."""
    global frame_id
    out = []
    for msg in session.drain():
        if msg.type == "observation":
            frame_id = msg.payload["frame_id"]
        elif msg.type == "error":
            raise RuntimeError(f"session rejected a frame: {msg.payload}")
        out.append(msg)
    return out


frame_id = None
drain()

# hold something first so dropping it is even possible; come in from
# above, because dragging the gripper sideways through the scene would
# shove the cube along the table instead of landing on it
auth = session.authority
inst = auth.instance_id("cube_red")
from sketchteleop.sim.geom import EEPose
from sketchteleop.sim.perception import orthonormal_from_approach

center = auth.object_center(inst)
rot = orthonormal_from_approach(np.array([0.0, 0.0, -1.0]),
                                hint=auth.base.forward())
auth.set_ee_pose(EEPose(position=center + [0, 0, 0.15], rotation=rot))
auth.set_ee_pose(EEPose(position=center, rotation=rot))
auth.grasp()
print(f"pre-loaded the gripper: holding {auth.object_for(auth.held_object).name}")

# an arrow from the cube toward the bin, stamped with the frame id the
# session actually sent us (a stale or invented id would be rejected)
pose = auth.camera.pose_in_world(auth.base)
start = project_points(np.asarray([center]), pose, auth.camera.intrinsics)[0][0]
end = start + np.array([-60.0, 10.0])
line = np.linspace(start, end, 25)
head = np.array([end, end + [8.0, -6.0], end, end + [8.0, 6.0]])
sketch = SketchSet(
    strokes=(Stroke(xy=line), Stroke(xy=head[:2]), Stroke(xy=head[2:])),
    frame_id=frame_id,
    label="drop it",
)

session.handle(Message(seq=0, type="sketch_submit",
                       payload=sketch_to_dict(sketch)))
drain()

# --- what would cross the network --------------------------------------

request = session.take_remote_request()
print()
print("prompt the endpoint would receive:")
print(f"  image: {len(request.image_png)} bytes of png, sketch drawn on top")
print(f"  system text: {request.bundle.system_text[:66]}...")
print(f"  dynamic text: {request.bundle.dynamic_text}")

# hand it back untouched and let the session ask the stub
session._pending.taken = False
session.run_remote(transport)

for msg in drain():
    if msg.type == "interpretation":
        print()
        print(f"stub replied {REPLY!r}")
        print(f"session proposes: {msg.payload['task']} "
              f"(source {msg.payload['source']})")

# --- the parser alone ---------------------------------------------------

# synonyms and sloppy wrappers are tolerated, contradictions are not
print()
print("parser quick reference:")
for raw in (
    '{"task": "let_go", "sketch_shape": "arrow"}',
    'fenced:\n```json\n{"task": "pick", "sketch_shape": "circle"}\n```',
    '{"task": "fly", "sketch_shape": "circle"}',
):
    shown = raw.replace("\n", " ")[:48]
    try:
        result = parse_response(raw)
        print(f"  {shown:<50} -> {result.task.value}")
    except Exception as exc:
        print(f"  {shown:<50} -> rejected: {exc}")
