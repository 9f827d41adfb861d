"""
The same pick, but over an actual websocket
===========================================

Start the server on a spare port, connect as a client, and speak the
wire protocol: JSON frames {"type", "seq", "payload"}, server greets
first, sequence numbers climb one by one in each direction. This is
exactly what a browser front end does.

docs/protocol.md is the full contract.
"""

import asyncio
import json
import math

import numpy as np
from websockets.asyncio.client import connect

from sketchteleop.service.server import RobotServer
from sketchteleop.service.session import Session, SessionConfig
from sketchteleop.sim.camera import project_points
from sketchteleop.strokes import SketchSet, Stroke, sketch_to_dict

JOY_DONE = {"left_y": 0.0, "right_x": 0.0, "right_y": 0.0, "done": True}


async def main():
    session = Session(config=SessionConfig())
    server = RobotServer(session, port=0)
    await server.start()
    print(f"serving on ws://127.0.0.1:{server.bound_port}")

    async with connect(f"ws://127.0.0.1:{server.bound_port}") as ws:
        seq = 0
        frame_id = None

        async def send(type_name, payload):
            nonlocal seq
            await ws.send(json.dumps(
                {"type": type_name, "seq": seq, "payload": payload}))
            seq += 1

        async def recv():
            nonlocal frame_id
            msg = json.loads(await asyncio.wait_for(ws.recv(), 10.0))
            if msg["type"] == "observation":
                frame_id = msg["payload"]["frame_id"]
            return msg

        # the server always speaks first
        hello = await recv()
        print(f"<- hello: session {hello['payload']['session_id']}, "
              f"protocol v{hello['payload']['protocol_version']}")

        # wait for the first camera frame, then sketch on it
        while frame_id is None:
            await recv()

        auth = session.authority
        center = auth.object_center(auth.instance_id("cube_red"))
        pose = auth.camera.pose_in_world(auth.base)
        px, _ = project_points(np.asarray([center]), pose,
                               auth.camera.intrinsics)
        theta = np.linspace(0.0, 2 * math.pi, 40)
        xy = np.column_stack([px[0][0] + 12 * np.cos(theta),
                              px[0][1] + 12 * np.sin(theta)])
        xy[-1] = xy[0]
        sketch = SketchSet(strokes=(Stroke(xy=xy),), frame_id=frame_id)

        print("-> sketch_submit (circle on cube_red)")
        await send("sketch_submit", sketch_to_dict(sketch))

        # read until the proposal arrives, accept it, then follow the
        # task to its end, answering pauses with a bare "done"
        while True:
            msg = await recv()
            kind, body = msg["type"], msg["payload"]
            if kind == "interpretation":
                print(f"<- interpretation: {body['task']} via {body['source']}")
                print("-> confirm accept=true")
                await send("confirm", {"accept": True})
            elif kind == "feedback_request":
                print(f"<- feedback_request: {body['reason']}")
                print("-> joystick done=true")
                await send("joystick", JOY_DONE)
            elif kind == "status":
                print(f"<- status: {body['phase']} ({body['detail']})")
            elif kind == "task_result":
                print(f"<- task_result: success={body['success']}, "
                      f"{body['sim_time_s']}s simulated, "
                      f"constraint now {body['constraint']!r}")
                break

    await server.stop()
    print("client closed, server stopped")


asyncio.run(main())
