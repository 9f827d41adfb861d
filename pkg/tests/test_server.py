"""Websocket host: takeover, resync, and a whole task over real sockets."""

import asyncio
import math
from contextlib import asynccontextmanager

import numpy as np
import pytest
from websockets.asyncio.client import connect
from websockets.exceptions import ConnectionClosed

from sketchteleop.remote import StubTransport
from sketchteleop.service.protocol import Message, decode_message, encode_message
from sketchteleop.service.server import RobotServer
from sketchteleop.service.session import Session, SessionConfig
from sketchteleop.sim.camera import project_points
from sketchteleop.strokes import SketchSet, Stroke, sketch_to_dict

JOY_DONE = {"left_y": 0.0, "right_x": 0.0, "right_y": 0.0, "done": True}


def run(coro, timeout: float = 60.0):
    async def guarded():
        return await asyncio.wait_for(coro, timeout)

    return asyncio.run(guarded())


@asynccontextmanager
async def serving(session: Session):
    server = RobotServer(session, port=0)
    await server.start()
    try:
        yield server
    finally:
        await server.stop()


@asynccontextmanager
async def operator(server: RobotServer):
    async with connect(f"ws://127.0.0.1:{server.bound_port}") as ws:
        yield WireClient(ws)


class WireClient:
    """Client half of the wire: numbers its frames, tracks what it saw."""

    def __init__(self, ws):
        self.ws = ws
        self.seq = 0
        self.seqs_seen: list[int] = []
        self.frame_id: str | None = None

    async def send(self, type_name: str, payload: dict) -> None:
        msg = Message(seq=self.seq, type=type_name, payload=payload)
        self.seq += 1
        await self.ws.send(encode_message(msg))

    async def recv(self, timeout: float = 10.0) -> Message:
        msg = decode_message(await asyncio.wait_for(self.ws.recv(), timeout))
        self.seqs_seen.append(msg.seq)
        if msg.type == "observation":
            self.frame_id = msg.payload["frame_id"]
        return msg

    async def recv_until(self, type_name: str, limit: int = 500) -> dict:
        for _ in range(limit):
            msg = await self.recv()
            if msg.type == type_name:
                return msg.payload
        raise AssertionError(f"no {type_name} within {limit} messages")

    async def run_to_result(self, limit: int = 2000) -> dict:
        for _ in range(limit):
            msg = await self.recv()
            if msg.type == "feedback_request":
                await self.send("joystick", JOY_DONE)
            elif msg.type == "task_result":
                return msg.payload
        raise AssertionError("no task result arrived")

    async def quiet_period(self, seconds: float) -> list[Message]:
        """Everything the server volunteers in the next stretch of time."""
        out: list[Message] = []
        loop = asyncio.get_running_loop()
        deadline = loop.time() + seconds
        while True:
            left = deadline - loop.time()
            if left <= 0:
                return out
            try:
                out.append(await self.recv(timeout=left))
            except asyncio.TimeoutError:
                return out


def ring_payload(session: Session, name: str, frame_id: str, radius: float = 12.0):
    auth = session.authority
    center = auth.object_center(auth.instance_id(name))
    pose = auth.camera.pose_in_world(auth.base)
    px, _ = project_points(np.asarray([center]), pose, auth.camera.intrinsics)
    u, v = float(px[0][0]), float(px[0][1])
    theta = np.linspace(0.0, 2 * math.pi, 40)
    xy = np.column_stack([u + radius * np.cos(theta), v + radius * np.sin(theta)])
    xy[-1] = xy[0]
    sketch = SketchSet(
        strokes=(Stroke(xy=xy, t=np.arange(len(xy)) * 0.01),), frame_id=frame_id
    )
    return sketch_to_dict(sketch)


def test_hello_greets_before_anything_else():
    async def flow():
        session = Session(config=SessionConfig())
        async with serving(session) as server, operator(server) as client:
            first = await client.recv()
            assert first.type == "hello"
            assert first.payload["session_id"] == session.session_id
            assert first.payload["protocol_version"] == 1
            status = await client.recv_until("status")
            assert status["phase"] == "awaiting_sketch"
            await client.recv_until("observation")

    run(flow())


def test_full_pick_over_the_wire():
    async def flow():
        session = Session(config=SessionConfig())
        async with serving(session) as server, operator(server) as client:
            await client.recv_until("observation")
            payload = ring_payload(session, "cube_red", client.frame_id)
            await client.send("sketch_submit", payload)
            interp = await client.recv_until("interpretation")
            assert interp["task"] == "pick"
            assert interp["source"] == "rule_based"
            await client.send("confirm", {"accept": True})
            result = await client.run_to_result()
            assert result["success"] is True
            assert result["constraint"] == "The robot is holding an object."
            assert result["sim_time_s"] > 0
            seqs = client.seqs_seen
            assert seqs == sorted(seqs)
            assert len(set(seqs)) == len(seqs)

    run(flow())


def test_second_operator_takes_over():
    async def flow():
        session = Session(config=SessionConfig())
        async with serving(session) as server:
            url = f"ws://127.0.0.1:{server.bound_port}"
            async with connect(url) as ws_a:
                a = WireClient(ws_a)
                assert (await a.recv()).type == "hello"
                async with connect(url) as ws_b:
                    b = WireClient(ws_b)
                    assert (await b.recv()).type == "hello"
                    with pytest.raises(ConnectionClosed) as closed:
                        for _ in range(50):
                            await a.recv()
                    assert closed.value.rcvd.code == 1000
                    assert "another operator took over" in closed.value.rcvd.reason
                    # the second operator keeps receiving the stream
                    await b.recv_until("observation")

    run(flow())


def test_reconnect_resyncs_without_reset():
    async def flow():
        session = Session(config=SessionConfig())
        async with serving(session) as server:
            url = f"ws://127.0.0.1:{server.bound_port}"
            async with connect(url) as ws:
                a = WireClient(ws)
                assert (await a.recv()).type == "hello"
                await a.recv_until("observation")
            async with connect(url) as ws:
                b = WireClient(ws)
                assert (await b.recv()).type == "hello"
                status = await b.recv_until("status")
                assert status["detail"] == "reconnected"
                await b.recv_until("observation")

    run(flow())


def test_malformed_frame_one_error_and_the_link_survives():
    async def flow():
        session = Session(config=SessionConfig())
        async with serving(session) as server, operator(server) as client:
            await client.recv_until("observation")
            await client.ws.send("this is not a wire frame")
            err = await client.recv_until("error")
            assert err["code"] == "malformed"
            volunteered = await client.quiet_period(0.6)
            assert [m for m in volunteered if m.type == "error"] == []
            # still in business: a well-formed but out-of-phase request
            await client.send("grasp", {})
            err = await client.recv_until("error")
            assert err["code"] == "bad_phase"

    run(flow())


def test_remote_interpretation_runs_off_the_tick_loop():
    async def flow():
        transport = StubTransport(replies=['{"task": "pick", "sketch_shape": "circle"}'])
        session = Session(config=SessionConfig(backend="remote"), transport=transport)
        async with serving(session) as server, operator(server) as client:
            await client.recv_until("observation")
            payload = ring_payload(session, "cube_red", client.frame_id)
            await client.send("sketch_submit", payload)
            interp = await client.recv_until("interpretation")
            assert interp["source"] == "remote"
            assert interp["task"] == "pick"

    run(flow())
