"""Websocket host: one simulated robot, one operator at a time.

The server owns a single :class:`~sketchteleop.service.session.Session`
and steps it on a wall-clock timer.  Operator connections come and go;
a new connection supersedes the old one, which is closed with a short
explanation.  Nothing is replayed to a reconnecting client beyond the
hello resync the session itself produces, so the wire stays stateless.

Remote interpretation calls block on network I/O, so they run in a
worker thread while the tick loop keeps the simulation moving.  The
session drops stale deliveries on its own; the server does not need to
cancel anything when the operator aborts mid-think.
"""

from __future__ import annotations

import asyncio
import logging

from websockets.asyncio.server import serve
from websockets.exceptions import ConnectionClosed

from ..interpret import ParseError
from ..remote import TransportError, interpret_remote
from .session import Session

__all__ = ["RobotServer"]

log = logging.getLogger(__name__)


class RobotServer:
    """Bind a session to a websocket endpoint and keep it ticking."""

    def __init__(self, session: Session, host: str = "127.0.0.1", port: int = 8765):
        self.session = session
        self.host = host
        self.port = port
        self._server = None
        self._conn = None
        self._tick_task: asyncio.Task | None = None
        self._remote_tasks: set[asyncio.Task] = set()

    @property
    def bound_port(self) -> int:
        """The actual port, useful when constructed with port 0."""
        if self._server is None:
            raise RuntimeError("server is not running")
        return self._server.sockets[0].getsockname()[1]

    async def start(self) -> None:
        self._server = await serve(self._handler, self.host, self.port)
        self._tick_task = asyncio.create_task(self._tick_loop())
        log.info("listening on ws://%s:%d", self.host, self.bound_port)

    async def stop(self) -> None:
        if self._tick_task is not None:
            self._tick_task.cancel()
            try:
                await self._tick_task
            except asyncio.CancelledError:
                pass
            self._tick_task = None
        for task in list(self._remote_tasks):
            task.cancel()
        if self._conn is not None:
            await self._conn.close(1001, "server shutting down")
            self._conn = None
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()
            self._server = None

    async def serve_forever(self) -> None:
        await self.start()
        try:
            await self._server.serve_forever()
        finally:
            await self.stop()

    # -- connection handling ------------------------------------------------

    async def _handler(self, ws) -> None:
        previous, self._conn = self._conn, ws
        if previous is not None:
            await previous.close(1000, "another operator took over")
        self.session.on_connect()
        await self._flush()
        try:
            async for raw in ws:
                if self._conn is not ws:
                    break
                self.session.handle_raw(raw)
                self._launch_pending_remote()
                await self._flush()
        except ConnectionClosed:
            pass
        finally:
            if self._conn is ws:
                self._conn = None

    async def _flush(self) -> None:
        for raw in self.session.drain_raw():
            conn = self._conn
            if conn is None:
                continue  # nobody listening; hello resync covers reconnects
            try:
                await conn.send(raw)
            except ConnectionClosed:
                if self._conn is conn:
                    self._conn = None

    # -- background work ----------------------------------------------------

    async def _tick_loop(self) -> None:
        dt = 1.0 / float(self.session.config.tick_hz)
        while True:
            await asyncio.sleep(dt)
            self.session.tick()
            await self._flush()

    def _launch_pending_remote(self) -> None:
        if not self.session.pending_remote:
            return
        request = self.session.take_remote_request()
        if request is None:
            return
        task = asyncio.create_task(self._resolve_remote(request))
        self._remote_tasks.add(task)
        task.add_done_callback(self._remote_tasks.discard)

    async def _resolve_remote(self, request) -> None:
        try:
            result = await asyncio.to_thread(
                interpret_remote,
                request.image_png,
                request.bundle,
                self.session.transport,
                timeout_s=request.timeout_s,
            )
        except (ParseError, TransportError) as exc:
            self.session.deliver_interpret_failure(exc)
        except asyncio.CancelledError:
            raise
        else:
            self.session.deliver_interpretation(result)
        await self._flush()
