"""WebSocket front end for a session.

Wire protocol: one JSON document per WebSocket text frame (the frame is the
length delimiter), every message carrying "v": 1.  Clients send join /
input / leave plus ping; the server answers ack / reject / welcome / pong
and pushes a personalized snapshot to every connection after each tick.
The session itself runs inside the event loop, so client I/O and the tick
loop never touch state concurrently.
"""

from __future__ import annotations

import asyncio
import json

from websockets.asyncio.server import serve
from websockets.exceptions import ConnectionClosed

from .session import Ack, Session

PROTOCOL_VERSION = 1


class PortUnavailable(Exception):
    pass


class GameServer:
    def __init__(self, session: Session, tick_interval: float = 0.1, realtime: bool = True):
        self.session = session
        self.tick_interval = tick_interval
        self.realtime = realtime
        self.connections: dict[str, object] = {}
        self._counter = 0
        self._started = asyncio.Event()
        self.port: int | None = None

    async def handler(self, websocket):
        self._counter += 1
        client_id = f"client-{self._counter}"
        self.connections[client_id] = websocket
        try:
            async for raw in websocket:
                await self._handle_raw(client_id, websocket, raw)
        except ConnectionClosed:
            pass
        finally:
            self.connections.pop(client_id, None)
            self.session.drop_client(client_id)

    async def _handle_raw(self, client_id: str, websocket, raw) -> None:
        try:
            msg = json.loads(raw)
        except (json.JSONDecodeError, TypeError):
            await websocket.send(json.dumps({"v": 1, "type": "reject", "seq": -1, "reason": "bad_json"}))
            return
        if not isinstance(msg, dict) or msg.get("v") != PROTOCOL_VERSION:
            await websocket.send(
                json.dumps({"v": 1, "type": "reject", "seq": -1, "reason": "bad_protocol_version"})
            )
            return
        if msg.get("type") == "ping":
            await websocket.send(json.dumps({"v": 1, "type": "pong"}))
            return
        reply = self.session.handle_message(client_id, msg)
        if isinstance(reply, Ack):
            if msg.get("type") == "join" and reply.info is not None:
                await websocket.send(
                    json.dumps(
                        {
                            "v": 1,
                            "type": "welcome",
                            "seq": reply.seq,
                            "node": reply.info["node"],
                            "world": self.session.world_payload(),
                            "scenario": self._scenario_payload(),
                        }
                    )
                )
            else:
                await websocket.send(json.dumps({"v": 1, "type": "ack", "seq": reply.seq}))
        else:
            await websocket.send(
                json.dumps({"v": 1, "type": "reject", "seq": reply.seq, "reason": reply.reason})
            )

    def _scenario_payload(self) -> dict:
        from .scenario import scenario_to_dict

        return scenario_to_dict(self.session.scenario)

    async def broadcast(self) -> None:
        if not self.connections:
            return
        base = self.session.public_snapshot()
        sends = []
        for client_id, websocket in list(self.connections.items()):
            snap = self.session.snapshot_for(client_id, base)
            sends.append(websocket.send(json.dumps(snap)))
        await asyncio.gather(*sends, return_exceptions=True)

    async def tick_loop(self) -> None:
        loop = asyncio.get_running_loop()
        session = self.session
        while session.state.tick < session.max_ticks:
            started = loop.time()
            if session.state.nodes and not session.anyone_active():
                break
            session.tick_once()
            await self.broadcast()
            if self.realtime:
                await asyncio.sleep(max(0.0, self.tick_interval - (loop.time() - started)))
            else:
                await asyncio.sleep(0)
        session.finish()
        await self.broadcast()

    async def run(self, host: str, port: int) -> None:
        try:
            server = await serve(self.handler, host, port)
        except OSError as exc:
            raise PortUnavailable(f"cannot bind {host}:{port}: {exc}") from exc
        async with server:
            self.port = next(
                sock.getsockname()[1] for sock in server.sockets if sock.getsockname()
            )
            self._started.set()
            await self.tick_loop()
            for websocket in list(self.connections.values()):
                await websocket.close()


def serve_session(session: Session, host: str, port: int, realtime: bool = True) -> None:
    asyncio.run(GameServer(session, realtime=realtime).run(host, port))
