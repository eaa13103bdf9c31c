"""Text-service daemon: NDJSON over TCP plus the same frames over WebSocket.

The server owns all composition state.  Clients send key frames and
render the state frames they get back; nothing about composition logic
leaks to the client side.  Connections are handled concurrently; frames
within one connection are processed strictly in arrival order.
"""

from __future__ import annotations

import asyncio
import logging
from dataclasses import dataclass
from pathlib import Path

from . import protocol
from .core import KeyEvent, Registry, ServiceContext, VanillaError
from .engine import Session, WindowHidden

log = logging.getLogger("vanilla.server")

MAX_CONSECUTIVE_BAD_FRAMES = 10


class BindFailure(VanillaError):
    def __init__(self, addr: str, reason: str):
        super().__init__(f"cannot bind {addr}: {reason}")
        self.addr = addr


@dataclass
class ServerConfig:
    tcp_host: str = "127.0.0.1"
    tcp_port: int = 9876
    ws_host: str | None = None
    ws_port: int | None = None
    tables_dir: Path = Path(".")
    default_module: str | None = None
    max_sessions_per_conn: int = 16


class _Connection:
    """Per-connection protocol state; frames are handled sequentially."""

    def __init__(self, server: "VanillaServer"):
        self.server = server
        self.greeted = False
        self.sessions: dict[int, Session] = {}
        self.next_session_id = 1
        self.bad_frames = 0

    def handle_frame(self, frame) -> list:
        """Map one client frame to the server frames it provokes."""
        self.bad_frames = 0
        if isinstance(frame, protocol.Hello):
            self.greeted = True
            return [self.server.welcome_frame()]
        if not self.greeted:
            return [protocol.Error(code="protocol", message="hello required first")]
        if isinstance(frame, protocol.ListModules):
            return [self.server.welcome_frame()]
        if isinstance(frame, protocol.OpenSession):
            return self._open_session(frame.module)
        if isinstance(frame, protocol.Key):
            return self._with_session(frame.session, self._on_key, frame.key)
        if isinstance(frame, protocol.Page):
            return self._with_session(frame.session, self._on_page, frame.direction)
        if isinstance(frame, protocol.CloseSession):
            if frame.session not in self.sessions:
                return [protocol.Error(code="unknown_session", message=str(frame.session))]
            del self.sessions[frame.session]
            return []
        return [protocol.Error(code="bad_frame", message="client frame expected")]

    def handle_bad_frame(self, exc: protocol.BadFrame) -> tuple[list, bool]:
        """Returns (frames, close_connection)."""
        self.bad_frames += 1
        frames = [protocol.Error(code="bad_frame", message=exc.reason)]
        return frames, self.bad_frames > MAX_CONSECUTIVE_BAD_FRAMES

    def _open_session(self, module_id: str) -> list:
        module = self.server.registry.lookup(module_id)
        if module is None:
            return [protocol.Error(code="unknown_module", message=module_id)]
        if len(self.sessions) >= self.server.config.max_sessions_per_conn:
            return [protocol.Error(code="too_many_sessions",
                                   message=str(self.server.config.max_sessions_per_conn))]
        session_id = self.next_session_id
        self.next_session_id += 1
        self.sessions[session_id] = module.create_session(ServiceContext())
        return [protocol.SessionOpened(session=session_id)]

    def _with_session(self, session_id: int, handler, arg) -> list:
        session = self.sessions.get(session_id)
        if session is None:
            return [protocol.Error(code="unknown_session", message=str(session_id))]
        return handler(session_id, session, arg)

    def _on_key(self, session_id: int, session: Session, key: str) -> list:
        if len(key) == 1:
            event = KeyEvent.literal(key)
        else:
            event = KeyEvent.named(key)
        output = session.process_key(event)
        frames: list = []
        for text in output.commits:
            frames.append(protocol.Commit(session=session_id, text=text))
        if not output.handled:
            frames.append(protocol.Passthrough(session=session_id, key=key))
        if output.beep:
            frames.append(protocol.Beep(session=session_id))
        frames.append(state_frame(session_id, session))
        return frames

    def _on_page(self, session_id: int, session: Session, direction: str) -> list:
        try:
            session.page_candidates(direction)
        except WindowHidden:
            return [protocol.Error(code="window_hidden", message=str(session_id))]
        return [state_frame(session_id, session)]


def state_frame(session_id: int, session: Session) -> protocol.State:
    window = session.current_window()
    candidates = ()
    page = 0
    if window is not None:
        candidates = tuple(
            protocol.CandidateInfo(label=c.label, text=c.text) for c in window.items
        )
        page = window.page
    return protocol.State(
        session=session_id,
        composing=session.current_view().composing,
        candidates=candidates,
        page=page,
        visible=window is not None,
    )


class VanillaServer:
    """Owns the listeners, the module registry and all live sessions."""

    def __init__(self, config: ServerConfig):
        self.config = config
        self.registry = Registry()
        self._tcp_server: asyncio.base_events.Server | None = None
        self._ws_server = None
        self._conn_tasks: set[asyncio.Task] = set()
        self._writers: set[asyncio.StreamWriter] = set()

    def discover(self):
        tables_dir = Path(self.config.tables_dir)
        if not tables_dir.is_dir():
            raise VanillaError(f"tables dir missing: {tables_dir}")
        ctx = ServiceContext(notify=lambda m: log.warning("%s", m))
        found = self.registry.discover_tables(tables_dir, ctx)
        log.info("discovered %d table module(s) in %s", len(found), tables_dir)

    def welcome_frame(self) -> protocol.Welcome:
        modules = tuple(
            protocol.ModuleInfo(id=d.id, name=d.display_name)
            for d in self.registry.list_modules()
        )
        return protocol.Welcome(version=protocol.PROTOCOL_VERSION, modules=modules)

    # -- lifecycle -----------------------------------------------------

    async def start(self):
        self.discover()
        cfg = self.config
        try:
            self._tcp_server = await asyncio.start_server(
                self._handle_tcp, cfg.tcp_host, cfg.tcp_port, limit=2**20
            )
        except OSError as exc:
            raise BindFailure(f"{cfg.tcp_host}:{cfg.tcp_port}", str(exc)) from exc
        if cfg.ws_host is not None and cfg.ws_port is not None:
            from websockets.asyncio.server import serve as ws_serve

            try:
                self._ws_server = await ws_serve(self._handle_ws, cfg.ws_host, cfg.ws_port)
            except OSError as exc:
                raise BindFailure(f"{cfg.ws_host}:{cfg.ws_port}", str(exc)) from exc
        log.info("listening on %s:%d", cfg.tcp_host, cfg.tcp_port)

    @property
    def tcp_address(self) -> tuple[str, int]:
        sock = self._tcp_server.sockets[0]
        return sock.getsockname()[:2]

    @property
    def ws_address(self) -> tuple[str, int]:
        sock = next(iter(self._ws_server.sockets))
        return sock.getsockname()[:2]

    async def serve_forever(self):
        async with self._tcp_server:
            await self._tcp_server.serve_forever()

    async def shutdown(self, grace: float = 5.0):
        """Stop accepting, flush in-flight frames, close within grace."""
        if self._tcp_server is not None:
            self._tcp_server.close()
            await self._tcp_server.wait_closed()
        if self._ws_server is not None:
            self._ws_server.close()
        tasks = list(self._conn_tasks)
        if tasks:
            done, pending = await asyncio.wait(tasks, timeout=grace)
            for task in pending:
                task.cancel()
        for writer in list(self._writers):
            writer.close()
        if self._ws_server is not None:
            await self._ws_server.wait_closed()

    # -- transports ----------------------------------------------------

    async def _handle_tcp(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        task = asyncio.current_task()
        self._conn_tasks.add(task)
        self._writers.add(writer)
        conn = _Connection(self)
        try:
            while True:
                line = await reader.readline()
                if not line:
                    break
                if line.strip() == b"":
                    continue
                close = False
                try:
                    out = conn.handle_frame(protocol.decode_frame(line))
                except protocol.BadFrame as exc:
                    out, close = conn.handle_bad_frame(exc)
                for out_frame in out:
                    writer.write(protocol.encode_frame(out_frame))
                await writer.drain()
                if close:
                    break
        except (ConnectionResetError, asyncio.CancelledError):
            pass
        finally:
            conn.sessions.clear()
            self._writers.discard(writer)
            self._conn_tasks.discard(task)
            writer.close()

    async def _handle_ws(self, websocket):
        import websockets

        path = websocket.request.path.split("?", 1)[0]
        if path != "/ws":
            await websocket.close(code=1008, reason="unknown path")
            return
        conn = _Connection(self)
        try:
            async for message in websocket:
                if isinstance(message, bytes):
                    message = message.decode("utf-8", errors="replace")
                close = False
                try:
                    frames = [protocol.decode_frame(message)]
                except protocol.BadFrame as exc:
                    frames = []
                    out, close = conn.handle_bad_frame(exc)
                    for frame in out:
                        await websocket.send(_ws_payload(frame))
                for frame in frames:
                    for out_frame in conn.handle_frame(frame):
                        await websocket.send(_ws_payload(out_frame))
                if close:
                    await websocket.close(code=1002, reason="too many bad frames")
                    return
        except websockets.ConnectionClosed:
            pass
        finally:
            conn.sessions.clear()


def _ws_payload(frame) -> str:
    return protocol.encode_frame(frame).decode("utf-8").rstrip("\n")


async def serve(config: ServerConfig):
    """Run a server until cancelled."""
    server = VanillaServer(config)
    await server.start()
    try:
        await server.serve_forever()
    except asyncio.CancelledError:
        pass
    finally:
        await server.shutdown()
