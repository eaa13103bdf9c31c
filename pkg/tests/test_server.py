import asyncio
import contextlib
import json
from pathlib import Path

import pytest

from vanilla import protocol
from vanilla.server import BindFailure, ServerConfig, VanillaServer


@pytest.fixture
def tables_dir(tmp_path, t1_source):
    (tmp_path / "T1.cin").write_text(t1_source, encoding="utf-8")
    return tmp_path


@contextlib.asynccontextmanager
async def running_server(tables_dir, ws=False):
    config = ServerConfig(
        tcp_host="127.0.0.1", tcp_port=0,
        ws_host="127.0.0.1" if ws else None, ws_port=0 if ws else None,
        tables_dir=Path(tables_dir),
    )
    server = VanillaServer(config)
    await server.start()
    try:
        yield server
    finally:
        await server.shutdown(grace=2.0)


class Client:
    """Scripted NDJSON client for tests."""

    def __init__(self, reader, writer):
        self.reader = reader
        self.writer = writer

    @classmethod
    async def connect(cls, server):
        host, port = server.tcp_address
        reader, writer = await asyncio.open_connection(host, port)
        return cls(reader, writer)

    async def send(self, frame):
        self.writer.write(protocol.encode_frame(frame))
        await self.writer.drain()

    async def send_raw(self, data: bytes):
        self.writer.write(data)
        await self.writer.drain()

    async def recv(self):
        line = await asyncio.wait_for(self.reader.readline(), timeout=5)
        assert line, "connection closed unexpectedly"
        return protocol.decode_frame(line)

    async def ask(self, frame):
        await self.send(frame)
        return await self.recv()

    async def close(self):
        self.writer.close()
        with contextlib.suppress(Exception):
            await self.writer.wait_closed()


def run(coro):
    return asyncio.run(asyncio.wait_for(coro, timeout=30))


class TestHandshake:
    def test_hello_welcome(self, tables_dir):
        async def scenario():
            async with running_server(tables_dir) as server:
                client = await Client.connect(server)
                welcome = await client.ask(protocol.Hello(version="1"))
                assert isinstance(welcome, protocol.Welcome)
                assert welcome.version == "1"
                assert [m.id for m in welcome.modules] == ["table:T1"]
                await client.close()
        run(scenario())

    def test_frames_before_hello_rejected(self, tables_dir):
        async def scenario():
            async with running_server(tables_dir) as server:
                client = await Client.connect(server)
                error = await client.ask(protocol.OpenSession(module="table:T1"))
                assert error == protocol.Error(code="protocol", message="hello required first")
                await client.close()
        run(scenario())

    def test_open_session_ids_count_up(self, tables_dir):
        async def scenario():
            async with running_server(tables_dir) as server:
                client = await Client.connect(server)
                await client.ask(protocol.Hello(version="1"))
                first = await client.ask(protocol.OpenSession(module="table:T1"))
                second = await client.ask(protocol.OpenSession(module="table:T1"))
                assert first == protocol.SessionOpened(session=1)
                assert second == protocol.SessionOpened(session=2)
                await client.close()
        run(scenario())

    def test_unknown_module(self, tables_dir):
        async def scenario():
            async with running_server(tables_dir) as server:
                client = await Client.connect(server)
                await client.ask(protocol.Hello(version="1"))
                error = await client.ask(protocol.OpenSession(module="nope"))
                assert error.code == "unknown_module"
                await client.close()
        run(scenario())

    def test_list_modules(self, tables_dir):
        async def scenario():
            async with running_server(tables_dir) as server:
                client = await Client.connect(server)
                await client.ask(protocol.Hello(version="1"))
                welcome = await client.ask(protocol.ListModules())
                assert isinstance(welcome, protocol.Welcome)
                await client.close()
        run(scenario())

    def test_missing_tables_dir_fails_fast(self, tmp_path):
        async def scenario():
            server = VanillaServer(ServerConfig(tcp_port=0, tables_dir=tmp_path / "nope"))
            with pytest.raises(Exception, match="tables dir missing"):
                await server.start()
        run(scenario())


async def open_t1_session(server):
    client = await Client.connect(server)
    await client.ask(protocol.Hello(version="1"))
    opened = await client.ask(protocol.OpenSession(module="table:T1"))
    return client, opened.session


class TestKeyFrames:
    def test_compose_and_commit(self, tables_dir):
        async def scenario():
            async with running_server(tables_dir) as server:
                client, sid = await open_t1_session(server)
                state = await client.ask(protocol.Key(session=sid, key="a"))
                assert state == protocol.State(session=sid, composing="A",
                                              candidates=(), page=0, visible=False)
                state = await client.ask(protocol.Key(session=sid, key="b"))
                assert state.composing == "AB"
                await client.send(protocol.Key(session=sid, key="space"))
                commit = await client.recv()
                state = await client.recv()
                assert commit == protocol.Commit(session=sid, text="明")
                assert state.composing == "" and state.visible is False
                await client.close()
        run(scenario())

    def test_candidate_window_state(self, tables_dir):
        async def scenario():
            async with running_server(tables_dir) as server:
                client, sid = await open_t1_session(server)
                await client.ask(protocol.Key(session=sid, key="a"))
                state = await client.ask(protocol.Key(session=sid, key="space"))
                assert state.visible is True
                assert state.candidates == (
                    protocol.CandidateInfo(label="1", text="日"),
                    protocol.CandidateInfo(label="2", text="月"),
                )
                await client.close()
        run(scenario())

    def test_passthrough(self, tables_dir):
        async def scenario():
            async with running_server(tables_dir) as server:
                client, sid = await open_t1_session(server)
                await client.send(protocol.Key(session=sid, key="z"))
                passthrough = await client.recv()
                state = await client.recv()
                assert passthrough == protocol.Passthrough(session=sid, key="z")
                assert state.composing == ""
                await client.close()
        run(scenario())

    def test_beep(self, tables_dir):
        async def scenario():
            async with running_server(tables_dir) as server:
                client, sid = await open_t1_session(server)
                await client.ask(protocol.Key(session=sid, key="a"))
                await client.send(protocol.Key(session=sid, key="z"))
                beep = await client.recv()
                state = await client.recv()
                assert beep == protocol.Beep(session=sid)
                assert state.composing == "A"
                await client.close()
        run(scenario())

    def test_unknown_session(self, tables_dir):
        async def scenario():
            async with running_server(tables_dir) as server:
                client, _ = await open_t1_session(server)
                error = await client.ask(protocol.Key(session=99, key="a"))
                assert error.code == "unknown_session"
                await client.close()
        run(scenario())

    def test_key_after_close_session(self, tables_dir):
        async def scenario():
            async with running_server(tables_dir) as server:
                client, sid = await open_t1_session(server)
                await client.send(protocol.CloseSession(session=sid))
                error = await client.ask(protocol.Key(session=sid, key="a"))
                assert error.code == "unknown_session"
                await client.close()
        run(scenario())

    def test_page_frames(self, tables_dir):
        async def scenario():
            async with running_server(tables_dir) as server:
                client, sid = await open_t1_session(server)
                await client.ask(protocol.Key(session=sid, key="a"))
                await client.ask(protocol.Key(session=sid, key="space"))
                state = await client.ask(protocol.Page(session=sid, direction="next"))
                assert state.page == 0  # single page wraps
                await client.close()
        run(scenario())

    def test_page_with_hidden_window(self, tables_dir):
        async def scenario():
            async with running_server(tables_dir) as server:
                client, sid = await open_t1_session(server)
                error = await client.ask(protocol.Page(session=sid, direction="next"))
                assert error.code == "window_hidden"
                await client.close()
        run(scenario())


class TestRobustness:
    def test_bad_frame_reported(self, tables_dir):
        async def scenario():
            async with running_server(tables_dir) as server:
                client = await Client.connect(server)
                await client.send_raw(b"this is not json\n")
                error = await client.recv()
                assert error.code == "bad_frame"
                welcome = await client.ask(protocol.Hello(version="1"))
                assert isinstance(welcome, protocol.Welcome)
                await client.close()
        run(scenario())

    def test_bad_frame_storm_closes_connection(self, tables_dir):
        async def scenario():
            async with running_server(tables_dir) as server:
                client = await Client.connect(server)
                for _ in range(12):
                    await client.send_raw(b"nope\n")
                deadline = asyncio.get_event_loop().time() + 5
                while True:
                    line = await asyncio.wait_for(client.reader.readline(), timeout=5)
                    if not line:
                        break
                    assert asyncio.get_event_loop().time() < deadline
                await client.close()
        run(scenario())

    def test_isolation_between_sessions(self, tables_dir):
        async def scenario():
            async with running_server(tables_dir) as server:
                client_a, sid_a = await open_t1_session(server)
                client_b, sid_b = await open_t1_session(server)
                await client_a.ask(protocol.Key(session=sid_a, key="a"))
                state_b = await client_b.ask(protocol.Key(session=sid_b, key="b"))
                assert state_b.composing == "B"
                state_a = await client_a.ask(protocol.Key(session=sid_a, key="b"))
                assert state_a.composing == "AB"
                await client_a.close()
                await client_b.close()
        run(scenario())


class TestShutdown:
    def test_prompt_with_no_clients(self, tables_dir):
        async def scenario():
            server = VanillaServer(ServerConfig(tcp_port=0, tables_dir=tables_dir))
            await server.start()
            start = asyncio.get_event_loop().time()
            await server.shutdown(grace=5.0)
            assert asyncio.get_event_loop().time() - start < 1.0
        run(scenario())

    def test_idle_client_sees_clean_close(self, tables_dir):
        async def scenario():
            server = VanillaServer(ServerConfig(tcp_port=0, tables_dir=tables_dir))
            await server.start()
            client = await Client.connect(server)
            await client.ask(protocol.Hello(version="1"))
            await server.shutdown(grace=1.0)
            line = await asyncio.wait_for(client.reader.readline(), timeout=5)
            assert line == b""
            await client.close()
        run(scenario())

    def test_in_flight_key_answered_before_close(self, tables_dir):
        async def scenario():
            server = VanillaServer(ServerConfig(tcp_port=0, tables_dir=tables_dir))
            await server.start()
            client, sid = await open_t1_session(server)
            await client.send(protocol.Key(session=sid, key="a"))
            state = await client.recv()
            await server.shutdown(grace=2.0)
            assert state.composing == "A"
            await client.close()
        run(scenario())


class TestWebSocket:
    def test_same_frames_over_ws(self, tables_dir):
        async def scenario():
            import websockets

            async with running_server(tables_dir, ws=True) as server:
                host, port = server.ws_address
                async with websockets.connect(f"ws://{host}:{port}/ws") as ws:
                    await ws.send(json.dumps({"type": "hello", "version": "1"}))
                    welcome = json.loads(await asyncio.wait_for(ws.recv(), timeout=5))
                    assert welcome["type"] == "welcome"
                    assert welcome["modules"] == [{"id": "table:T1", "name": "demo"}]
                    await ws.send(json.dumps({"type": "open_session", "module": "table:T1"}))
                    opened = json.loads(await ws.recv())
                    assert opened == {"type": "session_opened", "session": 1}
                    await ws.send(json.dumps({"type": "key", "session": 1, "key": "a"}))
                    state = json.loads(await ws.recv())
                    assert state["composing"] == "A"
        run(scenario())

    def test_unknown_path_rejected(self, tables_dir):
        async def scenario():
            import websockets

            async with running_server(tables_dir, ws=True) as server:
                host, port = server.ws_address
                async with websockets.connect(f"ws://{host}:{port}/other") as ws:
                    with pytest.raises(websockets.ConnectionClosed):
                        await asyncio.wait_for(ws.recv(), timeout=5)
        run(scenario())

    def test_bind_failure(self, tables_dir):
        async def scenario():
            first = VanillaServer(ServerConfig(tcp_port=0, tables_dir=tables_dir))
            await first.start()
            _, port = first.tcp_address
            second = VanillaServer(ServerConfig(tcp_port=port, tables_dir=tables_dir))
            with pytest.raises(BindFailure):
                await second.start()
            await first.shutdown(grace=1.0)
        run(scenario())
