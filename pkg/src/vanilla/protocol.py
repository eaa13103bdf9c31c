"""Wire format for the text-service protocol.

Frames are single-line UTF-8 JSON objects terminated by LF; the "type"
field names the variant.  The same payloads travel over TCP (with the
LF) and WebSocket (one frame per text message, no LF).

Client frames: hello, list_modules, open_session, key, page,
close_session.  Server frames: welcome, session_opened, state, commit,
passthrough, beep, error.  A state frame fully describes the display.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields

from .core import VanillaError

PROTOCOL_VERSION = "1"

WIRE_NAMED_KEYS = ("space", "escape", "backspace", "enter")


class BadFrame(VanillaError):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


# -- client frames -----------------------------------------------------

@dataclass(frozen=True)
class Hello:
    version: str


@dataclass(frozen=True)
class ListModules:
    pass


@dataclass(frozen=True)
class OpenSession:
    module: str


@dataclass(frozen=True)
class Key:
    session: int
    key: str  # single char = literal; multi-char = named key


@dataclass(frozen=True)
class Page:
    session: int
    direction: str  # "next" or "prev"


@dataclass(frozen=True)
class CloseSession:
    session: int


# -- server frames -----------------------------------------------------

@dataclass(frozen=True)
class ModuleInfo:
    id: str
    name: str


@dataclass(frozen=True)
class Welcome:
    version: str
    modules: tuple[ModuleInfo, ...]


@dataclass(frozen=True)
class SessionOpened:
    session: int


@dataclass(frozen=True)
class CandidateInfo:
    label: str
    text: str


@dataclass(frozen=True)
class State:
    session: int
    composing: str
    candidates: tuple[CandidateInfo, ...]
    page: int
    visible: bool


@dataclass(frozen=True)
class Commit:
    session: int
    text: str


@dataclass(frozen=True)
class Passthrough:
    session: int
    key: str


@dataclass(frozen=True)
class Beep:
    session: int


@dataclass(frozen=True)
class Error:
    code: str
    message: str


CLIENT_FRAMES = {
    "hello": Hello,
    "list_modules": ListModules,
    "open_session": OpenSession,
    "key": Key,
    "page": Page,
    "close_session": CloseSession,
}

SERVER_FRAMES = {
    "welcome": Welcome,
    "session_opened": SessionOpened,
    "state": State,
    "commit": Commit,
    "passthrough": Passthrough,
    "beep": Beep,
    "error": Error,
}

_TYPE_BY_CLASS = {cls: name for name, cls in {**CLIENT_FRAMES, **SERVER_FRAMES}.items()}

Frame = object  # any of the dataclasses above


def frame_to_dict(frame) -> dict:
    name = _TYPE_BY_CLASS.get(type(frame))
    if name is None:
        raise BadFrame(f"not a frame: {type(frame).__name__}")
    payload: dict = {"type": name}
    for f in fields(frame):
        value = getattr(frame, f.name)
        if f.name == "modules":
            value = [{"id": m.id, "name": m.name} for m in value]
        elif f.name == "candidates":
            value = [{"label": c.label, "text": c.text} for c in value]
        payload[f.name] = value
    return payload


def encode_frame(frame) -> bytes:
    """Encode a frame as one LF-terminated JSON line."""
    line = json.dumps(frame_to_dict(frame), ensure_ascii=False, separators=(",", ":"))
    return line.encode("utf-8") + b"\n"


def frame_from_dict(payload) -> Frame:
    if not isinstance(payload, dict):
        raise BadFrame("frame is not a JSON object")
    frame_type = payload.get("type")
    if not isinstance(frame_type, str):
        raise BadFrame("missing type field")
    cls = CLIENT_FRAMES.get(frame_type) or SERVER_FRAMES.get(frame_type)
    if cls is None:
        raise BadFrame(f"unknown type {frame_type!r}")
    kwargs = {}
    for f in fields(cls):
        if f.name not in payload:
            raise BadFrame(f"missing field {f.name!r}")
        value = payload[f.name]
        if f.name == "session":
            # bool is an int subclass; reject it explicitly
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise BadFrame("session not integer")
        elif f.name in ("page",):
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise BadFrame("page not integer")
        elif f.name == "visible":
            if not isinstance(value, bool):
                raise BadFrame("visible not boolean")
        elif f.name == "modules":
            value = _decode_items(value, ModuleInfo, ("id", "name"))
        elif f.name == "candidates":
            value = _decode_items(value, CandidateInfo, ("label", "text"))
        elif not isinstance(value, str):
            raise BadFrame(f"field {f.name!r} not a string")
        if f.name == "key" and isinstance(value, str):
            if not value:
                raise BadFrame("empty key")
            if len(value) > 1 and value not in WIRE_NAMED_KEYS:
                raise BadFrame(f"unknown named key {value!r}")
        if f.name == "direction" and value not in ("next", "prev"):
            raise BadFrame(f"bad direction {value!r}")
        kwargs[f.name] = value
    return cls(**kwargs)


def _decode_items(value, cls, keys):
    if not isinstance(value, list):
        raise BadFrame(f"{cls.__name__} list expected")
    out = []
    for item in value:
        if not isinstance(item, dict):
            raise BadFrame(f"{cls.__name__} entry not an object")
        args = []
        for key in keys:
            v = item.get(key)
            if not isinstance(v, str):
                raise BadFrame(f"{cls.__name__}.{key} not a string")
            args.append(v)
        out.append(cls(*args))
    return tuple(out)


def decode_frame(data) -> Frame:
    """Decode one frame from an LF-terminated line (bytes or str)."""
    if isinstance(data, (bytes, bytearray)):
        try:
            data = bytes(data).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise BadFrame(f"invalid UTF-8: {exc}") from None
    try:
        payload = json.loads(data)
    except json.JSONDecodeError as exc:
        raise BadFrame(f"malformed JSON: {exc}") from None
    return frame_from_dict(payload)


class StreamDecoder:
    """Reassembles frames from an arbitrarily chunked byte stream."""

    def __init__(self):
        self._buffer = bytearray()

    def feed(self, chunk: bytes) -> list[Frame]:
        self._buffer.extend(chunk)
        frames = []
        while True:
            i = self._buffer.find(b"\n")
            if i < 0:
                break
            line = bytes(self._buffer[: i + 1])
            del self._buffer[: i + 1]
            frames.append(decode_frame(line))
        return frames

    @property
    def pending(self) -> bytes:
        return bytes(self._buffer)
