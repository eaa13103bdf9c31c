import json
import random

import pytest

from vanilla import protocol
from vanilla.protocol import (
    BadFrame,
    Beep,
    CandidateInfo,
    CloseSession,
    Commit,
    Error,
    Hello,
    Key,
    ListModules,
    ModuleInfo,
    OpenSession,
    Page,
    Passthrough,
    SessionOpened,
    State,
    StreamDecoder,
    Welcome,
    decode_frame,
    encode_frame,
)

CJK = [chr(c) for c in range(0x4E00, 0x4E00 + 2000)]


def random_text(rng, max_len=8):
    alphabet = CJK + list("abc xyz'\"\\\n\t{}:,")
    return "".join(rng.choice(alphabet) for _ in range(rng.randint(0, max_len)))


def random_frame(rng):
    which = rng.randrange(13)
    if which == 0:
        return Hello(version=str(rng.randint(1, 9)))
    if which == 1:
        return ListModules()
    if which == 2:
        return OpenSession(module=f"table:t{rng.randint(0, 99)}")
    if which == 3:
        key = rng.choice(["a", "z", "1", rng.choice(CJK), "space", "escape", "backspace", "enter"])
        return Key(session=rng.randint(1, 99), key=key)
    if which == 4:
        return Page(session=rng.randint(1, 99), direction=rng.choice(["next", "prev"]))
    if which == 5:
        return CloseSession(session=rng.randint(1, 99))
    if which == 6:
        modules = tuple(
            ModuleInfo(id=f"m{i}", name=random_text(rng)) for i in range(rng.randint(0, 4))
        )
        return Welcome(version="1", modules=modules)
    if which == 7:
        return SessionOpened(session=rng.randint(1, 99))
    if which == 8:
        candidates = tuple(
            CandidateInfo(label=str(i), text=random_text(rng))
            for i in range(rng.randint(0, 5))
        )
        return State(session=rng.randint(1, 99), composing=random_text(rng),
                     candidates=candidates, page=rng.randint(0, 5),
                     visible=rng.random() < 0.5)
    if which == 9:
        return Commit(session=rng.randint(1, 99), text=random_text(rng))
    if which == 10:
        return Passthrough(session=rng.randint(1, 99), key="x")
    if which == 11:
        return Beep(session=rng.randint(1, 99))
    return Error(code="bad_frame", message=random_text(rng))


class TestEncode:
    def test_key_frame_bytes(self):
        assert encode_frame(Key(session=1, key="a")) == b'{"type":"key","session":1,"key":"a"}\n'

    def test_commit_frame_bytes(self):
        expected = '{"type":"commit","session":1,"text":"明"}\n'.encode("utf-8")
        assert encode_frame(Commit(session=1, text="明")) == expected

    def test_hello_frame_bytes(self):
        assert encode_frame(Hello(version="1")) == b'{"type":"hello","version":"1"}\n'

    def test_single_line(self):
        frame = Commit(session=1, text="a\nb")
        encoded = encode_frame(frame)
        assert encoded.endswith(b"\n")
        assert encoded[:-1].count(b"\n") == 0


class TestDecode:
    def test_round_trip_all_variants(self):
        rng = random.Random(12)
        for _ in range(500):
            frame = random_frame(rng)
            assert decode_frame(encode_frame(frame)) == frame

    def test_session_must_be_integer(self):
        with pytest.raises(BadFrame, match="session not integer"):
            decode_frame(b'{"type":"key","session":"x","key":"a"}\n')

    def test_field_order_tolerated(self):
        frame = decode_frame(b'{"key":"a","session":1,"type":"key"}\n')
        assert frame == Key(session=1, key="a")

    def test_interior_whitespace_tolerated(self):
        frame = decode_frame(b'{ "type" : "key" , "session" : 1 , "key" : "a" }\n')
        assert frame == Key(session=1, key="a")

    def test_unknown_type(self):
        with pytest.raises(BadFrame, match="unknown type"):
            decode_frame(b'{"type":"mouse"}\n')

    def test_missing_field(self):
        with pytest.raises(BadFrame, match="missing field"):
            decode_frame(b'{"type":"key","session":1}\n')

    def test_malformed_json(self):
        with pytest.raises(BadFrame, match="malformed JSON"):
            decode_frame(b"{nope\n")

    def test_unknown_named_key(self):
        with pytest.raises(BadFrame, match="unknown named key"):
            decode_frame(b'{"type":"key","session":1,"key":"f1"}\n')

    def test_empty_key(self):
        with pytest.raises(BadFrame, match="empty key"):
            decode_frame(b'{"type":"key","session":1,"key":""}\n')

    def test_bool_session_rejected(self):
        with pytest.raises(BadFrame):
            decode_frame(b'{"type":"beep","session":true}\n')


class TestFraming:
    def test_reassembly_at_random_boundaries(self):
        rng = random.Random(34)
        frames = [random_frame(rng) for _ in range(200)]
        blob = b"".join(encode_frame(f) for f in frames)
        for trial in range(20):
            decoder = StreamDecoder()
            out = []
            i = 0
            while i < len(blob):
                j = min(len(blob), i + rng.randint(1, 17))
                out.extend(decoder.feed(blob[i:j]))
                i = j
            assert out == frames
            assert decoder.pending == b""

    def test_partial_line_pends(self):
        decoder = StreamDecoder()
        assert decoder.feed(b'{"type":"hello","ver') == []
        assert decoder.feed(b'sion":"1"}\n') == [Hello(version="1")]
