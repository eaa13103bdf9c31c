from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vanilla.cintable import parse_cin
from vanilla.core import (
    CandidateList,
    CompositionView,
    DirUnreadable,
    DuplicateId,
    KeyEvent,
    ModuleDescriptor,
    Registry,
    ServiceContext,
)


class EchoModule:
    def __init__(self, module_id="echo"):
        self._id = module_id

    def descriptor(self):
        return ModuleDescriptor(id=self._id, display_name=self._id)

    def create_session(self, ctx):
        return object()


class TestKeyEvent:
    def test_literal_single_scalar(self):
        event = KeyEvent.literal("a")
        assert event.char == "a" and event.name is None

    def test_char_must_be_single_scalar(self):
        with pytest.raises(ValueError):
            KeyEvent.literal("ab")

    def test_named_carries_no_char(self):
        event = KeyEvent.named("space")
        assert event.char is None

    def test_unknown_named_key_rejected(self):
        with pytest.raises(ValueError):
            KeyEvent.named("f1")

    def test_unknown_modifier_rejected(self):
        with pytest.raises(ValueError):
            KeyEvent.literal("a", "hyper")


class TestViews:
    def test_cursor_bounds(self):
        with pytest.raises(ValueError):
            CompositionView(composing="AB", cursor=3)

    def test_candidate_labels_distinct(self):
        from vanilla.core import Candidate
        with pytest.raises(ValueError):
            CandidateList(items=(Candidate("1", "x"), Candidate("1", "y")))


class TestRegistry:
    def test_register_then_lookup(self):
        registry = Registry()
        module = EchoModule()
        registry.register(module)
        assert registry.lookup("echo") is module

    def test_duplicate_id(self):
        registry = Registry()
        registry.register(EchoModule("demo"))
        with pytest.raises(DuplicateId):
            registry.register(EchoModule("demo"))

    def test_listing_preserves_registration_order(self):
        registry = Registry()
        for module_id in ("m1", "m2", "m3"):
            registry.register(EchoModule(module_id))
        assert [d.id for d in registry.list_modules()] == ["m1", "m2", "m3"]

    def test_lookup_total_after_register(self):
        registry = Registry()
        ids = [f"mod-{i}" for i in range(10)]
        for module_id in ids:
            registry.register(EchoModule(module_id))
        for module_id in ids:
            assert registry.lookup(module_id).descriptor().id == module_id


class TestDiscovery:
    def test_fixture_dir(self, tmp_path, t1_source):
        (tmp_path / "T1.cin").write_text(t1_source, encoding="utf-8")
        registry = Registry()
        found = registry.discover_tables(tmp_path)
        assert [d.id for d in found] == ["table:T1"]
        assert registry.lookup("table:T1") is not None

    def test_empty_dir(self, tmp_path):
        assert Registry().discover_tables(tmp_path) == []

    def test_malformed_file_skipped_and_notified(self, tmp_path, t1_source):
        (tmp_path / "T1.cin").write_text(t1_source, encoding="utf-8")
        (tmp_path / "bad.cin").write_text("%ename broken\n", encoding="utf-8")
        messages = []
        ctx = ServiceContext(notify=messages.append)
        found = Registry().discover_tables(tmp_path, ctx)
        assert [d.id for d in found] == ["table:T1"]
        assert len(messages) == 1 and "bad.cin" in messages[0]

    def test_missing_dir(self, tmp_path):
        with pytest.raises(DirUnreadable):
            Registry().discover_tables(tmp_path / "nope")

    def test_table_module_session(self, tmp_path, t1_source):
        (tmp_path / "T1.cin").write_text(t1_source, encoding="utf-8")
        registry = Registry()
        registry.discover_tables(tmp_path)
        session = registry.lookup("table:T1").create_session(ServiceContext())
        output = session.process_key(KeyEvent.literal("a"))
        assert output.view.composing == "A"


@given(st.binary(max_size=64))
@settings(max_examples=200, deadline=None)
def test_arbitrary_bytes_rejected_or_preserved(blob):
    """Byte strings fed to text-accepting entry points either fail to
    decode (rejected via diagnostics) or survive losslessly."""
    table, diags = parse_cin(blob)
    try:
        text = blob.decode("utf-8")
    except UnicodeDecodeError:
        assert any(d.severity == "fatal" for d in diags)
    else:
        for seq, out in table.chardefs:
            assert seq in text and out in text
