import random

import pytest

from oracles import random_pattern, random_table, scan_exact, scan_extensions, scan_glob
from vanilla.cintable import CinTable, BehaviorConfig
from vanilla.storage import (
    SCHEMA_VERSION,
    BadPattern,
    IoFailure,
    SchemaMismatch,
    build_store,
    import_table,
    open_store,
)


@pytest.fixture
def store(t1):
    return build_store(t1)


class TestMemoryStore:
    def test_entry_count(self, store):
        assert store.entry_count() == 4

    def test_empty_table(self):
        empty = CinTable(keynames={"a": "A"}, behavior=BehaviorConfig(max_seq_len=1))
        assert build_store(empty).entry_count() == 0

    def test_lookup_exact_file_order(self, store):
        assert store.lookup_exact("a") == ["日", "月"]
        assert store.lookup_exact("ab") == ["明"]

    def test_lookup_exact_miss(self, store):
        assert store.lookup_exact("zz") == []

    def test_has_extensions(self, store):
        assert store.has_extensions("a") is True
        assert store.has_extensions("ab") is False
        assert store.has_extensions("b") is False

    def test_random_lookup_matches_linear_scan(self):
        rng = random.Random(7)
        table = random_table(rng, max_entries=1000)
        s = build_store(table)
        for seq, _ in table.chardefs:
            assert s.lookup_exact(seq) == scan_exact(table.chardefs, seq)
            assert s.has_extensions(seq) == scan_extensions(table.chardefs, seq)


class TestGlob:
    def test_star_matches_zero_or_more(self, store):
        assert store.match_glob("a*") == [("a", ["日", "月"]), ("ab", ["明"])]

    def test_question_exactly_one(self, store):
        assert store.match_glob("?b") == [("ab", ["明"])]

    def test_star_alone(self, store):
        assert [s for s, _ in store.match_glob("*")] == ["a", "ab", "b"]

    def test_bad_pattern_empty(self, store):
        with pytest.raises(BadPattern):
            store.match_glob("")

    def test_bad_pattern_foreign_char(self, store):
        with pytest.raises(BadPattern):
            store.match_glob("a%")

    def test_matches_naive_matcher(self):
        rng = random.Random(99)
        for _ in range(30):
            table = random_table(rng)
            s = build_store(table)
            for _ in range(20):
                pattern = random_pattern(rng, s.key_chars)
                assert s.match_glob(pattern) == scan_glob(table.chardefs, pattern)

    def test_ordering_stable(self, store):
        first = store.match_glob("a*")
        for _ in range(5):
            assert store.match_glob("a*") == first


class TestPersistentStore:
    def test_import_and_reopen(self, t1, tmp_path):
        path = tmp_path / "t1.db"
        imported = import_table(t1, path)
        imported.close()
        reopened = open_store(path)
        assert reopened.lookup_exact("ab") == ["明"]
        assert reopened.entry_count() == 4
        assert reopened.ename == "demo"
        reopened.close()

    def test_reopen_missing_path(self, tmp_path):
        with pytest.raises(IoFailure):
            open_store(tmp_path / "absent.db")

    def test_schema_mismatch(self, t1, tmp_path, monkeypatch):
        path = tmp_path / "t1.db"
        import_table(t1, path).close()
        monkeypatch.setattr("vanilla.storage.SCHEMA_VERSION", SCHEMA_VERSION + 1)
        with pytest.raises(SchemaMismatch) as info:
            open_store(path)
        assert info.value.found == SCHEMA_VERSION
        assert info.value.expected == SCHEMA_VERSION + 1

    def test_unwritable_path(self, t1):
        with pytest.raises(IoFailure):
            import_table(t1, "/proc/denied/t1.db")

    def test_behavior_and_keynames_round_trip(self, t1, tmp_path):
        path = tmp_path / "t1.db"
        s = import_table(t1, path)
        assert s.behavior() == t1.behavior
        assert s.keynames() == t1.keynames
        s.close()


class TestBackendEquivalence:
    def queries(self, table, rng):
        sequences = sorted({s for s, _ in table.chardefs})
        for seq in sequences:
            yield ("exact", seq)
            yield ("prefix", seq)
        for _ in range(10):
            yield ("glob", random_pattern(rng, frozenset(table.keynames)))

    def check(self, table, tmp_path, name, rng):
        mem = build_store(table)
        db = import_table(table, tmp_path / f"{name}.db")
        for kind, arg in self.queries(table, rng):
            if kind == "exact":
                assert mem.lookup_exact(arg) == db.lookup_exact(arg)
            elif kind == "prefix":
                assert mem.has_extensions(arg) == db.has_extensions(arg)
            else:
                try:
                    expected = mem.match_glob(arg)
                except BadPattern:
                    with pytest.raises(BadPattern):
                        db.match_glob(arg)
                else:
                    assert db.match_glob(arg) == expected
        db.close()

    def test_t1(self, t1, tmp_path):
        self.check(t1, tmp_path, "t1", random.Random(1))

    def test_random_tables(self, tmp_path):
        rng = random.Random(4242)
        for i in range(25):
            self.check(random_table(rng), tmp_path, f"r{i}", rng)
