"""Table stores: in-memory index and persistent SQLite-backed store.

Both backends answer exact, prefix-extension and glob queries with
identical ordered results (the backend-equivalence law).  Ordering is
(lexicographic sequence, file rank); texts for one sequence keep their
file order, which is what candidate ranking depends on.
"""

from __future__ import annotations

import bisect
import re
import sqlite3
from pathlib import Path

from .cintable import BehaviorConfig, CinTable
from .core import VanillaError

SCHEMA_VERSION = 1

METACHARS = frozenset("*?")


class BadPattern(VanillaError):
    def __init__(self, pattern: str, reason: str):
        super().__init__(f"bad pattern {pattern!r}: {reason}")
        self.pattern = pattern


class IoFailure(VanillaError):
    def __init__(self, path: Path, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path


class SchemaMismatch(VanillaError):
    def __init__(self, found: int, expected: int):
        super().__init__(f"store schema version {found}, expected {expected}")
        self.found = found
        self.expected = expected


def compile_pattern(pattern: str, key_chars: frozenset[str]):
    """Validate a glob pattern and compile it to a matcher.

    ``*`` matches zero or more key chars, ``?`` exactly one; every other
    character must be a key char of the table.
    """
    if not pattern:
        raise BadPattern(pattern, "empty pattern")
    parts = []
    for ch in pattern:
        if ch == "*":
            parts.append(".*")
        elif ch == "?":
            parts.append(".")
        elif ch in key_chars:
            parts.append(re.escape(ch))
        else:
            raise BadPattern(pattern, f"{ch!r} is not a key char or metacharacter")
    return re.compile("".join(parts) + r"\Z", re.DOTALL).match


def _has_extensions(sorted_sequences: list[str], sequence: str) -> bool:
    # Any strict extension of `sequence` sorts immediately after it.
    i = bisect.bisect_right(sorted_sequences, sequence)
    return i < len(sorted_sequences) and sorted_sequences[i].startswith(sequence)


class MemoryStore:
    """Read-only index over a table's chardef list."""

    def __init__(self, table: CinTable):
        self._by_seq: dict[str, list[str]] = {}
        for seq, text in table.chardefs:
            self._by_seq.setdefault(seq, []).append(text)
        self._sequences = sorted(self._by_seq)
        self._count = len(table.chardefs)
        self.key_chars = frozenset(table.keynames)

    def entry_count(self) -> int:
        return self._count

    def lookup_exact(self, sequence: str) -> list[str]:
        return list(self._by_seq.get(sequence, ()))

    def has_extensions(self, sequence: str) -> bool:
        return _has_extensions(self._sequences, sequence)

    def match_glob(self, pattern: str) -> list[tuple[str, list[str]]]:
        match = compile_pattern(pattern, self.key_chars)
        return [(seq, list(self._by_seq[seq])) for seq in self._sequences if match(seq)]


def build_store(table: CinTable) -> MemoryStore:
    return MemoryStore(table)


_SCHEMA = """
CREATE TABLE meta (key TEXT PRIMARY KEY, value TEXT NOT NULL);
CREATE TABLE keyname (pos INTEGER PRIMARY KEY, key TEXT NOT NULL, label TEXT NOT NULL);
CREATE TABLE chardef (rank INTEGER PRIMARY KEY, seq TEXT NOT NULL, text TEXT NOT NULL);
CREATE INDEX chardef_seq ON chardef (seq, rank);
"""


def import_table(table: CinTable, path) -> "SqliteStore":
    """Write a single-file persistent store for the table and open it."""
    path = Path(path)
    try:
        if path.exists():
            path.unlink()
        conn = sqlite3.connect(path)
    except (OSError, sqlite3.Error) as exc:
        raise IoFailure(path, str(exc)) from exc
    try:
        with conn:
            conn.executescript(_SCHEMA)
            meta = {
                "schema_version": str(SCHEMA_VERSION),
                "ename": table.ename,
                "cname": table.cname,
                "autocompose": str(int(table.behavior.autocompose)),
                "max_seq_len": str(table.behavior.max_seq_len),
                "commit_at_max": str(int(table.behavior.commit_at_max)),
                "selection_keys": table.behavior.selection_keys,
                "space_selects_first": str(int(table.behavior.space_selects_first)),
            }
            conn.executemany("INSERT INTO meta VALUES (?, ?)", meta.items())
            conn.executemany(
                "INSERT INTO keyname VALUES (?, ?, ?)",
                [(i, k, v) for i, (k, v) in enumerate(table.keynames.items())],
            )
            conn.executemany(
                "INSERT INTO chardef VALUES (?, ?, ?)",
                [(i, s, t) for i, (s, t) in enumerate(table.chardefs)],
            )
    except sqlite3.Error as exc:
        conn.close()
        raise IoFailure(path, str(exc)) from exc
    conn.close()
    return open_store(path)


def open_store(path) -> "SqliteStore":
    """Reopen a store written by import_table."""
    path = Path(path)
    if not path.is_file():
        raise IoFailure(path, "no such file")
    try:
        conn = sqlite3.connect(f"file:{path}?mode=ro", uri=True)
        row = conn.execute("SELECT value FROM meta WHERE key = 'schema_version'").fetchone()
    except sqlite3.Error as exc:
        raise IoFailure(path, str(exc)) from exc
    if row is None:
        conn.close()
        raise SchemaMismatch(0, SCHEMA_VERSION)
    found = int(row[0])
    if found != SCHEMA_VERSION:
        conn.close()
        raise SchemaMismatch(found, SCHEMA_VERSION)
    return SqliteStore(conn)


class SqliteStore:
    """Read-only view over a single-file store."""

    def __init__(self, conn: sqlite3.Connection):
        self._conn = conn
        self._sequences: list[str] | None = None
        keys = [row[0] for row in conn.execute("SELECT key FROM keyname ORDER BY pos")]
        self.key_chars = frozenset(keys)

    def close(self):
        self._conn.close()

    @property
    def ename(self) -> str:
        return self._meta("ename")

    def _meta(self, key: str) -> str:
        row = self._conn.execute("SELECT value FROM meta WHERE key = ?", (key,)).fetchone()
        return "" if row is None else row[0]

    def keynames(self) -> dict[str, str]:
        return dict(self._conn.execute("SELECT key, label FROM keyname ORDER BY pos"))

    def behavior(self) -> BehaviorConfig:
        return BehaviorConfig(
            autocompose=self._meta("autocompose") == "1",
            max_seq_len=int(self._meta("max_seq_len")),
            commit_at_max=self._meta("commit_at_max") == "1",
            selection_keys=self._meta("selection_keys"),
            space_selects_first=self._meta("space_selects_first") == "1",
        )

    def entry_count(self) -> int:
        return self._conn.execute("SELECT count(*) FROM chardef").fetchone()[0]

    def lookup_exact(self, sequence: str) -> list[str]:
        rows = self._conn.execute(
            "SELECT text FROM chardef WHERE seq = ? ORDER BY rank", (sequence,)
        )
        return [r[0] for r in rows]

    def _all_sequences(self) -> list[str]:
        if self._sequences is None:
            rows = self._conn.execute("SELECT DISTINCT seq FROM chardef")
            self._sequences = sorted(r[0] for r in rows)
        return self._sequences

    def has_extensions(self, sequence: str) -> bool:
        return _has_extensions(self._all_sequences(), sequence)

    def match_glob(self, pattern: str) -> list[tuple[str, list[str]]]:
        match = compile_pattern(pattern, self.key_chars)
        return [(seq, self.lookup_exact(seq)) for seq in self._all_sequences() if match(seq)]
