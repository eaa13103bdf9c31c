"""Shared domain types, the input-module contract, and the module registry.

Everything that crosses a module boundary lives here: key events, the
display-facing composition view, the candidate window model, the service
callbacks handed to sessions, and the registry that tracks available
input modules (built-in or table files discovered on disk).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Protocol, runtime_checkable

NAMED_KEYS = frozenset({"space", "escape", "backspace", "enter"})
MODIFIERS = frozenset({"shift", "ctrl", "alt"})

# Colon separates the source prefix ("table:") from the stem; stems keep
# their on-disk case.
_ID_RE = re.compile(r"^[A-Za-z0-9_.:-]+$")


class VanillaError(Exception):
    """Base class for all errors raised by this package."""


class DuplicateId(VanillaError):
    def __init__(self, module_id: str):
        super().__init__(f"module id already registered: {module_id!r}")
        self.module_id = module_id


class DirUnreadable(VanillaError):
    def __init__(self, path: Path):
        super().__init__(f"directory not readable: {path}")
        self.path = path


@dataclass(frozen=True)
class KeyEvent:
    """One keystroke: either a literal character or a named key.

    ``char`` holds exactly one Unicode scalar for literal keys and is
    None for named keys; ``name`` is one of NAMED_KEYS for named keys
    and None otherwise.
    """

    char: Optional[str] = None
    name: Optional[str] = None
    modifiers: frozenset[str] = frozenset()

    def __post_init__(self):
        if (self.char is None) == (self.name is None):
            raise ValueError("KeyEvent needs exactly one of char or name")
        if self.char is not None and len(self.char) != 1:
            raise ValueError("char must be a single Unicode scalar")
        if self.name is not None and self.name not in NAMED_KEYS:
            raise ValueError(f"unknown named key: {self.name!r}")
        bad = set(self.modifiers) - MODIFIERS
        if bad:
            raise ValueError(f"unknown modifiers: {sorted(bad)}")

    @staticmethod
    def literal(char: str, *modifiers: str) -> "KeyEvent":
        return KeyEvent(char=char, modifiers=frozenset(modifiers))

    @staticmethod
    def named(name: str, *modifiers: str) -> "KeyEvent":
        return KeyEvent(name=name, modifiers=frozenset(modifiers))


@dataclass(frozen=True)
class CompositionView:
    """Display projection of the uncommitted reading.

    ``composing`` is built from keyname display labels, never raw key
    chars; ``cursor`` is an index in display units and sits at the end.
    """

    composing: str = ""
    cursor: int = 0

    def __post_init__(self):
        if not 0 <= self.cursor <= len(self.composing):
            raise ValueError("cursor out of range")


@dataclass(frozen=True)
class Candidate:
    label: str
    text: str


@dataclass(frozen=True)
class CandidateList:
    """One visible page of the candidate window.

    Labels are drawn from the table's selection keys in order and are
    distinct within the page.
    """

    items: tuple[Candidate, ...]
    highlighted: int = 0
    page: int = 0
    page_size: int = 1

    def __post_init__(self):
        if self.page_size < 1:
            raise ValueError("page_size must be positive")
        if self.items:
            if not 0 <= self.highlighted < len(self.items):
                raise ValueError("highlighted out of range")
            labels = [c.label for c in self.items]
            if len(set(labels)) != len(labels):
                raise ValueError("labels must be distinct within a page")


@dataclass
class ServiceContext:
    """Callbacks and environment handed to a session by its host."""

    notify: Callable[[str], None] = lambda message: None
    beep: Callable[[], None] = lambda: None
    locale: str = "en"
    user_data_dir: Path = field(default_factory=Path.cwd)


@dataclass(frozen=True)
class ModuleDescriptor:
    id: str
    display_name: str
    localized_names: tuple[tuple[str, str], ...] = ()
    source: str = "builtin"  # "builtin" or "table:<path>"

    def __post_init__(self):
        if not _ID_RE.match(self.id):
            raise ValueError(f"bad module id: {self.id!r}")

    def name_for(self, locale: str) -> str:
        for tag, name in self.localized_names:
            if tag == locale:
                return name
        return self.display_name


@runtime_checkable
class InputModule(Protocol):
    """Contract every input module satisfies."""

    def descriptor(self) -> ModuleDescriptor: ...

    def create_session(self, ctx: ServiceContext): ...


class Registry:
    """In-process module registry; registration order is preserved."""

    def __init__(self):
        self._modules: dict[str, InputModule] = {}

    def register(self, module: InputModule) -> None:
        module_id = module.descriptor().id
        if module_id in self._modules:
            raise DuplicateId(module_id)
        self._modules[module_id] = module

    def lookup(self, module_id: str) -> Optional[InputModule]:
        return self._modules.get(module_id)

    def list_modules(self) -> list[ModuleDescriptor]:
        return [m.descriptor() for m in self._modules.values()]

    def discover_tables(self, directory: Path, ctx: Optional[ServiceContext] = None) -> list[ModuleDescriptor]:
        """Register one TableModule per parseable ``.cin`` file in directory.

        Files with fatal diagnostics are skipped and reported through
        ``ctx.notify``. Returns the descriptors of the newly registered
        modules.
        """
        from .cintable import parse_cin

        directory = Path(directory)
        if not directory.is_dir():
            raise DirUnreadable(directory)
        ctx = ctx or ServiceContext()
        found: list[ModuleDescriptor] = []
        try:
            entries = sorted(directory.iterdir())
        except OSError as exc:
            raise DirUnreadable(directory) from exc
        for path in entries:
            if path.suffix != ".cin" or not path.is_file():
                continue
            try:
                source = path.read_bytes().decode("utf-8")
            except (OSError, UnicodeDecodeError) as exc:
                ctx.notify(f"skipped {path.name}: {exc}")
                continue
            table, diagnostics = parse_cin(source)
            fatals = [d for d in diagnostics if d.severity == "fatal"]
            if fatals:
                ctx.notify(f"skipped {path.name}: {fatals[0].message} (line {fatals[0].line})")
                continue
            module = TableModule(table, path)
            try:
                self.register(module)
            except DuplicateId:
                ctx.notify(f"skipped {path.name}: duplicate module id")
                continue
            found.append(module.descriptor())
        return found


class TableModule:
    """Input module backed by a parsed table file."""

    def __init__(self, table, path: Path):
        self._table = table
        self._path = Path(path)
        self._store = None

    @property
    def table(self):
        return self._table

    def descriptor(self) -> ModuleDescriptor:
        localized = ()
        if self._table.cname:
            localized = (("zh", self._table.cname),)
        return ModuleDescriptor(
            id=f"table:{self._path.stem}",
            display_name=self._table.ename or self._path.stem,
            localized_names=localized,
            source=f"table:{self._path}",
        )

    def create_session(self, ctx: ServiceContext):
        from .engine import Session
        from .storage import build_store

        if self._store is None:
            self._store = build_store(self._table)
        return Session(self._store, self._table.behavior, self._table.keynames, ctx=ctx)
