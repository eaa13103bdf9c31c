"""Parser, validator and serializer for the ".cin" table dialect.

A table file has two sections, ``%keyname begin``..``%keyname end`` and
``%chardef begin``..``%chardef end``, plus header directives.  Behavior
directives recognized by this dialect:

    %selkey CHARS            selection keys, in order
    %ov_autocompose BOOL     show candidates as you type
    %ov_maxseq N             maximum key sequence length
    %ov_commitatmax BOOL     commit when the sequence reaches N
    %ov_spacesel BOOL        space commits the first candidate

All five are optional; defaults are applied when absent.  Lines starting
with ``#`` and blank lines are ignored; fields are separated by runs of
ASCII spaces or tabs.  Encoding is UTF-8 without BOM, LF line ends (CRLF
accepted and normalized).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

DEFAULT_SELECTION_KEYS = "123456789"


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "fatal" or "warning"
    line: int  # 1-based; 0 when not tied to a line
    message: str


@dataclass(frozen=True)
class BehaviorConfig:
    """The five shared behavior variables of the table dialect."""

    autocompose: bool = False
    max_seq_len: int = 1
    commit_at_max: bool = False
    selection_keys: str = DEFAULT_SELECTION_KEYS
    space_selects_first: bool = True

    def __post_init__(self):
        if self.max_seq_len < 1:
            raise ValueError("max_seq_len must be positive")
        if not self.selection_keys:
            raise ValueError("selection_keys must be nonempty")
        if len(set(self.selection_keys)) != len(self.selection_keys):
            raise ValueError("selection_keys must be distinct")
        if any(c.isspace() for c in self.selection_keys):
            raise ValueError("selection_keys may not contain whitespace")


@dataclass(frozen=True)
class CinTable:
    ename: str = ""
    cname: str = ""
    keynames: dict[str, str] = field(default_factory=dict)
    chardefs: tuple[tuple[str, str], ...] = ()
    behavior: BehaviorConfig = BehaviorConfig()

    def __eq__(self, other):
        if not isinstance(other, CinTable):
            return NotImplemented
        # dict equality ignores insertion order; keyname order is part of
        # the table (serialization preserves it), so compare items.
        return (
            self.ename == other.ename
            and self.cname == other.cname
            and list(self.keynames.items()) == list(other.keynames.items())
            and self.chardefs == other.chardefs
            and self.behavior == other.behavior
        )

    __hash__ = None


_BOOL_WORDS = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}

_SECTIONS = ("keyname", "chardef")


def _parse_bool(word: str) -> bool | None:
    return _BOOL_WORDS.get(word.lower())


def parse_cin(source) -> tuple[CinTable, list[Diagnostic]]:
    """Parse table text into (CinTable, diagnostics).

    Never raises on malformed input: problems come back as diagnostics,
    fatal ones meaning the table is unusable.  ``source`` may be str or
    UTF-8 bytes; invalid UTF-8 is a fatal diagnostic.
    """
    diags: list[Diagnostic] = []
    if isinstance(source, (bytes, bytearray)):
        try:
            source = bytes(source).decode("utf-8")
        except UnicodeDecodeError as exc:
            return CinTable(), [Diagnostic("fatal", 0, f"invalid UTF-8: {exc}")]

    ename = ""
    cname = ""
    keynames: dict[str, str] = {}
    chardefs: list[tuple[str, str]] = []
    seen_pairs: set[tuple[str, str]] = set()
    directives: dict[str, tuple[int, str]] = {}
    sections_seen: set[str] = set()
    section: str | None = None

    def fatal(line_no: int, message: str):
        diags.append(Diagnostic("fatal", line_no, message))

    def warn(line_no: int, message: str):
        diags.append(Diagnostic("warning", line_no, message))

    for line_no, raw in enumerate(source.replace("\r\n", "\n").split("\n"), start=1):
        line = raw.strip(" \t")
        if not line or line.startswith("#"):
            continue
        fields = [f for f in line.replace("\t", " ").split(" ") if f]
        if fields[0].startswith("%"):
            name = fields[0][1:]
            if name in _SECTIONS:
                if len(fields) != 2 or fields[1] not in ("begin", "end"):
                    fatal(line_no, f"malformed %{name} directive")
                    continue
                if fields[1] == "begin":
                    if section is not None:
                        fatal(line_no, f"%{name} begin inside %{section} block")
                        continue
                    if name in sections_seen:
                        fatal(line_no, f"duplicate %{name} block")
                        continue
                    section = name
                    sections_seen.add(name)
                else:
                    if section != name:
                        fatal(line_no, f"%{name} end without matching begin")
                        continue
                    section = None
                continue
            if section is not None:
                fatal(line_no, f"directive %{name} inside %{section} block")
                continue
            if len(fields) < 2:
                fatal(line_no, f"directive %{name} missing value")
                continue
            value = " ".join(fields[1:])
            if name == "ename":
                ename = value
            elif name == "cname":
                cname = value
            elif name in ("selkey", "ov_autocompose", "ov_maxseq", "ov_commitatmax", "ov_spacesel"):
                directives[name] = (line_no, value)
            else:
                warn(line_no, f"unknown directive %{name} ignored")
            continue

        if section == "keyname":
            if len(fields) != 2:
                fatal(line_no, "keyname entry needs exactly key and label")
                continue
            key, label = fields
            if len(key) != 1:
                fatal(line_no, f"keyname key must be one character: {key!r}")
                continue
            if key in keynames:
                warn(line_no, f"duplicate keyname for {key!r}, keeping first")
                continue
            keynames[key] = label
        elif section == "chardef":
            if len(fields) != 2:
                fatal(line_no, "chardef entry needs exactly sequence and text")
                continue
            seq, text = fields
            missing = [c for c in seq if c not in keynames]
            if missing:
                fatal(line_no, f"chardef key {missing[0]!r} not in keynames")
                continue
            if (seq, text) in seen_pairs:
                warn(line_no, f"duplicate chardef ({seq!r}, {text!r}) dropped")
                continue
            seen_pairs.add((seq, text))
            chardefs.append((seq, text))
        else:
            fatal(line_no, f"unexpected line outside any block: {line!r}")

    if section is not None:
        fatal(0, f"unterminated %{section} block")
    if "chardef" not in sections_seen:
        fatal(0, "missing %chardef begin/end block")
    elif not chardefs:
        warn(0, "empty chardef")

    behavior, behavior_diags = _build_behavior(directives, chardefs)
    diags.extend(behavior_diags)

    table = CinTable(
        ename=ename,
        cname=cname,
        keynames=keynames,
        chardefs=tuple(chardefs),
        behavior=behavior,
    )
    return table, diags


def _build_behavior(directives, chardefs) -> tuple[BehaviorConfig, list[Diagnostic]]:
    diags: list[Diagnostic] = []
    longest = max((len(s) for s, _ in chardefs), default=1)
    autocompose = False
    max_seq_len = longest
    commit_at_max = False
    selection_keys = DEFAULT_SELECTION_KEYS
    space_selects_first = True

    if "selkey" in directives:
        line_no, value = directives["selkey"]
        if len(set(value)) != len(value) or any(c.isspace() for c in value):
            diags.append(Diagnostic("fatal", line_no, "selkey characters must be distinct and non-whitespace"))
        else:
            selection_keys = value
    if "ov_maxseq" in directives:
        line_no, value = directives["ov_maxseq"]
        if value.isdigit() and int(value) >= 1:
            max_seq_len = int(value)
        else:
            diags.append(Diagnostic("fatal", line_no, f"%ov_maxseq needs a positive integer, got {value!r}"))
    for name, setter in (
        ("ov_autocompose", "autocompose"),
        ("ov_commitatmax", "commit_at_max"),
        ("ov_spacesel", "space_selects_first"),
    ):
        if name in directives:
            line_no, value = directives[name]
            parsed = _parse_bool(value)
            if parsed is None:
                diags.append(Diagnostic("fatal", line_no, f"%{name} needs true or false, got {value!r}"))
            elif setter == "autocompose":
                autocompose = parsed
            elif setter == "commit_at_max":
                commit_at_max = parsed
            else:
                space_selects_first = parsed

    behavior = BehaviorConfig(
        autocompose=autocompose,
        max_seq_len=max_seq_len,
        commit_at_max=commit_at_max,
        selection_keys=selection_keys,
        space_selects_first=space_selects_first,
    )
    return behavior, diags


def serialize_cin(table: CinTable) -> str:
    """Render a table back to text; parse(serialize(t)) is structurally t."""
    lines: list[str] = []
    if table.ename:
        lines.append(f"%ename {table.ename}")
    if table.cname:
        lines.append(f"%cname {table.cname}")
    lines.append(f"%selkey {table.behavior.selection_keys}")
    lines.append(f"%ov_maxseq {table.behavior.max_seq_len}")
    lines.append(f"%ov_autocompose {'true' if table.behavior.autocompose else 'false'}")
    lines.append(f"%ov_commitatmax {'true' if table.behavior.commit_at_max else 'false'}")
    lines.append(f"%ov_spacesel {'true' if table.behavior.space_selects_first else 'false'}")
    lines.append("%keyname begin")
    for key, label in table.keynames.items():
        lines.append(f"{key} {label}")
    lines.append("%keyname end")
    lines.append("%chardef begin")
    for seq, text in table.chardefs:
        lines.append(f"{seq} {text}")
    lines.append("%chardef end")
    return "\n".join(lines) + "\n"


def validate(table: CinTable) -> list[Diagnostic]:
    """Lint a parsed table; returns warnings only."""
    diags: list[Diagnostic] = []
    for seq, text in table.chardefs:
        if len(seq) > table.behavior.max_seq_len:
            diags.append(Diagnostic(
                "warning", 0,
                f"chardef sequence {seq!r} longer than max_seq_len {table.behavior.max_seq_len}",
            ))
    for key in table.behavior.selection_keys:
        if key in table.keynames:
            diags.append(Diagnostic("warning", 0, f"selection key {key!r} shadows keyname"))
    used = {c for seq, _ in table.chardefs for c in seq}
    for key in table.keynames:
        if key not in used:
            diags.append(Diagnostic("warning", 0, f"keyname {key!r} never used by any chardef"))
    return diags
