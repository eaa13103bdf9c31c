"""The `vanilla` command: validate | convert | import | repl | serve.

Key-stream files for `convert` use whitespace-separated tokens: a single
non-space character is a literal key; named keys are written `<space>`,
`<esc>`, `<bs>`, `<enter>`.
"""

from __future__ import annotations

import argparse
import asyncio
import os
import sys
from pathlib import Path

from . import cintable, storage
from .core import KeyEvent, VanillaError
from .engine import Session
from .server import BindFailure, ServerConfig, serve

NAMED_TOKENS = {
    "<space>": "space",
    "<esc>": "escape",
    "<bs>": "backspace",
    "<enter>": "enter",
}

PASSTHROUGH_TEXT = {"space": " ", "enter": "\n"}


class TokenError(VanillaError):
    def __init__(self, line: int, column: int, token: str):
        super().__init__(f"{line}:{column}: bad key token {token!r}")
        self.line = line
        self.column = column


def parse_tokens(text: str) -> list[KeyEvent]:
    """Parse a key-token stream; raises TokenError with position."""
    events = []
    for line_no, line in enumerate(text.split("\n"), start=1):
        column = 1
        for token in line.split():
            column = line.index(token, column - 1) + 1
            if len(token) == 1:
                events.append(KeyEvent.literal(token))
            elif token in NAMED_TOKENS:
                events.append(KeyEvent.named(NAMED_TOKENS[token]))
            else:
                raise TokenError(line_no, column, token)
            column += len(token)
    return events


def _load_table(path: Path):
    try:
        source = path.read_bytes()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None, 2
    table, diags = cintable.parse_cin(source)
    for d in diags:
        print(f"{d.severity}:{d.line}: {d.message}", file=sys.stderr)
    if any(d.severity == "fatal" for d in diags):
        return None, 1
    return table, 0


def _session_for(args) -> Session | None:
    if getattr(args, "db", None):
        try:
            store = storage.open_store(Path(args.db))
        except VanillaError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return None
        return Session(store, store.behavior(), store.keynames())
    table, code = _load_table(Path(args.table))
    if table is None:
        sys.exit(code)
    store = storage.build_store(table)
    return Session(store, table.behavior, table.keynames)


def cmd_validate(args) -> int:
    table, code = _load_table(Path(args.table))
    if table is None:
        return code
    for d in cintable.validate(table):
        print(f"{d.severity}:{d.line}: {d.message}", file=sys.stderr)
    return 0


def cmd_convert(args) -> int:
    session = _session_for(args)
    if session is None:
        return 1
    if args.keys == "-":
        text = sys.stdin.read()
    else:
        try:
            text = Path(args.keys).read_text(encoding="utf-8")
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    try:
        events = parse_tokens(text)
    except TokenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    beeps = 0
    out = sys.stdout
    for event in events:
        output = session.process_key(event)
        for committed in output.commits:
            if args.record_events:
                print(f"commit {committed}")
            else:
                out.write(committed)
        if not output.handled:
            literal = event.char if event.char is not None else PASSTHROUGH_TEXT.get(event.name, "")
            if args.record_events:
                print(f"passthrough {literal!r}")
            else:
                out.write(literal)
        if output.beep:
            beeps += 1
            if args.record_events:
                print("beep")
    out.flush()
    if beeps:
        print(f"{beeps} beep(s)", file=sys.stderr)
    return 0


def cmd_import(args) -> int:
    table, code = _load_table(Path(args.table))
    if table is None:
        return code if code == 1 else 2
    try:
        store = storage.import_table(table, Path(args.db))
    except storage.IoFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"{store.entry_count()} entries")
    store.close()
    return 0


def cmd_repl(args) -> int:
    session = _session_for(args)
    if session is None:
        return 1
    for line in sys.stdin:
        token = line.strip()
        if token == ":q":
            return 0
        if not token:
            continue
        if len(token) == 1:
            event = KeyEvent.literal(token)
        elif token in NAMED_TOKENS:
            event = KeyEvent.named(NAMED_TOKENS[token])
        else:
            print(f"unknown token {token!r}")
            continue
        output = session.process_key(event)
        for committed in output.commits:
            print(f"COMMIT {committed}")
        window = ""
        if output.window is not None:
            window = " ".join(f"{c.label}:{c.text}" for c in output.window.items)
        print(f"composing={output.view.composing} window=[{window}]")
    return 0


def _parse_addr(value: str) -> tuple[str, int]:
    host, sep, port = value.rpartition(":")
    if not sep or not port.isdigit():
        raise argparse.ArgumentTypeError(f"expected HOST:PORT, got {value!r}")
    return host, int(port)


def cmd_serve(args) -> int:
    tables = args.tables or os.environ.get("VANILLA_TABLES_DIR")
    if not tables:
        print("error: no tables directory (--tables or VANILLA_TABLES_DIR)", file=sys.stderr)
        return 1
    config = ServerConfig(
        tcp_host=args.tcp[0],
        tcp_port=args.tcp[1],
        ws_host=args.ws[0] if args.ws else None,
        ws_port=args.ws[1] if args.ws else None,
        tables_dir=Path(tables),
    )
    try:
        asyncio.run(serve(config))
    except (BindFailure, VanillaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        pass
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vanilla", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a table file")
    p.add_argument("table")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("convert", help="run a key stream through the engine")
    p.add_argument("table", nargs="?", default=None)
    p.add_argument("keys", help="token file, or - for stdin")
    p.add_argument("--db", help="use a persistent store instead of a table file")
    p.add_argument("--record-events", action="store_true",
                   help="emit one event per line instead of raw output")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("import", help="write a persistent store from a table")
    p.add_argument("table")
    p.add_argument("db")
    p.set_defaults(func=cmd_import)

    p = sub.add_parser("repl", help="interactive session, one token per line")
    p.add_argument("table", nargs="?", default=None)
    p.add_argument("--db", help="use a persistent store instead of a table file")
    p.set_defaults(func=cmd_repl)

    p = sub.add_parser("serve", help="run the text-service server")
    p.add_argument("--tcp", type=_parse_addr, default=("127.0.0.1", 9876), metavar="HOST:PORT")
    p.add_argument("--ws", type=_parse_addr, default=None, metavar="HOST:PORT")
    p.add_argument("--tables", default=None, metavar="DIR")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command in ("convert", "repl") and not args.db and not args.table:
        print("error: give a table file or --db", file=sys.stderr)
        return 1
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
