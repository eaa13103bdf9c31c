"""Table-driven input method engine, wildcard table store, and a
socket-based text-service server with a line-delimited JSON protocol."""

from .cintable import BehaviorConfig, CinTable, Diagnostic, parse_cin, serialize_cin, validate
from .core import (
    Candidate,
    CandidateList,
    CompositionView,
    KeyEvent,
    ModuleDescriptor,
    Registry,
    ServiceContext,
    TableModule,
)
from .engine import EngineOutput, Session, new_session
from .storage import build_store, import_table, open_store

__all__ = [
    "BehaviorConfig",
    "Candidate",
    "CandidateList",
    "CinTable",
    "CompositionView",
    "Diagnostic",
    "EngineOutput",
    "KeyEvent",
    "ModuleDescriptor",
    "Registry",
    "ServiceContext",
    "Session",
    "TableModule",
    "build_store",
    "import_table",
    "new_session",
    "open_store",
    "parse_cin",
    "serialize_cin",
    "validate",
]
