"""Interactive contraction sessions over HTTP with an append-only log."""

from .app import create_app, json_safe, summary
from .sessions import (
    ContractOutcome,
    NothingToUndo,
    SessionManager,
    SessionState,
    decode_request_rel,
    decode_source,
    run_contraction,
    source_payload,
)
from .store import SessionExists, SessionNotFound, SessionStore, canonical_json

__all__ = [
    "ContractOutcome",
    "NothingToUndo",
    "SessionExists",
    "SessionManager",
    "SessionNotFound",
    "SessionState",
    "SessionStore",
    "canonical_json",
    "create_app",
    "decode_request_rel",
    "decode_source",
    "json_safe",
    "run_contraction",
    "source_payload",
    "summary",
]
