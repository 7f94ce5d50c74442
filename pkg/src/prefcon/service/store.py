"""Append-only session log on disk.

One JSONL file per session under the data directory; the first line
creates the session, every later line is one change step. Records are
written with flush+fsync before the caller answers, so a crash leaves
at worst a complete prefix of the history, which replays cleanly.
"""

from __future__ import annotations

import json
import os
import re
from pathlib import Path
from typing import List

from ..errors import PrefconError, ValidationError

_ID_RE = re.compile(r"^[A-Za-z0-9_-]{1,64}$")


class SessionExists(PrefconError):
    code = "SESSION_EXISTS"


class SessionNotFound(PrefconError):
    code = "SESSION_NOT_FOUND"


def canonical_json(doc) -> str:
    """Single canonical rendering; exports must be byte-stable across
    restarts, so every serialization in the service funnels through here."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def check_session_id(session_id: str) -> str:
    if not isinstance(session_id, str) or not _ID_RE.match(session_id):
        raise ValidationError(
            "session id must be 1-64 characters of [A-Za-z0-9_-]", id=session_id
        )
    return session_id


class SessionStore:
    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)

    def _path(self, session_id: str) -> Path:
        return self.data_dir / f"{check_session_id(session_id)}.jsonl"

    def exists(self, session_id: str) -> bool:
        return self._path(session_id).exists()

    def ids(self) -> List[str]:
        return sorted(p.stem for p in self.data_dir.glob("*.jsonl"))

    def create(self, session_id: str, record: dict) -> None:
        path = self._path(session_id)
        try:
            fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_EXCL, 0o644)
        except FileExistsError:
            raise SessionExists(f"session {session_id!r} already exists", id=session_id) from None
        with os.fdopen(fd, "w") as fh:
            fh.write(canonical_json(record) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def append(self, session_id: str, record: dict) -> None:
        path = self._path(session_id)
        if not path.exists():
            raise SessionNotFound(f"no session {session_id!r}", id=session_id)
        with open(path, "a") as fh:
            fh.write(canonical_json(record) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def read(self, session_id: str) -> List[dict]:
        path = self._path(session_id)
        try:
            text = path.read_text()
        except FileNotFoundError:
            raise SessionNotFound(f"no session {session_id!r}", id=session_id) from None
        records = []
        for line in text.splitlines():
            if line.strip():
                records.append(json.loads(line))
        if not records:
            raise SessionNotFound(f"session {session_id!r} has an empty log", id=session_id)
        return records
