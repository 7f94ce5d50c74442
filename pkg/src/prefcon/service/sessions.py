"""Session state, change steps, and replay.

A session's log stores inputs, never derived state: the create record
pins schema, dataset, and the starting preference source; each contract
record pins the requested mode and the discard/protect payloads. All
engine calls are deterministic, so replaying the log reproduces the
current source (and every digest) exactly. Undo pops one contraction
off the source stack while the log keeps growing.
"""

from __future__ import annotations

import hashlib
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Dict, List, Optional, Tuple, Union

from ..contract import (
    meet_contr,
    meet_contr_protecting,
    meet_contr_symbolic,
    min_contr_finite,
    min_contr_protecting,
    min_contr_protecting_symbolic,
    min_contr_symbolic,
)
from ..contract.finite import MEET, PREFIX, PROTECTING, PROTECTING_MEET
from ..contract.symbolic import encode_edges
from ..errors import ConNotSubset, PrefconError, ValidationError
from ..formula import (
    DnfFormula,
    Schema,
    and_not,
    parse_formula,
    satisfiable,
    to_source,
    value_to_text,
)
from ..relation import FiniteRelation, require_spo
from ..winnow import Dataset, winnow, winnow_after_contraction
from .store import SessionStore, canonical_json, check_session_id

Source = Union[FiniteRelation, DnfFormula]


class NothingToUndo(PrefconError):
    code = "NOTHING_TO_UNDO"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def source_payload(source: Source) -> dict:
    if isinstance(source, FiniteRelation):
        return {"kind": "finite", "edges": [list(e) for e in source.sorted_edges()]}
    return {"kind": "formula", "text": to_source(source)}


def digest(doc) -> str:
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


def _decode_edges(doc) -> FiniteRelation:
    edges = doc.get("edges")
    if not isinstance(edges, list):
        raise ValidationError("edge payload needs an 'edges' array of [from, to] pairs")
    out = []
    for item in edges:
        if not (isinstance(item, (list, tuple)) and len(item) == 2):
            raise ValidationError(f"bad edge {item!r}; want [from, to]")
        a, b = item
        if not isinstance(a, str) or not isinstance(b, str):
            raise ValidationError(f"edge endpoints must be strings, got {item!r}")
        out.append((a, b))
    return FiniteRelation(out)


def decode_source(doc, schema: Schema) -> Source:
    """Initial preference source from its create-record payload."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValidationError("source needs a 'kind' of finite or formula")
    if doc["kind"] == "finite":
        rel = _decode_edges(doc)
        require_spo(rel, "preference relation")
        return rel
    if doc["kind"] == "formula":
        if not isinstance(doc.get("text"), str):
            raise ValidationError("formula source needs a 'text' string")
        return parse_formula(schema, doc["text"])
    raise ValidationError(f"unknown source kind {doc['kind']!r}")


def decode_request_rel(
    doc, schema: Schema, data: Dataset, finite_session: bool
) -> Tuple[Source, dict]:
    """Discard/protect payload from a contract request or a replayed log
    record; returns the relation plus its canonical form for the log.

    Formula-backed sessions accept either a formula string or an edge
    list over row keys, the latter encoded as a union of point formulas.
    """
    if not isinstance(doc, dict):
        raise ValidationError("expected an object with 'edges' or 'formula'")
    if "edges" in doc and "formula" in doc:
        raise ValidationError("give 'edges' or 'formula', not both")
    if "formula" in doc or doc.get("kind") == "formula":
        if finite_session:
            raise ValidationError("this session's relation is finite; send 'edges'")
        text = doc.get("formula", doc.get("text"))
        if not isinstance(text, str):
            raise ValidationError("'formula' must be a string")
        f = parse_formula(schema, text)
        return f, {"kind": "formula", "text": to_source(f)}
    rel = _decode_edges(doc)
    edges = [list(e) for e in rel.sorted_edges()]
    if finite_session:
        return rel, {"kind": "edges", "edges": edges}
    missing = sorted(rel.nodes - set(data.keys()))
    if missing:
        raise ValidationError(f"edges name unknown row keys {missing}", keys=missing)
    values = {r.key: r.values for r in data.rows}
    f = encode_edges(schema, values, rel)
    return f, {"kind": "points", "edges": edges, "text": to_source(f)}


@dataclass(frozen=True)
class ContractOutcome:
    result_mode: str
    contractor: Source
    contracted: Source
    strata: int
    forced: Optional[Source]
    protected: Optional[Source]


def run_contraction(
    source: Source, mode: str, con: Source, protect: Optional[Source]
) -> ContractOutcome:
    """Dispatch one contraction over either representation."""
    if mode not in (PREFIX, MEET):
        raise ValidationError(f"mode must be {PREFIX!r} or {MEET!r}, got {mode!r}")
    if isinstance(source, FiniteRelation):
        if mode == PREFIX:
            res = (
                min_contr_finite(source, con)
                if protect is None
                else min_contr_protecting(source, con, protect)
            )
        else:
            res = (
                meet_contr(source, con)
                if protect is None
                else meet_contr_protecting(source, con, protect)
            )
        return ContractOutcome(
            res.mode, res.contractor, res.contracted, len(res.strata_trace),
            res.forced, res.protected,
        )

    # formula path; the finite algorithms verify con inside, here we must
    witness = satisfiable(and_not(con, source))
    if witness is not None:
        shown = {v: {a: value_to_text(x) for a, x in t.items()} for v, t in witness.items()}
        raise ConNotSubset(
            "con does not imply the current preference relation", witness=shown
        )
    if mode == PREFIX:
        res = (
            min_contr_symbolic(source, con)
            if protect is None
            else min_contr_protecting_symbolic(source, con, protect)
        )
        return ContractOutcome(
            res.mode, res.contractor, res.contracted, len(res.strata_trace),
            res.forced, res.protected,
        )
    contractor = meet_contr_symbolic(source, con, protect)
    return ContractOutcome(
        MEET if protect is None else PROTECTING_MEET,
        contractor,
        and_not(source, contractor),
        0,
        None,
        protect,
    )


class SessionState:
    """Live view of one session, rebuilt from its log records."""

    def __init__(self, records: List[dict]):
        head = records[0]
        if head.get("type") != "create":
            raise ValidationError("session log must start with a create record")
        self.id: str = head["id"]
        self.created: str = head["at"]
        self.updated: str = records[-1]["at"]
        self.schema = Schema.from_json(head["schema"])
        self.dataset = Dataset(
            self.schema, ((r["key"], r["values"]) for r in head["dataset"])
        )
        self.initial_source = decode_source(head["source"], self.schema)
        self.finite = isinstance(self.initial_source, FiniteRelation)
        self.records = records
        self.sources: List[Source] = [self.initial_source]
        # source in effect after each logged step; heights into the stack
        # would go stale once an undo branch re-contracts
        self.step_sources: List[Source] = []
        self._winnow_cache: Dict[Source, Dataset] = {}
        for rec in records[1:]:
            self._apply(rec)

    # -- replay ------------------------------------------------------

    def _apply(self, rec: dict) -> None:
        kind = rec.get("type")
        if kind == "contract":
            con, _ = decode_request_rel(rec["con"], self.schema, self.dataset, self.finite)
            protect = None
            if rec.get("protect") is not None:
                protect, _ = decode_request_rel(
                    rec["protect"], self.schema, self.dataset, self.finite
                )
            outcome = run_contraction(self.current_source, rec["mode"], con, protect)
            self.sources.append(outcome.contracted)
        elif kind == "undo":
            if len(self.sources) < 2:
                raise ValidationError("log replays an undo with nothing to undo")
            self.sources.pop()
        else:
            raise ValidationError(f"unknown record type {kind!r}")
        self.step_sources.append(self.current_source)
        self.updated = rec["at"]

    # -- accessors ----------------------------------------------------

    @property
    def current_source(self) -> Source:
        return self.sources[-1]

    @property
    def undoable(self) -> bool:
        return len(self.sources) > 1

    def winnow_of(self, source: Source) -> Dataset:
        if source not in self._winnow_cache:
            self._winnow_cache[source] = winnow(source, self.dataset)
        return self._winnow_cache[source]

    def current_winnow(self) -> Dataset:
        return self.winnow_of(self.current_source)

    def steps(self) -> List[dict]:
        return self.records[1:]


class SessionManager:
    """Store plus in-memory states; one writer lock per session."""

    def __init__(self, data_dir):
        self.store = SessionStore(data_dir)
        self._states: Dict[str, SessionState] = {}
        self._locks: Dict[str, threading.Lock] = {}
        self._registry = threading.Lock()

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry:
            if session_id not in self._locks:
                self._locks[session_id] = threading.Lock()
            return self._locks[session_id]

    def get(self, session_id: str) -> SessionState:
        check_session_id(session_id)
        state = self._states.get(session_id)
        if state is None:
            state = SessionState(self.store.read(session_id))
            self._states[session_id] = state
        return state

    def create(self, doc: dict) -> SessionState:
        session_id = doc.get("id") or uuid.uuid4().hex
        check_session_id(session_id)
        schema = Schema.from_json(doc.get("schema") or {})
        rows = doc.get("dataset")
        if not isinstance(rows, list):
            raise ValidationError("dataset must be an array of {key, values} rows")
        parsed = []
        for r in rows:
            if not isinstance(r, dict) or "key" not in r or "values" not in r:
                raise ValidationError(f"bad dataset row {r!r}; want {{key, values}}")
            parsed.append((r["key"], r["values"]))
        data = Dataset(schema, parsed)
        source = decode_source(doc.get("source") or {}, schema)
        record = {
            "type": "create",
            "id": session_id,
            "at": _now(),
            "schema": schema.to_json(),
            "dataset": data.to_json(),
            "source": source_payload(source),
        }
        with self.lock(session_id):
            self.store.create(session_id, record)
            state = SessionState([record])
            self._states[session_id] = state
        state.current_winnow()
        return state

    def contract(self, session_id: str, doc: dict) -> Tuple[SessionState, dict, dict]:
        """Run one contraction; returns (state, logged record, response extras)."""
        with self.lock(session_id):
            state = self.get(session_id)
            mode = doc.get("mode", PREFIX)
            if "con" not in doc:
                raise ValidationError("contract request needs 'con'")
            con, con_doc = decode_request_rel(
                doc["con"], state.schema, state.dataset, state.finite
            )
            protect = protect_doc = None
            if doc.get("protect") is not None:
                protect, protect_doc = decode_request_rel(
                    doc["protect"], state.schema, state.dataset, state.finite
                )
            outcome = run_contraction(state.current_source, mode, con, protect)

            before = state.current_winnow()
            after, strategy = winnow_after_contraction(
                state.current_source,
                outcome.contractor,
                con,
                state.dataset,
                cached=before,
                contractor_is_prefix=(mode == PREFIX and protect is None),
            )
            record = {
                "type": "contract",
                "at": _now(),
                "mode": mode,
                "result_mode": outcome.result_mode,
                "con": con_doc,
                "protect": protect_doc,
                "contractor_digest": digest(source_payload(outcome.contractor)),
                "winnow_digest": digest(list(after.keys())),
                "strategy": {
                    "path": strategy.path,
                    "s_source": strategy.s_source,
                    "s_hits": strategy.s_hits,
                    "candidates": strategy.candidates,
                },
            }
            # the step must survive a crash before anyone sees its result
            self.store.append(session_id, record)
            state.records.append(record)
            state.sources.append(outcome.contracted)
            state.step_sources.append(outcome.contracted)
            state._winnow_cache[outcome.contracted] = after
            state.updated = record["at"]
        return state, record, {"outcome": outcome, "before": before, "after": after}

    def undo(self, session_id: str) -> SessionState:
        with self.lock(session_id):
            state = self.get(session_id)
            if not state.undoable:
                raise NothingToUndo("no contraction to undo")
            record = {"type": "undo", "at": _now()}
            self.store.append(session_id, record)
            state.records.append(record)
            state.sources.pop()
            state.step_sources.append(state.current_source)
            state.updated = record["at"]
        return state

    def export(self, session_id: str) -> dict:
        state = self.get(session_id)
        head = state.records[0]
        return {
            "id": state.id,
            "created": state.created,
            "updated": state.updated,
            "schema": head["schema"],
            "dataset": head["dataset"],
            "initial_source": head["source"],
            "current_source": source_payload(state.current_source),
            "steps": state.steps(),
            "winnow": {
                "initial": list(state.winnow_of(state.initial_source).keys()),
                "current": list(state.current_winnow().keys()),
                "after_step": [
                    list(state.winnow_of(s).keys()) for s in state.step_sources
                ],
            },
        }
