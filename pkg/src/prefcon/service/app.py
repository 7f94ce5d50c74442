"""HTTP face of the session engine.

Thin layer: decode JSON, call the manager, encode JSON. Engine errors
carry stable codes which map onto status codes here; everything the
frontend renders comes from these endpoints, never from local math.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from fastapi import Body, FastAPI, Response
from fastapi.responses import JSONResponse

from ..errors import PrefconError
from ..formula import DnfFormula, to_source
from ..relation import FiniteRelation
from .sessions import SessionManager, SessionState, source_payload
from .store import canonical_json

_STATUS = {
    "PROTECTION_CONFLICT": 409,
    "NOT_FINITELY_STRATIFIABLE": 422,
    "SESSION_EXISTS": 409,
    "SESSION_NOT_FOUND": 404,
    "NOTHING_TO_UNDO": 409,
    "ITERATION_CAP": 500,
    "FORMULA_SIZE_LIMIT": 500,
}


def json_safe(value):
    """Error details may hold engine objects; renderable JSON only."""
    if isinstance(value, FiniteRelation):
        return [list(e) for e in value.sorted_edges()]
    if isinstance(value, DnfFormula):
        return to_source(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = [json_safe(v) for v in value]
        return sorted(items, key=repr) if isinstance(value, (set, frozenset)) else items
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return repr(value)


def summary(state: SessionState) -> dict:
    return {
        "id": state.id,
        "created": state.created,
        "updated": state.updated,
        "kind": "finite" if state.finite else "formula",
        "step_count": len(state.records) - 1,
        "undoable": state.undoable,
        "schema": state.schema.to_json(),
        "dataset": state.dataset.to_json(),
        "source": source_payload(state.current_source),
        "winnow": {"keys": list(state.current_winnow().keys())},
        "history": state.steps(),
    }


def create_app(data_dir: str | Path, ui_dir: str | Path | None = None) -> FastAPI:
    manager = SessionManager(data_dir)
    app = FastAPI(title="preference contraction sessions", version="0.1.0")
    app.state.manager = manager

    @app.exception_handler(PrefconError)
    async def engine_error(_, exc: PrefconError):
        return JSONResponse(
            status_code=_STATUS.get(exc.code, 400),
            content={
                "code": exc.code,
                "message": str(exc),
                "details": json_safe(exc.details),
            },
        )

    @app.post("/sessions", status_code=201)
    def create_session(payload: dict = Body(...)):
        return summary(manager.create(payload))

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return summary(manager.get(session_id))

    @app.post("/sessions/{session_id}/contract")
    def contract(session_id: str, payload: dict = Body(...)):
        state, record, extras = manager.contract(session_id, payload)
        outcome = extras["outcome"]
        result = {
            "mode": outcome.result_mode,
            "strata": outcome.strata,
            "contractor": source_payload(outcome.contractor),
            "contracted": source_payload(outcome.contracted),
            "contractor_digest": record["contractor_digest"],
        }
        if outcome.forced is not None:
            result["forced"] = source_payload(outcome.forced)
        if outcome.protected is not None:
            result["protected"] = source_payload(outcome.protected)
        return {
            "result": result,
            "winnow_before": {"keys": list(extras["before"].keys())},
            "winnow_after": {"keys": list(extras["after"].keys())},
            "strategy": record["strategy"],
            "step_count": len(state.records) - 1,
            "updated": state.updated,
        }

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str):
        return summary(manager.undo(session_id))

    @app.get("/sessions/{session_id}/winnow")
    def get_winnow(session_id: str):
        state = manager.get(session_id)
        result = state.current_winnow()
        return {"keys": list(result.keys()), "rows": result.to_json()}

    @app.get("/sessions/{session_id}/export")
    def export(session_id: str):
        doc = manager.export(session_id)
        # hand-serialized so restarts replay to byte-identical archives
        return Response(content=canonical_json(doc), media_type="application/json")

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        # mounted last so /sessions routes keep precedence
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
