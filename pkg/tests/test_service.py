"""HTTP session service: flows, persistence, and error mapping.

Every assertion here goes through the JSON API only, since that is the
whole contract the browser client gets to rely on.
"""

import pytest
from conftest import CAR_CON, CAR_PREF, CAR_ROWS
from fastapi.testclient import TestClient

from prefcon.service import create_app

CAR_SCHEMA_JSON = {
    "attributes": [
        {"name": "make", "domain": "C"},
        {"name": "year", "domain": "Q"},
        {"name": "price", "domain": "Q"},
    ]
}


def car_session_doc(session_id="cars"):
    return {
        "id": session_id,
        "schema": CAR_SCHEMA_JSON,
        "dataset": [{"key": k, "values": v} for k, v in CAR_ROWS],
        "source": {"kind": "formula", "text": CAR_PREF},
    }


def chain_session_doc(session_id="chain"):
    names = ["x1", "x2", "x3", "x4", "x5"]
    edges = [[a, b] for i, a in enumerate(names) for b in names[i + 1 :]]
    return {
        "id": session_id,
        "schema": {"attributes": [{"name": "p", "domain": "Q"}]},
        "dataset": [{"key": n, "values": {"p": str(i)}} for i, n in enumerate(names)],
        "source": {"kind": "finite", "edges": edges},
    }


@pytest.fixture
def client(tmp_path):
    return TestClient(create_app(tmp_path / "sessions"))


class TestFormulaFlow:
    def test_create_contract_undo(self, client):
        r = client.post("/sessions", json=car_session_doc())
        assert r.status_code == 201
        body = r.json()
        assert body["kind"] == "formula"
        assert body["winnow"]["keys"] == ["t4"]
        assert body["undoable"] is False

        r = client.post(
            "/sessions/cars/contract",
            json={"mode": "prefix", "con": {"formula": CAR_CON}},
        )
        assert r.status_code == 200
        body = r.json()
        assert body["winnow_before"]["keys"] == ["t4"]
        assert body["winnow_after"]["keys"] == ["t1", "t4"]
        assert body["result"]["mode"] == "prefix"
        assert body["result"]["strata"] >= 1
        assert body["strategy"]["path"] in ("fast", "incremental")
        assert body["strategy"]["s_source"] == "S(CON)"
        assert body["step_count"] == 1

        r = client.get("/sessions/cars/winnow")
        assert r.json()["keys"] == ["t1", "t4"]
        rows = {row["key"]: row["values"] for row in r.json()["rows"]}
        assert rows["t1"]["price"] == "15000"

        r = client.post("/sessions/cars/undo")
        assert r.status_code == 200
        assert r.json()["winnow"]["keys"] == ["t4"]
        assert r.json()["undoable"] is False
        assert r.json()["step_count"] == 2  # the log keeps both steps

    def test_contracted_source_is_a_formula(self, client):
        client.post("/sessions", json=car_session_doc())
        r = client.post("/sessions/cars/contract", json={"con": {"formula": CAR_CON}})
        contracted = r.json()["result"]["contracted"]
        assert contracted["kind"] == "formula"
        assert "price" in contracted["text"]
        r = client.get("/sessions/cars")
        assert r.json()["source"] == contracted

    def test_edge_payload_is_point_encoded(self, client):
        client.post("/sessions", json=car_session_doc())
        r = client.post(
            "/sessions/cars/contract", json={"con": {"edges": [["t4", "t2"]]}}
        )
        assert r.status_code == 200
        r = client.get("/sessions/cars")
        step = r.json()["history"][0]
        assert step["con"]["kind"] == "points"
        assert step["con"]["edges"] == [["t4", "t2"]]
        assert "12000" in step["con"]["text"]

    def test_edge_payload_unknown_key(self, client):
        client.post("/sessions", json=car_session_doc())
        r = client.post(
            "/sessions/cars/contract", json={"con": {"edges": [["t4", "t9"]]}}
        )
        assert r.status_code == 400
        assert r.json()["code"] == "VALIDATION"
        assert r.json()["details"]["keys"] == ["t9"]

    def test_meet_mode(self, client):
        client.post("/sessions", json=car_session_doc())
        r = client.post(
            "/sessions/cars/contract",
            json={"mode": "meet", "con": {"formula": CAR_CON}},
        )
        assert r.status_code == 200
        assert r.json()["result"]["mode"] == "meet"
        assert set(r.json()["winnow_after"]["keys"]) >= {"t4"}


class TestFiniteFlow:
    def test_contract_with_protection(self, client):
        client.post("/sessions", json=chain_session_doc())
        r = client.post(
            "/sessions/chain/contract",
            json={
                "mode": "prefix",
                "con": {"edges": [["x2", "x5"]]},
                "protect": {"edges": [["x2", "x3"]]},
            },
        )
        assert r.status_code == 200
        body = r.json()
        assert body["result"]["mode"] == "protecting"
        assert body["result"]["protected"] == {
            "kind": "finite",
            "edges": [["x2", "x3"]],
        }
        assert ["x2", "x5"] in body["result"]["contractor"]["edges"]
        assert "forced" in body["result"]

    def test_winnow_updates(self, client):
        client.post("/sessions", json=chain_session_doc())
        r = client.get("/sessions/chain/winnow")
        assert r.json()["keys"] == ["x1"]
        r = client.post(
            "/sessions/chain/contract", json={"con": {"edges": [["x1", "x2"]]}}
        )
        assert r.json()["winnow_after"]["keys"] == ["x1", "x2"]

    def test_formula_payload_rejected(self, client):
        client.post("/sessions", json=chain_session_doc())
        r = client.post(
            "/sessions/chain/contract", json={"con": {"formula": "L.p = 0"}}
        )
        assert r.status_code == 400
        assert r.json()["code"] == "VALIDATION"


class TestPersistence:
    def replay(self, data_dir, session_id):
        fresh = TestClient(create_app(data_dir))
        return fresh.get(f"/sessions/{session_id}/export")

    def test_export_stable_across_restart(self, tmp_path):
        data_dir = tmp_path / "sessions"
        client = TestClient(create_app(data_dir))
        client.post("/sessions", json=car_session_doc())
        client.post("/sessions/cars/contract", json={"con": {"formula": CAR_CON}})
        first = client.get("/sessions/cars/export")
        again = self.replay(data_dir, "cars")
        assert again.content == first.content
        doc = first.json()
        assert doc["winnow"]["initial"] == ["t4"]
        assert doc["winnow"]["current"] == ["t1", "t4"]
        assert doc["winnow"]["after_step"] == [["t1", "t4"]]

    def test_branch_after_undo_replays(self, tmp_path):
        data_dir = tmp_path / "sessions"
        client = TestClient(create_app(data_dir))
        client.post("/sessions", json=chain_session_doc())
        client.post("/sessions/chain/contract", json={"con": {"edges": [["x1", "x2"]]}})
        client.post("/sessions/chain/undo")
        client.post("/sessions/chain/contract", json={"con": {"edges": [["x4", "x5"]]}})
        first = client.get("/sessions/chain/export")
        assert self.replay(data_dir, "chain").content == first.content
        doc = first.json()
        assert doc["winnow"]["after_step"] == [["x1", "x2"], ["x1"], ["x1"]]
        assert len(doc["steps"]) == 3
        assert [s["type"] for s in doc["steps"]] == ["contract", "undo", "contract"]

    def test_contractor_digest_is_deterministic(self, tmp_path):
        digests = []
        for attempt in ("one", "two"):
            client = TestClient(create_app(tmp_path / attempt))
            client.post("/sessions", json=car_session_doc())
            r = client.post("/sessions/cars/contract", json={"con": {"formula": CAR_CON}})
            digests.append(r.json()["result"]["contractor_digest"])
        assert digests[0] == digests[1]


class TestErrors:
    def test_session_not_found(self, client):
        r = client.get("/sessions/nope")
        assert r.status_code == 404
        assert r.json()["code"] == "SESSION_NOT_FOUND"

    def test_session_exists(self, client):
        assert client.post("/sessions", json=car_session_doc()).status_code == 201
        r = client.post("/sessions", json=car_session_doc())
        assert r.status_code == 409
        assert r.json()["code"] == "SESSION_EXISTS"

    def test_bad_session_id(self, client):
        r = client.post("/sessions", json=car_session_doc("no/slashes"))
        assert r.status_code == 400
        assert r.json()["code"] == "VALIDATION"

    def test_nothing_to_undo(self, client):
        client.post("/sessions", json=car_session_doc())
        r = client.post("/sessions/cars/undo")
        assert r.status_code == 409
        assert r.json()["code"] == "NOTHING_TO_UNDO"

    def test_con_not_subset(self, client):
        client.post("/sessions", json=car_session_doc())
        r = client.post(
            "/sessions/cars/contract",
            json={"con": {"formula": "L.year < R.year"}},
        )
        assert r.status_code == 400
        assert r.json()["code"] == "CON_NOT_SUBSET"
        assert "witness" in r.json()["details"]

    def test_finite_con_not_subset(self, client):
        client.post("/sessions", json=chain_session_doc())
        r = client.post(
            "/sessions/chain/contract", json={"con": {"edges": [["x5", "x1"]]}}
        )
        assert r.status_code == 400
        assert r.json()["code"] == "CON_NOT_SUBSET"

    def test_protection_conflict(self, client):
        client.post("/sessions", json=chain_session_doc())
        r = client.post(
            "/sessions/chain/contract",
            json={
                "con": {"edges": [["x1", "x3"]]},
                "protect": {"edges": [["x1", "x2"], ["x2", "x3"]]},
            },
        )
        assert r.status_code == 409
        assert r.json()["code"] == "PROTECTION_CONFLICT"

    def test_not_finitely_stratifiable(self, tmp_path):
        client = TestClient(create_app(tmp_path / "s"))
        client.post(
            "/sessions",
            json={
                "id": "open",
                "schema": {"attributes": [{"name": "p", "domain": "Q"}]},
                "dataset": [{"key": "a", "values": {"p": "0"}}],
                "source": {"kind": "formula", "text": "L.p < R.p"},
            },
        )
        r = client.post(
            "/sessions/open/contract",
            json={"con": {"formula": "L.p < 1 and R.p >= 2"}},
        )
        assert r.status_code == 422
        assert r.json()["code"] == "NOT_FINITELY_STRATIFIABLE"

    def test_validation_on_malformed_source(self, client):
        doc = car_session_doc()
        doc["source"] = {"kind": "telepathy"}
        r = client.post("/sessions", json=doc)
        assert r.status_code == 400
        assert r.json()["code"] == "VALIDATION"

    def test_parse_error_carries_position(self, client):
        doc = car_session_doc()
        doc["source"] = {"kind": "formula", "text": "L.year >"}
        r = client.post("/sessions", json=doc)
        assert r.status_code == 400
        assert r.json()["code"] == "PARSE_ERROR"
        assert isinstance(r.json()["details"]["position"], int)

    def test_cyclic_finite_source(self, client):
        doc = chain_session_doc("loop")
        doc["source"] = {"kind": "finite", "edges": [["x1", "x2"], ["x2", "x1"]]}
        r = client.post("/sessions", json=doc)
        assert r.status_code == 400
        assert r.json()["code"] == "NOT_SPO"


class TestUiMount:
    def test_serves_static_frontend_behind_the_api(self, tmp_path):
        ui = tmp_path / "ui"
        ui.mkdir()
        (ui / "index.html").write_text("<html><body>prefcon ui</body></html>")
        client = TestClient(create_app(tmp_path / "s", ui_dir=ui))

        r = client.get("/")
        assert r.status_code == 200
        assert "prefcon ui" in r.text

        # API routes keep precedence over the mount
        r = client.post("/sessions", json=car_session_doc())
        assert r.status_code == 201
        r = client.get("/sessions/cars/winnow")
        assert r.json()["keys"] == ["t4"]

    def test_mount_is_off_by_default(self, client):
        r = client.get("/")
        assert r.status_code == 404
