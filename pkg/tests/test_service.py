"""Tests for the HTTP API: every mutation is a session operation."""

import json

import pytest
from fastapi.testclient import TestClient

from elicit.plan import build_plan
from elicit.service import create_app
from elicit.session import Session

POLYPOID_SHORT = {"Shape": "polypoid", "Length": "less than 5 cm"}
POLYPOID_MEDIUM = {"Shape": "polypoid", "Length": "5 to 10 cm"}
ULCERATING_SHORT = {"Shape": "ulcerating", "Length": "less than 5 cm"}


def _config(mapping):
    return {"config": json.dumps(mapping)}


@pytest.fixture()
def client(session):
    return TestClient(create_app(session))


@pytest.fixture()
def fresh_session(schema, templates):
    s = Session(build_plan(schema, templates), schema)
    yield s
    s.close()


@pytest.fixture()
def fresh_client(fresh_session):
    return TestClient(create_app(fresh_session))


class TestPlanEndpoints:
    def test_plan_document(self, client):
        doc = client.get("/api/plan").json()
        assert doc["capacity"] == 3
        assert len(doc["sheets"]) == 52
        assert len(doc["distributions"]) == 38
        first = doc["sheets"][0]["items"][0]
        assert set(first) == {
            "item_id", "variable", "state", "parent_config", "fragment",
        }

    def test_single_sheet_matches_the_plan(self, client):
        doc = client.get("/api/plan").json()
        got = client.get("/api/sheets/7")
        assert got.status_code == 200
        assert got.json() == doc["sheets"][7]

    def test_sheet_out_of_range(self, client):
        for index in (52, -1):
            got = client.get(f"/api/sheets/{index}")
            assert got.status_code == 404
            assert got.json()["error"] == f"unknown sheet: {index}"

    def test_scale_document(self, client):
        doc = client.get("/api/scale").json()
        assert doc["rounding_grid"] == 0.05
        verbal = {a["label"]: a["position"] for a in doc["anchors"]
                  if a["kind"] == "verbal"}
        assert verbal["fifty-fifty"] == 0.5
        assert verbal["probable"] == 0.85
        assert len(verbal) == 7


class TestDistributionEndpoint:
    def test_parentless_distribution(self, client):
        got = client.get("/api/distributions/Shape")
        assert got.status_code == 200
        doc = got.json()
        assert doc["variable"] == "Shape"
        assert doc["parent_config"] == {}
        assert doc["complete"] is True
        assert doc["residual_mass"] == 0.0
        assert doc["violations"] == []
        assert doc["assessed"] == {
            "polypoid": 0.5, "ulcerating": 0.25, "scirrhous": 0.25,
        }
        assert [i["state"] for i in doc["items"]] == [
            "polypoid", "ulcerating", "scirrhous",
        ]
        assert all(i["assessment"] is not None for i in doc["items"])

    def test_config_parameter_selects_the_row(self, client):
        got = client.get(
            "/api/distributions/Invasion", params=_config(POLYPOID_SHORT)
        )
        assert got.status_code == 200
        doc = got.json()
        assert doc["parent_config"] == POLYPOID_SHORT
        assert list(doc["assessed"].values()) == [0.40, 0.30, 0.20, 0.10]

    def test_unknown_variable(self, client):
        got = client.get("/api/distributions/Ghost")
        assert got.status_code == 404
        assert "unknown variable" in got.json()["error"]

    def test_config_must_be_valid_json(self, client):
        got = client.get("/api/distributions/Invasion",
                         params={"config": "{oops"})
        assert got.status_code == 422
        assert "config is not valid JSON" in got.json()["error"]

    def test_config_must_be_an_object(self, client):
        got = client.get("/api/distributions/Invasion",
                         params={"config": "[1, 2]"})
        assert got.status_code == 422
        assert got.json()["error"] == "config must be a JSON object"

    def test_config_with_non_parent_key(self, client):
        got = client.get("/api/distributions/Invasion",
                         params=_config({"Lymph": "absent"}))
        assert got.status_code == 422
        assert "not parents of this variable" in got.json()["error"]

    def test_config_with_unknown_state(self, client):
        got = client.get(
            "/api/distributions/Invasion",
            params=_config({"Shape": "cubist", "Length": "less than 5 cm"}),
        )
        assert got.status_code == 404
        assert "unknown state" in got.json()["error"]

    def test_config_missing_a_parent(self, client):
        got = client.get("/api/distributions/Invasion",
                         params=_config({"Shape": "polypoid"}))
        assert got.status_code == 422
        assert "missing parent" in got.json()["error"]


class TestAssessmentEndpoint:
    def test_stores_and_snaps(self, client, session):
        got = client.post("/api/assessments",
                          json={"item_id": "Shape:0:0", "value": 0.43})
        assert got.status_code == 201
        doc = got.json()
        assert doc["assessment"]["value"] == 0.45
        assert doc["assessment"]["provenance"] == "numeric-mark"
        assert doc["distribution"]["assessed"]["polypoid"] == 0.45
        assert session.assessment_for("Shape:0:0").value == 0.45

    def test_verbal_anchor_supplies_the_value(self, client):
        got = client.post("/api/assessments", json={
            "item_id": "Shape:0:1",
            "provenance": "verbal-anchor",
            "source_detail": "probable",
        })
        assert got.status_code == 201
        doc = got.json()
        assert doc["assessment"]["value"] == 0.85
        assert doc["assessment"]["source_detail"] == "probable"

    def test_unknown_item(self, client):
        got = client.post("/api/assessments",
                          json={"item_id": "Ghost:0:0", "value": 0.5})
        assert got.status_code == 404
        assert "unknown item" in got.json()["error"]

    def test_value_out_of_range(self, client):
        got = client.post("/api/assessments",
                          json={"item_id": "Shape:0:0", "value": 1.2})
        assert got.status_code == 422
        assert "out of range" in got.json()["error"]

    def test_item_id_is_required(self, client):
        got = client.post("/api/assessments", json={"value": 0.5})
        assert got.status_code == 422
        assert got.json()["error"] == "item_id must be a string"

    def test_numeric_mark_needs_a_value(self, client):
        got = client.post("/api/assessments", json={"item_id": "Shape:0:0"})
        assert got.status_code == 422
        assert "needs a value" in got.json()["error"]

    def test_direct_session_writes_are_visible(self, fresh_client,
                                               fresh_session):
        fresh_session.record_assessment("Shape:0:2", 0.25)
        doc = fresh_client.get("/api/distributions/Shape").json()
        assert doc["assessed"] == {"scirrhous": 0.25}
        assert doc["residual_mass"] == 0.75


class TestResidualEndpoint:
    CONFIG = {"Invasion": "submucosa (T1)"}

    def test_accepts_the_remainder(self, fresh_client):
        fresh_client.post("/api/assessments",
                          json={"item_id": "Lymph:0:0", "value": 0.80})
        fresh_client.post("/api/assessments",
                          json={"item_id": "Lymph:0:1", "value": 0.15})
        got = fresh_client.post("/api/residual/Lymph",
                                params=_config(self.CONFIG))
        assert got.status_code == 201
        doc = got.json()
        assert len(doc["assessments"]) == 1
        filled = doc["assessments"][0]
        assert filled["value"] == 0.05
        assert filled["provenance"] == "residual-suggested"
        assert doc["distribution"]["complete"] is True
        assert doc["distribution"]["violations"] == []

    def test_unknown_variable(self, fresh_client):
        got = fresh_client.post("/api/residual/Ghost")
        assert got.status_code == 404

    def test_nothing_unassessed(self, client):
        got = client.post("/api/residual/Lymph", params=_config(self.CONFIG))
        assert got.status_code == 422
        assert "nothing unassessed" in got.json()["error"]


def trend_body(source, target, alpha, **extra):
    return {
        "source": {"variable": "Invasion", "parents": source},
        "target": {"variable": "Invasion", "parents": target},
        "alpha": alpha,
        "direction": "toward-last",
        **extra,
    }


class TestTrendEndpoint:
    def test_preview_reports_without_storing(self, client, session):
        body = trend_body(POLYPOID_SHORT, ULCERATING_SHORT, 0.10,
                          preview=True)
        got = client.post("/api/trends", json=body)
        assert got.status_code == 200
        doc = got.json()
        assert doc["trend"]["alpha"] == 0.10
        stored = client.get("/api/distributions/Invasion",
                            params=_config(ULCERATING_SHORT)).json()
        assert doc["values"] == stored["assessed"]
        assert len(session.trends) == 6

    def test_manual_target_needs_overwrite(self, client):
        body = trend_body(POLYPOID_SHORT, POLYPOID_MEDIUM, 0.10)
        got = client.post("/api/trends", json=body)
        assert got.status_code == 409
        assert got.json()["error"] == "target has manual assessments"

        got = client.post("/api/trends", json=dict(body, overwrite=True))
        assert got.status_code == 201
        doc = got.json()
        assert [a["provenance"] for a in doc["assessments"]] == [
            "trend-derived"] * 4
        assert doc["distribution"]["complete"] is True

    def test_alpha_outside_unit_interval(self, client):
        body = trend_body(POLYPOID_SHORT, ULCERATING_SHORT, 1.5)
        got = client.post("/api/trends", json=body)
        assert got.status_code == 422
        assert "outside" in got.json()["error"]

    def test_identical_source_and_target(self, client):
        body = trend_body(POLYPOID_SHORT, POLYPOID_SHORT, 0.10)
        got = client.post("/api/trends", json=body)
        assert got.status_code == 422
        assert "identical" in got.json()["error"]

    def test_unknown_variable(self, client):
        body = trend_body(POLYPOID_SHORT, ULCERATING_SHORT, 0.10)
        body["source"]["variable"] = "Ghost"
        body["target"]["variable"] = "Ghost"
        got = client.post("/api/trends", json=body)
        assert got.status_code == 404

    def test_missing_fields(self, client):
        got = client.post("/api/trends", json={"alpha": 0.1})
        assert got.status_code == 422
        assert "invalid trend" in got.json()["error"]

    def test_bad_direction(self, client):
        body = trend_body(POLYPOID_SHORT, ULCERATING_SHORT, 0.10)
        body["direction"] = "sideways"
        got = client.post("/api/trends", json=body)
        assert got.status_code == 422

    def test_preview_with_incomplete_source(self, fresh_client):
        body = trend_body(POLYPOID_SHORT, ULCERATING_SHORT, 0.10,
                          preview=True)
        got = fresh_client.post("/api/trends", json=body)
        assert got.status_code == 422
        assert "incomplete" in got.json()["error"]


class TestCompileEndpoint:
    def test_complete_session_compiles(self, client):
        got = client.post("/api/compile")
        assert got.status_code == 200
        doc = got.json()
        tables = {t["variable"]: t for t in doc["tables"]}
        assert len(tables) == 9
        assert tables["Shape"]["rows"][0]["p"] == [0.5, 0.25, 0.25]

    def test_empty_session_reports_violations(self, fresh_client):
        got = fresh_client.post("/api/compile")
        assert got.status_code == 422
        doc = got.json()
        assert doc["error"] == "compile failed"
        assert any("unassessed" in v for v in doc["violations"])


class TestProgressEndpoint:
    def test_complete_session(self, client):
        doc = client.get("/api/progress").json()
        assert doc["assessed"] == doc["total"] == 150
        shape = doc["per_variable"]["Shape"]
        assert shape == {
            "assessed": 3, "total": 3,
            "complete_distributions": 1, "distributions": 1,
        }

    def test_empty_session(self, fresh_client):
        doc = fresh_client.get("/api/progress").json()
        assert doc["assessed"] == 0
        assert doc["total"] == 150

    def test_mutations_move_the_counter(self, fresh_client):
        before = fresh_client.get("/api/progress").json()["assessed"]
        fresh_client.post("/api/assessments",
                          json={"item_id": "Shape:0:0", "value": 0.5})
        after = fresh_client.get("/api/progress").json()["assessed"]
        assert after == before + 1


class TestStaticUi:
    def test_ui_directory_is_served_at_the_root(self, session, tmp_path):
        (tmp_path / "index.html").write_text("<h1>elicit ui</h1>")
        (tmp_path / "app.js").write_text("export {};")
        ui_client = TestClient(create_app(session, ui_dir=str(tmp_path)))

        got = ui_client.get("/")
        assert got.status_code == 200
        assert "elicit ui" in got.text
        assert ui_client.get("/app.js").status_code == 200

    def test_api_routes_win_over_the_static_mount(self, session, tmp_path):
        (tmp_path / "index.html").write_text("<h1>elicit ui</h1>")
        ui_client = TestClient(create_app(session, ui_dir=str(tmp_path)))

        doc = ui_client.get("/api/scale").json()
        assert doc["rounding_grid"] == 0.05

    def test_no_ui_directory_means_no_root_page(self, client):
        assert client.get("/").status_code == 404
