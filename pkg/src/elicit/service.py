"""HTTP/JSON API over one live elicitation session.

Transport only: every mutation is the corresponding session operation, so
the log-before-acknowledge durability of the session layer carries over to
the API.  Status codes: 200/201 success, 404 unknown entity, 409 overwrite
guard, 422 validation failure.
"""

from __future__ import annotations

import json

from fastapi import Body, FastAPI
from fastapi.responses import JSONResponse

from .errors import CompileError, SchemaError, SessionError, TrendError
from .plan import plan_to_json
from .scale import scale_to_json
from .schema import ParentConfiguration, parent_config, write_cpt_file
from .session import (
    Assessment,
    NUMERIC_MARK,
    Session,
    _assessment_record,
    compile_cpts,
    trend_from_record,
    trend_record,
)
from .trend import derive_distribution, derived_values

OVERWRITE_GUARD = "target has manual assessments"


class _ApiError(Exception):
    def __init__(self, status: int, message: str, **extra):
        super().__init__(message)
        self.status = status
        self.body = {"error": message, **extra}


def _status_for(e: Exception) -> int:
    return 404 if "unknown" in str(e) else 422


def _assessment_json(a: Assessment) -> dict:
    return _assessment_record(a)


def _distribution_json(session: Session, variable: str,
                       config: ParentConfiguration) -> dict:
    st = session.status(variable, config)
    items = []
    for item_id in session.plan.distribution_index[(variable, config)]:
        item = session.plan.item(item_id)
        a = session.assessment_for(item_id)
        items.append({
            "item_id": item_id,
            "state": item.state,
            "fragment": item.fragment,
            "assessment": None if a is None else _assessment_json(a),
        })
    return {
        "variable": variable,
        "parent_config": config.as_dict(),
        "assessed": {s: round(v, 10) for s, v in st.assessed.items()},
        "residual_mass": round(st.residual_mass, 10),
        "complete": st.complete,
        "violations": session.validate_distribution(variable, config),
        "items": items,
    }


def create_app(session: Session, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="elicit", version="0.1.0")
    schema = session.schema
    plan_doc = json.loads(plan_to_json(session.plan))

    @app.exception_handler(_ApiError)
    def api_error(request, exc: _ApiError):
        return JSONResponse(exc.body, status_code=exc.status)

    def parse_config(variable: str, config: str | None) -> ParentConfiguration:
        if variable not in schema:
            raise _ApiError(404, f"unknown variable: {variable}")
        if config in (None, ""):
            raw = {}
        else:
            try:
                raw = json.loads(config)
            except json.JSONDecodeError as e:
                raise _ApiError(422, f"config is not valid JSON: {e.msg}")
        if not isinstance(raw, dict):
            raise _ApiError(422, "config must be a JSON object")
        try:
            return parent_config(schema, variable, raw)
        except SchemaError as e:
            raise _ApiError(_status_for(e), str(e))

    @app.get("/api/plan")
    def get_plan():
        return plan_doc

    @app.get("/api/sheets/{index}")
    def get_sheet(index: int):
        if not 0 <= index < len(plan_doc["sheets"]):
            raise _ApiError(404, f"unknown sheet: {index}")
        return plan_doc["sheets"][index]

    @app.get("/api/scale")
    def get_scale():
        return scale_to_json(session.scale)

    @app.get("/api/distributions/{variable}")
    def get_distribution(variable: str, config: str | None = None):
        cfg = parse_config(variable, config)
        try:
            return _distribution_json(session, variable, cfg)
        except SessionError as e:
            raise _ApiError(_status_for(e), str(e))

    @app.get("/api/progress")
    def get_progress():
        return session.progress()

    @app.post("/api/assessments", status_code=201)
    def post_assessment(body: dict = Body(...)):
        item_id = body.get("item_id")
        if not isinstance(item_id, str):
            raise _ApiError(422, "item_id must be a string")
        try:
            session.record_assessment(
                item_id,
                body.get("value"),
                body.get("provenance", NUMERIC_MARK),
                body.get("source_detail"),
            )
        except SessionError as e:
            raise _ApiError(_status_for(e), str(e))
        item = session.plan.item(item_id)
        stored = session.assessment_for(item_id)
        return {
            "assessment": _assessment_json(stored),
            "distribution": _distribution_json(
                session, item.variable, item.parent_config
            ),
        }

    @app.post("/api/residual/{variable}", status_code=201)
    def post_residual(variable: str, config: str | None = None):
        cfg = parse_config(variable, config)
        try:
            assessments = session.accept_residual(variable, cfg)
        except SessionError as e:
            raise _ApiError(_status_for(e), str(e))
        return {
            "assessments": [_assessment_json(a) for a in assessments],
            "distribution": _distribution_json(session, variable, cfg),
        }

    @app.post("/api/trends", status_code=201)
    def post_trend(body: dict = Body(...)):
        record = {
            "kind": "trend",
            "source": body.get("source"),
            "target": body.get("target"),
            "alpha": body.get("alpha"),
            "direction": body.get("direction"),
        }
        try:
            spec = trend_from_record(schema, record)
        except SchemaError as e:
            raise _ApiError(_status_for(e), str(e))
        except (SessionError, TrendError) as e:
            raise _ApiError(422, str(e))
        except (KeyError, TypeError, ValueError) as e:
            raise _ApiError(422, f"invalid trend: {e!r}")

        if body.get("preview"):
            try:
                values = derived_values(session, spec)
            except (SessionError, TrendError) as e:
                raise _ApiError(_status_for(e), str(e))
            return JSONResponse({
                "trend": trend_record(spec),
                "values": {s: round(v, 10) for s, v in values.items()},
            }, status_code=200)

        try:
            assessments = derive_distribution(
                session, spec, overwrite=bool(body.get("overwrite"))
            )
        except TrendError as e:
            if str(e) == OVERWRITE_GUARD:
                raise _ApiError(409, str(e))
            raise _ApiError(_status_for(e), str(e))
        except SessionError as e:
            raise _ApiError(_status_for(e), str(e))
        return {
            "trend": trend_record(spec),
            "assessments": [_assessment_json(a) for a in assessments],
            "distribution": _distribution_json(
                session, spec.variable, spec.target
            ),
        }

    @app.post("/api/compile")
    def post_compile():
        try:
            tables = compile_cpts(session, schema)
        except CompileError as e:
            raise _ApiError(422, "compile failed", violations=e.violations)
        return json.loads(write_cpt_file(tables, schema.names()))

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
