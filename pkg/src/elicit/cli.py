"""Command-line workflows: plan, compile, evaluate, serve.

Exit codes: 2 for input or validation failures, 3 for a compile rejected
by distribution violations.  All produced files are byte-deterministic
functions of their inputs.
"""

from __future__ import annotations

from pathlib import Path
import dataclasses
import sys

import click

from .errors import CompileError, ElicitError
from .inference import (
    CompiledNetwork,
    DEFAULT_NEAR_TIE,
    EvaluationConfig,
    evaluate,
    parse_cases,
    report_to_json,
    report_to_text,
)
from .plan import (
    DEFAULT_CAPACITY,
    FragmentTemplate,
    build_plan,
    parse_templates,
    plan_to_json,
    render_sheets_text,
)
from .scale import ProbabilityScale, default_scale, parse_scale
from .schema import (
    NetworkSchema,
    count_assessments,
    parse_schema,
    read_cpt_file,
    write_cpt_file,
)
from .session import Session, compile_cpts

VALIDATION_EXIT = 2
COMPILE_EXIT = 3


def _fail(message: str, code: int = VALIDATION_EXIT) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        _fail(str(e))
        raise AssertionError("unreachable")


def _load_schema(path: str) -> NetworkSchema:
    try:
        return parse_schema(_read_text(path))
    except ElicitError as e:
        _fail(str(e))
        raise AssertionError("unreachable")


def _load_scale(path: str | None, grid: float | None) -> ProbabilityScale:
    if path is None:
        scale = default_scale()
    else:
        try:
            scale = parse_scale(_read_text(path))
        except ElicitError as e:
            _fail(str(e))
            raise AssertionError("unreachable")
    if grid is not None:
        if not 0.0 < grid <= 1.0:
            _fail(f"grid out of range: {grid}")
        scale = dataclasses.replace(scale, rounding_grid=grid)
    return scale


def _load_templates(path: str) -> dict[str, FragmentTemplate]:
    try:
        return parse_templates(_read_text(path))
    except ElicitError as e:
        _fail(str(e))
        raise AssertionError("unreachable")


def _generic_templates(schema: NetworkSchema) -> dict[str, FragmentTemplate]:
    """Minimal placeholder templates; fragments are irrelevant to compiling."""
    out = {}
    for var in schema.chance_variables():
        if var.parents:
            refs = " and ".join("{%s}" % p for p in var.parents)
            intro = f"Given {refs}."
        else:
            intro = ""
        out[var.name] = FragmentTemplate(
            var.name, intro, "How likely is {state} ?"
        )
    return out


def _build_session(
    schema: NetworkSchema,
    templates: dict[str, FragmentTemplate],
    scale: ProbabilityScale,
    capacity: int,
    log_path: str,
) -> Session:
    try:
        plan = build_plan(schema, templates, capacity)
        return Session(plan, schema, scale=scale, log_path=log_path)
    except ElicitError as e:
        _fail(str(e))
        raise AssertionError("unreachable")


@click.group()
def main() -> None:
    """Probability elicitation workbench for discrete belief networks."""


@main.command("plan")
@click.option("--schema", "schema_path", required=True, type=click.Path())
@click.option("--templates", "templates_path", required=True, type=click.Path())
@click.option("--scale", "scale_path", type=click.Path(), default=None)
@click.option("--grid", type=float, default=None, help="Rounding grid override.")
@click.option("--capacity", type=int, default=DEFAULT_CAPACITY, show_default=True,
              help="Fragments per sheet (2 or 3).")
@click.option("--out", "out_dir", type=click.Path(), default=".", show_default=True,
              help="Directory receiving plan.json and sheets.txt.")
def cmd_plan(schema_path, templates_path, scale_path, grid, capacity, out_dir):
    """Build the elicitation plan and printable sheets."""
    schema = _load_schema(schema_path)
    templates = _load_templates(templates_path)
    scale = _load_scale(scale_path, grid)
    try:
        plan = build_plan(schema, templates, capacity)
    except ElicitError as e:
        _fail(str(e))

    counts = count_assessments(schema)
    for name, count in counts.per_variable.items():
        suffix = (
            " (deterministic)"
            if schema.variable(name).kind == "deterministic"
            else ""
        )
        click.echo(f"{name}: {count.entries} entries{suffix}")
    click.echo(f"total: {counts.total_entries} entries")
    click.echo(f"plan: {len(plan.items())} items on {len(plan.sheets)} sheets")

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    plan_path = out / "plan.json"
    sheets_path = out / "sheets.txt"
    plan_path.write_text(plan_to_json(plan), encoding="utf-8")
    sheets_path.write_text(render_sheets_text(plan, scale), encoding="utf-8")
    click.echo(f"wrote {plan_path}")
    click.echo(f"wrote {sheets_path}")


@main.command("compile")
@click.option("--schema", "schema_path", required=True, type=click.Path())
@click.option("--session", "session_path", required=True, type=click.Path())
@click.option("--templates", "templates_path", type=click.Path(), default=None,
              help="Optional; compiling needs only the schema's structure.")
@click.option("--scale", "scale_path", type=click.Path(), default=None)
@click.option("--grid", type=float, default=None)
@click.option("--capacity", type=int, default=DEFAULT_CAPACITY)
@click.option("--out", "out_path", type=click.Path(), default="cpt.json",
              show_default=True)
def cmd_compile(schema_path, session_path, templates_path, scale_path, grid,
                capacity, out_path):
    """Replay a session log and compile conditional probability tables."""
    schema = _load_schema(schema_path)
    scale = _load_scale(scale_path, grid)
    if not Path(session_path).exists():
        _fail(f"no such session log: {session_path}")
    templates = (
        _load_templates(templates_path)
        if templates_path is not None
        else _generic_templates(schema)
    )
    session = _build_session(schema, templates, scale, capacity, session_path)
    try:
        tables = compile_cpts(session, schema)
    except CompileError as e:
        click.echo("compile failed:")
        for violation in e.violations:
            click.echo(f"  {violation}")
        sys.exit(COMPILE_EXIT)
    finally:
        session.close()
    Path(out_path).write_text(
        write_cpt_file(tables, schema.names()), encoding="utf-8"
    )
    click.echo(f"wrote {out_path}")


@main.command("evaluate")
@click.option("--schema", "schema_path", required=True, type=click.Path())
@click.option("--cases", "cases_path", required=True, type=click.Path())
@click.option("--query", "query_variable", required=True,
              help="Variable whose posterior is scored against case labels.")
@click.option("--cpt", "cpt_path", type=click.Path(), default=None,
              help="Compiled tables; alternative to --session.")
@click.option("--session", "session_path", type=click.Path(), default=None,
              help="Session log to compile on the fly; alternative to --cpt.")
@click.option("--scale", "scale_path", type=click.Path(), default=None)
@click.option("--grid", type=float, default=None)
@click.option("--near-tie", "near_tie", type=float, default=DEFAULT_NEAR_TIE,
              show_default=True, help="Margin below the best posterior that "
              "still counts as almost correct.")
@click.option("--exclude-label", "exclude_labels", multiple=True,
              help="Drop cases with this label entirely; repeatable.")
@click.option("--out", "out_path", type=click.Path(), default="report.json",
              show_default=True)
def cmd_evaluate(schema_path, cases_path, query_variable, cpt_path,
                 session_path, scale_path, grid, near_tie, exclude_labels,
                 out_path):
    """Score a quantified network against a labeled case file."""
    schema = _load_schema(schema_path)
    if query_variable not in schema:
        _fail(f"unknown variable: {query_variable}")
    if cpt_path is not None:
        try:
            tables = read_cpt_file(schema, _read_text(cpt_path))
        except ElicitError as e:
            _fail(str(e))
    elif session_path is not None:
        if not Path(session_path).exists():
            _fail(f"no such session log: {session_path}")
        scale = _load_scale(scale_path, grid)
        session = _build_session(
            schema, _generic_templates(schema), scale, DEFAULT_CAPACITY,
            session_path,
        )
        try:
            tables = compile_cpts(session, schema)
        except CompileError as e:
            click.echo("compile failed:")
            for violation in e.violations:
                click.echo(f"  {violation}")
            sys.exit(COMPILE_EXIT)
        finally:
            session.close()
    else:
        _fail("evaluate needs --cpt or --session")

    try:
        network = CompiledNetwork(schema, tables)
        cases = parse_cases(schema, query_variable, _read_text(cases_path))
        config = EvaluationConfig(query_variable, near_tie, tuple(exclude_labels))
        report = evaluate(network, cases, config)
    except ElicitError as e:
        _fail(str(e))
    Path(out_path).write_text(report_to_json(report, config), encoding="utf-8")
    click.echo(report_to_text(report, config), nl=False)
    click.echo(f"wrote {out_path}")


@main.command("serve")
@click.option("--schema", "schema_path", required=True, type=click.Path())
@click.option("--templates", "templates_path", required=True, type=click.Path())
@click.option("--session", "session_path", required=True, type=click.Path(),
              help="Session log; created when absent, replayed when present.")
@click.option("--scale", "scale_path", type=click.Path(), default=None)
@click.option("--grid", type=float, default=None)
@click.option("--capacity", type=int, default=DEFAULT_CAPACITY)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--ui", "ui_dir", type=click.Path(), default=None,
              help="Directory of static UI files to serve at the web root.")
def cmd_serve(schema_path, templates_path, session_path, scale_path, grid,
              capacity, host, port, ui_dir):
    """Serve the elicitation session over HTTP for the companion UI."""
    import uvicorn

    from .service import create_app

    if ui_dir is not None and not Path(ui_dir).is_dir():
        _fail(f"no such ui directory: {ui_dir}")
    schema = _load_schema(schema_path)
    templates = _load_templates(templates_path)
    scale = _load_scale(scale_path, grid)
    session = _build_session(schema, templates, scale, capacity, session_path)
    app = create_app(session, ui_dir=ui_dir)
    click.echo(f"serving on http://{host}:{port}")
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    finally:
        session.close()


if __name__ == "__main__":
    main()
