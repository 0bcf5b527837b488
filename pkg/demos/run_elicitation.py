"""A guided tour of one elicitation session, from blank sheets to tables.

Run from the repository root after installing the package:

    python3 demos/run_elicitation.py

Artifacts land in demos/output/.
"""

from pathlib import Path

from elicit import (
    Session,
    build_plan,
    compile_cpts,
    count_assessments,
    default_scale,
    demo_schema,
    demo_templates,
    derive_distribution,
    render_sheets_text,
    session_state_json,
    trend_from_record,
    write_cpt_file,
)

OUTPUT = Path(__file__).parent / "output"


def banner(text):
    print()
    print(text)
    print("-" * len(text))


def main():
    OUTPUT.mkdir(exist_ok=True)
    schema = demo_schema()
    templates = demo_templates()

    banner("1. How much is there to assess?")
    counts = count_assessments(schema)
    for name, count in counts.per_variable.items():
        kind = schema.variable(name).kind
        print(f"  {name:<14} {count.entries:>4} entries ({kind})")
    print(f"  {'total':<14} {counts.total_entries:>4} entries")

    banner("2. Pack the questions onto sheets")
    plan = build_plan(schema, templates)
    print(f"  {len(plan.items())} items on {len(plan.sheets)} sheets "
          f"(capacity {plan.capacity})")
    sheets = render_sheets_text(plan, default_scale())
    first_page = sheets.split("\f")[0]
    print("\n  The first sheet, as the expert sees it:\n")
    for line in first_page.splitlines():
        print(f"    {line}")

    banner("3. Record answers (log first, acknowledge second)")
    log = OUTPUT / "session.jsonl"
    if log.exists():
        log.unlink()
    session = Session(plan, schema, log_path=log)

    # Verbal answers resolve through the anchor scale.
    session.record_assessment("Shape:0:0", None, "verbal-anchor", "fifty-fifty")
    session.record_assessment("Shape:0:1", None, "verbal-anchor", "uncertain")
    session.record_assessment("Shape:0:2", None, "verbal-anchor", "uncertain")
    shape = session.status("Shape", plan.item("Shape:0:0").parent_config)
    print(f"  Shape after three verbal answers: {shape.assessed}")

    # Numeric marks snap to the 0.05 grid.
    status = session.record_assessment("Length:0:0", 0.52)
    print(f"  A mark at 0.52 snaps to {status.assessed['less than 5 cm']}")
    session.record_assessment("Length:0:1", 0.35)
    session.record_assessment("Length:0:2", None, "verbal-anchor", "improbable")

    banner("4. Let a trend fill a neighbouring column")
    source = plan.item("Invasion:0:0").parent_config
    for item_id, value in zip(
        session.plan.distribution_index[("Invasion", source)],
        (0.40, 0.30, 0.20, 0.10),
    ):
        session.record_assessment(item_id, value)
    spec = trend_from_record(schema, {
        "kind": "trend",
        "source": {"variable": "Invasion",
                   "parents": {"Shape": "polypoid",
                               "Length": "less than 5 cm"}},
        "target": {"variable": "Invasion",
                   "parents": {"Shape": "ulcerating",
                               "Length": "less than 5 cm"}},
        "alpha": 0.10,
        "direction": "toward-last",
    })
    derived = derive_distribution(session, spec)
    print("  Source (assessed by hand):  (0.4, 0.3, 0.2, 0.1)")
    print("  Target (derived, snapped): ",
          tuple(round(a.value, 10) for a in derived))

    banner("5. Accept the suggested residual")
    lymph = plan.item("Lymph:0:0").parent_config
    session.record_assessment("Lymph:0:0", 0.80)
    session.record_assessment("Lymph:0:1", 0.15)
    before = session.status("Lymph", lymph)
    assessed = {s: round(v, 10) for s, v in before.assessed.items()}
    print(f"  Assessed {assessed}, residual {before.residual_mass:.2f}")
    accepted = session.accept_residual("Lymph", lymph)
    print(f"  Accepted suggestion fills: "
          f"{[(a.state, round(a.value, 10)) for a in accepted]}")
    print(f"  Violations now: "
          f"{session.validate_distribution('Lymph', lymph) or 'none'}")

    banner("6. The log replays byte-identically")
    state = session_state_json(session)
    session.close()
    replay = Session(build_plan(schema, templates), schema, log_path=log)
    print(f"  Replayed state matches: {session_state_json(replay) == state}")
    print(f"  Progress: {replay.progress()['assessed']} of "
          f"{replay.progress()['total']} items")
    replay.close()

    banner("7. Compiling demands completeness")
    try:
        compile_cpts(replay, schema)
    except Exception as e:
        violations = getattr(e, "violations", [])
        print(f"  Compile refused: {len(violations)} probabilities missing")
        print(f"  First violation: {violations[0]}")

    print("\nA fully answered session lives in elicit.fixtures; "
          "demos/evaluate_network.py picks it up from there.")
    cpt = OUTPUT / "demo_cpt.json"
    from elicit import build_demo_session
    full = build_demo_session()
    cpt.write_text(write_cpt_file(compile_cpts(full, schema), schema.names()),
                   encoding="utf-8")
    full.close()
    print(f"Wrote {cpt}")


if __name__ == "__main__":
    main()
