"""A desk-scale oesophageal staging network used by demos and tests.

The network models carcinoma characteristics (shape, length, location),
depth of invasion, metastases, a deterministic staging classification, and
two diagnostic tests.  Its staging node needs 144 table entries and its
echo-endoscopy node 80, so the assessment-count accounting is exercised at
a realistic shape while staying small enough for exhaustive inference.

Everything here is deterministic: the fully quantified demo session always
produces the same log, and the generated case file always contains 184
cases of which 29 are unlabeled, 94 score strictly correct, and 12 more
fall within the near-tie margin.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone
from pathlib import Path
import json

import numpy as np

from .inference import (
    CompiledNetwork,
    EvidenceCase,
    cases_to_jsonl,
    posterior,
)
from .plan import FragmentTemplate, build_plan, templates_to_json
from .scale import ProbabilityScale, default_scale, scale_to_json
from .schema import (
    ConditionalTable,
    NetworkSchema,
    ParentConfiguration,
    ProbabilityVector,
    VariableDef,
    enumerate_parent_configs,
    parent_config,
    serialize_schema,
)
from .session import Session, VERBAL_ANCHOR, compile_cpts
from .trend import TOWARD_LAST, TrendSpec, derive_distribution

SHAPE_STATES = ("polypoid", "ulcerating", "scirrhous")
LENGTH_STATES = ("less than 5 cm", "5 to 10 cm", "more than 10 cm")
LOCATION_STATES = (
    "proximal third",
    "middle third",
    "distal third",
    "gastro-oesophageal junction",
)
INVASION_STATES = (
    "submucosa (T1)",
    "muscularis propria (T2)",
    "adventitia (T3)",
    "neighbouring structures (T4)",
)
LYMPH_STATES = (
    "no lymphatic metastases",
    "regional lymphatic metastases",
    "distant lymphatic metastases",
)
HAEMA_STATES = ("absent", "present")
STAGE_STATES = ("I", "IIA", "IIB", "III", "IVA", "IVB")
ECHO_STATES = INVASION_STATES + ("not assessable",)
XRAY_STATES = ("no metastases", "lung metastases")

EVIDENCE_VARIABLES = ("Shape", "Length", "Location", "EchoInvasion", "XrayChest")
QUERY_VARIABLE = "Stage"


def _stage_of(invasion: int, lymph: int, haema: int) -> str:
    """Staging as a function of invasion depth and metastasis extent."""
    if haema == 1:
        return "IVB"
    if lymph == 2:
        return "IVA"
    if invasion == 3:
        return "III"
    if lymph == 1:
        return "III" if invasion == 2 else "IIB"
    return "I" if invasion == 0 else "IIA"


def demo_schema() -> NetworkSchema:
    variables = [
        VariableDef("Shape", SHAPE_STATES),
        VariableDef("Length", LENGTH_STATES),
        VariableDef("Location", LOCATION_STATES),
        VariableDef("Invasion", INVASION_STATES, parents=("Shape", "Length")),
        VariableDef("Lymph", LYMPH_STATES, parents=("Invasion",)),
        VariableDef("Haema", HAEMA_STATES, parents=("Invasion",)),
        VariableDef(
            "Stage", STAGE_STATES, kind="deterministic",
            parents=("Invasion", "Lymph", "Haema"),
        ),
        VariableDef("EchoInvasion", ECHO_STATES, parents=("Invasion", "Location")),
        VariableDef("XrayChest", XRAY_STATES, parents=("Haema",)),
    ]
    schema = NetworkSchema(variables)

    rows = []
    for cfg in enumerate_parent_configs(schema, "Stage"):
        assigned = cfg.as_dict()
        stage = _stage_of(
            INVASION_STATES.index(assigned["Invasion"]),
            LYMPH_STATES.index(assigned["Lymph"]),
            HAEMA_STATES.index(assigned["Haema"]),
        )
        rows.append(
            (cfg, ProbabilityVector.point_mass(len(STAGE_STATES),
                                               STAGE_STATES.index(stage)))
        )
    table = ConditionalTable("Stage", rows)

    final = [
        VariableDef(v.name, v.states, v.kind, v.parents, table)
        if v.name == "Stage" else v
        for v in schema.variables
    ]
    return NetworkSchema(final)


def demo_templates() -> dict[str, FragmentTemplate]:
    templates = [
        FragmentTemplate(
            "Shape", "",
            "How likely is it that an arbitrary oesophageal carcinoma is "
            "{state} in shape ?",
        ),
        FragmentTemplate(
            "Length", "",
            "How likely is it that an arbitrary oesophageal carcinoma has a "
            "length of {state} ?",
        ),
        FragmentTemplate(
            "Location", "",
            "How likely is it that an arbitrary oesophageal carcinoma is "
            "located in the {state} of the oesophagus ?",
        ),
        FragmentTemplate(
            "Invasion",
            "Consider a patient with a {Shape} oesophageal carcinoma; the "
            "carcinoma has a length of {Length}.",
            "How likely is it that this carcinoma invades into the {state} "
            "of the patient's oesophageal wall, but not beyond ?",
        ),
        FragmentTemplate(
            "Lymph",
            "Consider a patient whose oesophageal carcinoma invades into the "
            "{Invasion} of the oesophageal wall, but not beyond.",
            "How likely is it that this patient has {state} ?",
        ),
        FragmentTemplate(
            "Haema",
            "Consider a patient whose oesophageal carcinoma invades into the "
            "{Invasion} of the oesophageal wall, but not beyond.",
            "How likely is it that haematogenous metastases are {state} in "
            "this patient ?",
        ),
        FragmentTemplate(
            "EchoInvasion",
            "Consider a patient whose oesophageal carcinoma is located in "
            "the {Location} of the oesophagus and invades into the "
            "{Invasion} of the oesophageal wall, but not beyond.",
            "How likely is it that an echo-endoscopic examination reports "
            "the depth of invasion as {state} ?",
        ),
        FragmentTemplate(
            "XrayChest",
            "Consider a patient in whom haematogenous metastases are "
            "{Haema}.",
            "How likely is it that an X-ray of this patient's chest shows "
            "{state} ?",
        ),
    ]
    return {t.variable: t for t in templates}


# Hand-chosen grid-aligned rows for the quantified demo network.  The Lymph
# row under T3 deliberately leaves its two leading states 0.05 apart, which
# makes stage posteriors with genuine near-ties reachable from evidence.
INVASION_POLYPOID = {
    "less than 5 cm": (0.40, 0.30, 0.20, 0.10),
    "5 to 10 cm": (0.25, 0.35, 0.25, 0.15),
    "more than 10 cm": (0.10, 0.30, 0.35, 0.25),
}
LYMPH_ROWS = {
    "submucosa (T1)": (0.80, 0.15, 0.05),
    "muscularis propria (T2)": (0.60, 0.30, 0.10),
    "adventitia (T3)": (0.40, 0.35, 0.25),
    "neighbouring structures (T4)": (0.20, 0.45, 0.35),
}
HAEMA_ROWS = {
    "submucosa (T1)": (0.95, 0.05),
    "muscularis propria (T2)": (0.85, 0.15),
    "adventitia (T3)": (0.70, 0.30),
    "neighbouring structures (T4)": (0.50, 0.50),
}
ECHO_ROWS = {
    "submucosa (T1)": (0.60, 0.20, 0.10, 0.05, 0.05),
    "muscularis propria (T2)": (0.15, 0.55, 0.15, 0.05, 0.10),
    "adventitia (T3)": (0.05, 0.15, 0.55, 0.15, 0.10),
    "neighbouring structures (T4)": (0.05, 0.10, 0.20, 0.50, 0.15),
}
ECHO_ROWS_JUNCTION = {
    "submucosa (T1)": (0.45, 0.20, 0.10, 0.05, 0.20),
    "muscularis propria (T2)": (0.10, 0.45, 0.15, 0.05, 0.25),
    "adventitia (T3)": (0.05, 0.15, 0.45, 0.10, 0.25),
    "neighbouring structures (T4)": (0.05, 0.10, 0.15, 0.40, 0.30),
}
XRAY_ROWS = {"absent": (0.90, 0.10), "present": (0.30, 0.70)}


def _demo_clock():
    t = datetime(2024, 5, 1, 9, 0, tzinfo=timezone.utc)
    step = timedelta(minutes=1)
    current = [t - step]

    def tick() -> str:
        current[0] += step
        return current[0].isoformat()

    return tick


def build_demo_session(
    log_path: str | Path | None = None,
    scale: ProbabilityScale | None = None,
) -> Session:
    """A fully quantified session over the demo network.

    Exercises every provenance: verbal anchors on the priors, numeric marks
    for most rows, accepted residual suggestions for the last Lymph state,
    and two chained trends deriving the ulcerating and scirrhous invasion
    rows from the polypoid ones.
    """
    schema = demo_schema()
    plan = build_plan(schema, demo_templates())
    session = Session(plan, schema, scale=scale, log_path=log_path,
                      clock=_demo_clock())

    def items(variable, assignments):
        cfg = parent_config(schema, variable, assignments)
        return session.plan.distribution_index[(variable, cfg)], cfg

    def record_row(variable, assignments, values):
        ids, _ = items(variable, assignments)
        for item_id, value in zip(ids, values):
            session.record_assessment(item_id, value)

    shape_ids, _ = items("Shape", {})
    session.record_assessment(shape_ids[0], None, VERBAL_ANCHOR, "fifty-fifty")
    session.record_assessment(shape_ids[1], None, VERBAL_ANCHOR, "uncertain")
    session.record_assessment(shape_ids[2], None, VERBAL_ANCHOR, "uncertain")

    length_ids, _ = items("Length", {})
    session.record_assessment(length_ids[0], None, VERBAL_ANCHOR, "fifty-fifty")
    session.record_assessment(length_ids[1], 0.35)
    session.record_assessment(length_ids[2], None, VERBAL_ANCHOR, "improbable")

    record_row("Location", {}, (0.15, 0.30, 0.40, 0.15))

    for length, values in INVASION_POLYPOID.items():
        record_row("Invasion", {"Shape": "polypoid", "Length": length}, values)
    for length in LENGTH_STATES:
        for source_shape, target_shape, alpha in (
            ("polypoid", "ulcerating", 0.10),
            ("ulcerating", "scirrhous", 0.20),
        ):
            spec = TrendSpec(
                "Invasion",
                parent_config(schema, "Invasion",
                              {"Shape": source_shape, "Length": length}),
                parent_config(schema, "Invasion",
                              {"Shape": target_shape, "Length": length}),
                alpha,
                TOWARD_LAST,
            )
            derive_distribution(session, spec)

    for invasion, values in LYMPH_ROWS.items():
        ids, cfg = items("Lymph", {"Invasion": invasion})
        session.record_assessment(ids[0], values[0])
        session.record_assessment(ids[1], values[1])
        session.accept_residual("Lymph", cfg)

    for invasion, values in HAEMA_ROWS.items():
        record_row("Haema", {"Invasion": invasion}, values)

    for invasion in INVASION_STATES:
        for location in LOCATION_STATES:
            rows = (
                ECHO_ROWS_JUNCTION
                if location == "gastro-oesophageal junction"
                else ECHO_ROWS
            )
            record_row(
                "EchoInvasion",
                {"Invasion": invasion, "Location": location},
                rows[invasion],
            )

    for haema, values in XRAY_ROWS.items():
        record_row("XrayChest", {"Haema": haema}, values)

    return session


def demo_network() -> CompiledNetwork:
    session = build_demo_session()
    schema = session.schema
    return CompiledNetwork(schema, compile_cpts(session, schema))


# ---------------------------------------------------------------------------
# Case generation
# ---------------------------------------------------------------------------

TOTAL_CASES = 184
UNLABELED_CASES = 29
STRICT_CORRECT_CASES = 94
NEAR_TIE_EXTRA_CASES = 12


def _forward_sample(network: CompiledNetwork, rng: np.random.Generator) -> dict:
    sampled: dict[str, str] = {}
    for var in network.schema.variables:
        cfg = ParentConfiguration(tuple((p, sampled[p]) for p in var.parents))
        row = network.tables[var.name].row(cfg)
        index = rng.choice(len(var.states), p=np.asarray(row.values))
        sampled[var.name] = var.states[int(index)]
    return sampled


def demo_cases(
    network: CompiledNetwork | None = None,
    seed: int = 7,
    delta: float = 0.05,
) -> list[EvidenceCase]:
    """184 deterministic cases engineered to fixed scoring counts.

    Against the demo network at the given near-tie margin: 29 cases carry no
    label, 94 labeled cases score strictly correct, 12 more are within the
    margin of the best posterior, and the remaining 49 are beyond it.  No
    labeled case sits at an exact posterior tie, so a zero margin collapses
    the near-tie count onto the strict count.
    """
    network = network if network is not None else demo_network()
    rng = np.random.default_rng(seed)
    stage = network.schema.variable(QUERY_VARIABLE)

    need = {
        "near": NEAR_TIE_EXTRA_CASES,
        "far": TOTAL_CASES - UNLABELED_CASES - STRICT_CORRECT_CASES
               - NEAR_TIE_EXTRA_CASES,
        "correct": STRICT_CORRECT_CASES,
        "blank": UNLABELED_CASES,
    }
    picked: dict[str, list[EvidenceCase]] = {kind: [] for kind in need}
    margin = 1e-4

    attempts = 0
    while any(len(picked[k]) < need[k] for k in need):
        attempts += 1
        if attempts > 50_000:
            have = {k: len(v) for k, v in picked.items()}
            raise RuntimeError(f"case generation starved: {have}")
        sampled = _forward_sample(network, rng)
        chosen = [v for v in EVIDENCE_VARIABLES if rng.random() < 0.85]
        if not chosen:
            continue
        evidence = {v: sampled[v] for v in chosen}

        values = posterior(network, QUERY_VARIABLE, evidence).distribution.values
        best = max(range(len(values)), key=lambda i: (values[i], -i))
        runner_up = max(
            (i for i in range(len(values)) if i != best),
            key=lambda i: (values[i], -i),
        )
        gap = values[best] - values[runner_up]
        beyond = [
            i for i in range(len(values))
            if values[best] - values[i] > delta + margin
        ]

        if len(picked["near"]) < need["near"] and margin < gap < delta - margin:
            picked["near"].append(
                EvidenceCase("", evidence, stage.states[runner_up])
            )
        elif len(picked["far"]) < need["far"] and beyond:
            label = stage.states[max(beyond, key=lambda i: (values[i], -i))]
            picked["far"].append(EvidenceCase("", evidence, label))
        elif len(picked["correct"]) < need["correct"]:
            picked["correct"].append(
                EvidenceCase("", evidence, stage.states[best])
            )
        elif len(picked["blank"]) < need["blank"]:
            picked["blank"].append(EvidenceCase("", evidence, None))

    cases = picked["near"] + picked["far"] + picked["correct"] + picked["blank"]
    order = rng.permutation(len(cases))
    return [
        EvidenceCase(f"case-{n + 1:03}", cases[i].evidence, cases[i].label)
        for n, i in enumerate(order)
    ]


def write_demo_project(directory: str | Path, seed: int = 7) -> dict[str, Path]:
    """Write every demo artifact (schema, templates, scale, log, cases)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = {
        "schema": directory / "schema.json",
        "templates": directory / "templates.json",
        "scale": directory / "scale.json",
        "session": directory / "session.jsonl",
        "cases": directory / "cases.jsonl",
    }
    paths["schema"].write_text(serialize_schema(demo_schema()), encoding="utf-8")
    paths["templates"].write_text(
        templates_to_json(demo_templates()), encoding="utf-8"
    )
    paths["scale"].write_text(
        json.dumps(scale_to_json(default_scale()), indent=2) + "\n",
        encoding="utf-8",
    )
    if paths["session"].exists():
        paths["session"].unlink()
    session = build_demo_session(log_path=paths["session"])
    network = CompiledNetwork(session.schema, compile_cpts(session))
    session.close()
    paths["cases"].write_text(
        cases_to_jsonl(demo_cases(network, seed=seed)), encoding="utf-8"
    )
    return paths
