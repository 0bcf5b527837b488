"""Probability elicitation workbench for discrete belief networks.

Builds elicitation plans from a network schema and question templates,
records assessment sessions against a verbal-numerical probability scale,
derives related distributions through trend adjustments, compiles the
result into conditional probability tables, and evaluates the quantified
network on case files with exact inference.
"""

from .errors import (
    CompileError,
    ElicitError,
    ImpossibleEvidenceError,
    InferenceError,
    SchemaError,
    ScaleError,
    SessionError,
    TemplateError,
    TrendError,
)
from .inference import (
    CompiledNetwork,
    EvaluationConfig,
    EvaluationReport,
    EvidenceCase,
    Posterior,
    Prediction,
    cases_to_jsonl,
    enumerate_posterior,
    evaluate,
    parse_cases,
    percent,
    posterior,
    predict,
    report_to_json,
    report_to_text,
)
from .plan import (
    DEFAULT_CAPACITY,
    ElicitationItem,
    ElicitationPlan,
    FragmentTemplate,
    Sheet,
    build_plan,
    item_id_for,
    parse_plan,
    parse_templates,
    plan_to_json,
    render_fragment,
    render_sheets_text,
    templates_to_json,
)
from .scale import (
    DEFAULT_GRID,
    ProbabilityScale,
    ScaleAnchor,
    default_scale,
    nearest_anchor,
    parse_scale,
    scale_to_json,
    snap,
    verbal_to_number,
)
from .schema import (
    AssessmentCounts,
    ConditionalTable,
    NetworkSchema,
    ParentConfiguration,
    ProbabilityVector,
    VariableDef,
    count_assessments,
    enumerate_parent_configs,
    parent_config,
    parse_schema,
    read_cpt_file,
    serialize_schema,
    validate_schema,
    write_cpt_file,
)
from .fixtures import (
    build_demo_session,
    demo_cases,
    demo_network,
    demo_schema,
    demo_templates,
    write_demo_project,
)
from .session import (
    Assessment,
    DistributionStatus,
    NUMERIC_MARK,
    PROVENANCE_KINDS,
    RESIDUAL_SUGGESTED,
    Session,
    TREND_DERIVED,
    VERBAL_ANCHOR,
    compile_cpts,
    session_state_json,
    trend_from_record,
    trend_record,
)
from .trend import (
    TOWARD_FIRST,
    TOWARD_LAST,
    TrendSpec,
    apply_trend,
    derive_distribution,
    derived_values,
    snap_distribution,
)

__version__ = "0.1.0"

__all__ = [
    "AssessmentCounts",
    "Assessment",
    "CompileError",
    "CompiledNetwork",
    "ConditionalTable",
    "DEFAULT_CAPACITY",
    "DEFAULT_GRID",
    "DistributionStatus",
    "ElicitError",
    "ElicitationItem",
    "ElicitationPlan",
    "EvaluationConfig",
    "EvaluationReport",
    "EvidenceCase",
    "FragmentTemplate",
    "ImpossibleEvidenceError",
    "InferenceError",
    "NUMERIC_MARK",
    "NetworkSchema",
    "PROVENANCE_KINDS",
    "ParentConfiguration",
    "Posterior",
    "Prediction",
    "ProbabilityScale",
    "ProbabilityVector",
    "RESIDUAL_SUGGESTED",
    "ScaleAnchor",
    "ScaleError",
    "SchemaError",
    "Session",
    "SessionError",
    "Sheet",
    "TOWARD_FIRST",
    "TOWARD_LAST",
    "TREND_DERIVED",
    "TemplateError",
    "TrendError",
    "TrendSpec",
    "VERBAL_ANCHOR",
    "VariableDef",
    "apply_trend",
    "build_demo_session",
    "build_plan",
    "cases_to_jsonl",
    "compile_cpts",
    "count_assessments",
    "default_scale",
    "demo_cases",
    "demo_network",
    "demo_schema",
    "demo_templates",
    "derive_distribution",
    "derived_values",
    "enumerate_parent_configs",
    "enumerate_posterior",
    "evaluate",
    "item_id_for",
    "nearest_anchor",
    "parent_config",
    "parse_cases",
    "parse_plan",
    "parse_scale",
    "parse_schema",
    "parse_templates",
    "percent",
    "plan_to_json",
    "posterior",
    "predict",
    "read_cpt_file",
    "render_fragment",
    "render_sheets_text",
    "report_to_json",
    "report_to_text",
    "scale_to_json",
    "serialize_schema",
    "session_state_json",
    "snap",
    "snap_distribution",
    "templates_to_json",
    "trend_from_record",
    "trend_record",
    "validate_schema",
    "verbal_to_number",
    "write_cpt_file",
    "write_demo_project",
]
