"""Exact inference on the compiled network and case-based evaluation.

Posteriors are computed by variable elimination with a deterministic
min-degree ordering; a brute-force enumeration over the joint serves as an
independent oracle for small networks.  Evaluation scores labeled cases two
ways: strict (the predicted state equals the label) and near-tie (the
label's posterior is within a small margin of the best posterior).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ImpossibleEvidenceError, InferenceError
from .schema import (
    ConditionalTable,
    NetworkSchema,
    ParentConfiguration,
    ProbabilityVector,
    enumerate_parent_configs,
)

ENUMERATION_LIMIT = 10_000_000
DEFAULT_NEAR_TIE = 0.05


@dataclass(frozen=True)
class CompiledNetwork:
    """A schema plus one conditional table per variable."""

    schema: NetworkSchema
    tables: dict[str, ConditionalTable]

    def __post_init__(self):
        for var in self.schema.variables:
            if var.name not in self.tables:
                raise InferenceError(f"no table for variable: {var.name}")


@dataclass(frozen=True)
class Posterior:
    variable: str
    distribution: ProbabilityVector


@dataclass(frozen=True)
class Prediction:
    state: str
    posterior: Posterior


@dataclass(frozen=True)
class EvidenceCase:
    case_id: str
    evidence: dict[str, str]
    label: str | None = None


@dataclass(frozen=True)
class EvaluationConfig:
    query_variable: str
    near_tie_delta: float = DEFAULT_NEAR_TIE
    exclude_labels: tuple[str, ...] = ()

    def __post_init__(self):
        if not 0.0 <= self.near_tie_delta <= 1.0:
            raise InferenceError(
                f"near-tie margin {self.near_tie_delta} outside [0,1]"
            )


@dataclass(frozen=True)
class EvaluationReport:
    total_cases: int
    excluded_unlabeled: int
    evaluated: int
    strict_correct: int
    near_tie_correct: int
    strict_accuracy: float
    near_tie_accuracy: float
    confusion: dict[str, dict[str, int]] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Factors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Factor:
    vars: tuple[str, ...]
    values: np.ndarray


def _product(f: _Factor, g: _Factor) -> _Factor:
    out_vars = f.vars + tuple(v for v in g.vars if v not in f.vars)
    fa = f.values.reshape(f.values.shape + (1,) * (len(out_vars) - len(f.vars)))
    order = [g.vars.index(v) for v in out_vars if v in g.vars]
    gt = np.transpose(g.values, order)
    shape = []
    i = 0
    for v in out_vars:
        if v in g.vars:
            shape.append(gt.shape[i])
            i += 1
        else:
            shape.append(1)
    return _Factor(out_vars, fa * gt.reshape(shape))


def _sum_out(f: _Factor, name: str) -> _Factor:
    axis = f.vars.index(name)
    return _Factor(f.vars[:axis] + f.vars[axis + 1:], f.values.sum(axis=axis))


def _factor_for(network: CompiledNetwork, name: str) -> _Factor:
    var = network.schema.variable(name)
    table = network.tables[name]
    cards = [len(network.schema.variable(p).states) for p in var.parents]
    configs = enumerate_parent_configs(network.schema, name)
    data = np.array([table.row(cfg).values for cfg in configs], dtype=float)
    return _Factor(
        tuple(var.parents) + (name,), data.reshape(cards + [len(var.states)])
    )


def _observe(f: _Factor, evidence_index: dict[str, int]) -> _Factor:
    vars_, values = f.vars, f.values
    for name in f.vars:
        if name in evidence_index:
            axis = vars_.index(name)
            values = np.take(values, evidence_index[name], axis=axis)
            vars_ = vars_[:axis] + vars_[axis + 1:]
    return _Factor(vars_, values)


def _evidence_indices(schema: NetworkSchema, evidence) -> dict[str, int]:
    indices = {}
    for name, state in evidence.items():
        if name not in schema:
            raise InferenceError(f"unknown variable: {name}")
        var = schema.variable(name)
        if state not in var.states:
            raise InferenceError(f"{name}: unknown state: {state}")
        indices[name] = var.states.index(state)
    return indices


def _elimination_order(factors: list[_Factor], keep: set[str]) -> list[str]:
    """Min-degree order over the interaction graph; ties break by name."""
    neighbors: dict[str, set[str]] = {}
    for f in factors:
        for v in f.vars:
            neighbors.setdefault(v, set()).update(f.vars)
    for v, ns in neighbors.items():
        ns.discard(v)
    pending = set(neighbors) - keep
    order = []
    while pending:
        v = min(pending, key=lambda u: (len(neighbors[u]), u))
        order.append(v)
        pending.remove(v)
        ns = neighbors.pop(v)
        for a in ns:
            neighbors[a].discard(v)
            neighbors[a].update(ns - {a})
    return order


# ---------------------------------------------------------------------------
# Posteriors
# ---------------------------------------------------------------------------


def posterior(network: CompiledNetwork, query: str, evidence) -> Posterior:
    """Exact posterior of the query variable by variable elimination."""
    schema = network.schema
    if query not in schema:
        raise InferenceError(f"unknown variable: {query}")
    qvar = schema.variable(query)
    evidence_index = _evidence_indices(schema, evidence)

    # Evidence is absorbed by slicing each factor.  Evidence on the query
    # itself becomes an indicator factor so the result keeps the query axis
    # and still detects impossible evidence.
    slice_index = {v: i for v, i in evidence_index.items() if v != query}
    factors = [
        _observe(_factor_for(network, var.name), slice_index)
        for var in schema.variables
    ]
    if query in evidence_index:
        onehot = np.zeros(len(qvar.states))
        onehot[evidence_index[query]] = 1.0
        factors.append(_Factor((query,), onehot))

    for name in _elimination_order(factors, keep={query}):
        touching = [f for f in factors if name in f.vars]
        factors = [f for f in factors if name not in f.vars]
        merged = touching[0]
        for f in touching[1:]:
            merged = _product(merged, f)
        factors.append(_sum_out(merged, name))

    result = _Factor((), np.array(1.0))
    for f in factors:
        result = _product(result, f)
    values = np.atleast_1d(result.values)
    z = values.sum()
    if z <= 0.0:
        raise ImpossibleEvidenceError("impossible evidence")
    return Posterior(query, ProbabilityVector((values / z).tolist()))


def enumerate_posterior(network: CompiledNetwork, query: str, evidence) -> Posterior:
    """Brute-force posterior summing the joint; the oracle for posterior().

    Deliberately shares nothing with the elimination path: plain dictionary
    row lookups over every full assignment.
    """
    schema = network.schema
    if query not in schema:
        raise InferenceError(f"unknown variable: {query}")
    qvar = schema.variable(query)
    _evidence_indices(schema, evidence)

    size = 1
    for var in schema.variables:
        size *= len(var.states)
    if size > ENUMERATION_LIMIT:
        raise InferenceError(f"joint too large to enumerate: {size} assignments")

    names = [var.name for var in schema.variables]
    totals = [0.0] * len(qvar.states)
    for combo in itertools.product(*(var.states for var in schema.variables)):
        assignment = dict(zip(names, combo))
        if any(assignment[v] != s for v, s in evidence.items()):
            continue
        p = 1.0
        for var in schema.variables:
            cfg = ParentConfiguration(
                tuple((parent, assignment[parent]) for parent in var.parents)
            )
            row = network.tables[var.name].row(cfg)
            p *= row[var.state_index(assignment[var.name])]
            if p == 0.0:
                break
        if p > 0.0:
            totals[qvar.states.index(assignment[query])] += p
    z = math.fsum(totals)
    if z <= 0.0:
        raise ImpossibleEvidenceError("impossible evidence")
    return Posterior(query, ProbabilityVector(t / z for t in totals))


def predict(network: CompiledNetwork, query: str, evidence) -> Prediction:
    """The most likely state; exact ties go to the lowest state index."""
    post = posterior(network, query, evidence)
    values = post.distribution.values
    best = max(range(len(values)), key=lambda i: (values[i], -i))
    return Prediction(network.schema.variable(query).states[best], post)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def evaluate(
    network: CompiledNetwork, cases: list[EvidenceCase], config: EvaluationConfig
) -> EvaluationReport:
    """Score cases against their labels, strict and near-tie.

    Cases whose label is in config.exclude_labels are dropped before any
    accounting, exactly as if they were not in the list; unlabeled cases are
    excluded but counted.  A case is near-tie correct when the label's
    posterior is within near_tie_delta of the highest posterior.
    """
    qvar = network.schema.variable(config.query_variable)
    excluded_set = set(config.exclude_labels)
    kept = [c for c in cases if c.label not in excluded_set]

    labeled = [c for c in kept if c.label is not None]
    strict = 0
    near = 0
    confusion: dict[str, dict[str, int]] = {}
    for case in labeled:
        if case.label not in qvar.states:
            raise InferenceError(
                f"{case.case_id}: label {case.label!r} is not a state of {qvar.name}"
            )
        prediction = predict(network, config.query_variable, case.evidence)
        values = prediction.posterior.distribution
        p_best = max(values)
        p_label = values[qvar.states.index(case.label)]
        if prediction.state == case.label:
            strict += 1
        if p_label >= p_best - config.near_tie_delta:
            near += 1
        confusion.setdefault(case.label, {})
        confusion[case.label][prediction.state] = (
            confusion[case.label].get(prediction.state, 0) + 1
        )

    evaluated = len(labeled)
    ordered_confusion = {
        label: {
            state: confusion[label][state]
            for state in qvar.states
            if state in confusion[label]
        }
        for label in qvar.states
        if label in confusion
    }
    return EvaluationReport(
        total_cases=len(kept),
        excluded_unlabeled=len(kept) - evaluated,
        evaluated=evaluated,
        strict_correct=strict,
        near_tie_correct=near,
        strict_accuracy=strict / evaluated if evaluated else 0.0,
        near_tie_accuracy=near / evaluated if evaluated else 0.0,
        confusion=ordered_confusion,
    )


def percent(numerator: int, denominator: int) -> int:
    """Whole percentage, halves rounded away from zero (94/155 -> 61)."""
    if denominator == 0:
        return 0
    return math.floor(numerator / denominator * 100 + 0.5)


def report_to_json(report: EvaluationReport, config: EvaluationConfig) -> str:
    doc = {
        "query_variable": config.query_variable,
        "near_tie_delta": config.near_tie_delta,
        "exclude_labels": list(config.exclude_labels),
        "total_cases": report.total_cases,
        "excluded_unlabeled": report.excluded_unlabeled,
        "evaluated": report.evaluated,
        "strict_correct": report.strict_correct,
        "near_tie_correct": report.near_tie_correct,
        "strict_accuracy": round(report.strict_accuracy, 3),
        "near_tie_accuracy": round(report.near_tie_accuracy, 3),
        "strict_percent": percent(report.strict_correct, report.evaluated),
        "near_tie_percent": percent(report.near_tie_correct, report.evaluated),
        "confusion": report.confusion,
    }
    return json.dumps(doc, indent=2) + "\n"


def report_to_text(report: EvaluationReport, config: EvaluationConfig) -> str:
    lines = [
        f"cases: {report.total_cases}",
        f"excluded (unlabeled): {report.excluded_unlabeled}",
        f"evaluated: {report.evaluated}",
        "strict: {}/{} ({}%)".format(
            report.strict_correct,
            report.evaluated,
            percent(report.strict_correct, report.evaluated),
        ),
        "near-tie (delta={:g}): {}/{} ({}%)".format(
            config.near_tie_delta,
            report.near_tie_correct,
            report.evaluated,
            percent(report.near_tie_correct, report.evaluated),
        ),
    ]
    if report.confusion:
        lines.append("")
        lines.append("confusion (label -> predicted):")
        for label, row in report.confusion.items():
            cells = ", ".join(f"{state}={n}" for state, n in row.items())
            lines.append(f"  {label}: {cells}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Cases file
# ---------------------------------------------------------------------------


def parse_cases(schema: NetworkSchema, query_variable: str, text: str) -> list[EvidenceCase]:
    qvar = schema.variable(query_variable)
    cases = []
    for n, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise InferenceError(f"cases line {n}: {e.msg}") from None
        try:
            case_id = rec["case_id"]
            evidence = dict(rec["evidence"])
            label = rec.get("label")
        except (KeyError, TypeError) as e:
            raise InferenceError(f"cases line {n}: {e!r}") from None
        try:
            _evidence_indices(schema, evidence)
        except InferenceError as e:
            raise InferenceError(f"cases line {n}: {e}") from None
        if label is not None and label not in qvar.states:
            raise InferenceError(
                f"cases line {n}: label {label!r} is not a state of {query_variable}"
            )
        cases.append(EvidenceCase(case_id, evidence, label))
    return cases


def cases_to_jsonl(cases: list[EvidenceCase]) -> str:
    lines = [
        json.dumps(
            {"case_id": c.case_id, "evidence": c.evidence, "label": c.label}
        )
        for c in cases
    ]
    return "\n".join(lines) + "\n"
