"""Network structure: variables, parent configurations, and conditional tables.

The schema is the authoritative description of the discrete network being
quantified: every variable carries an *ordered* list of states (the order is
semantic: trends shift probability mass between adjacent states) and an
ordered list of parents.  Deterministic variables may carry their table
directly in the schema; chance variables get theirs from an elicitation
session.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping

from .errors import SchemaError

SUM_TOLERANCE = 1e-9

Kind = str  # "chance" | "deterministic"
KINDS = ("chance", "deterministic")


@dataclass(frozen=True)
class ProbabilityVector:
    """A distribution over one variable's ordered states."""

    values: tuple[float, ...]

    def __init__(self, values: Iterable[float]):
        object.__setattr__(self, "values", tuple(float(v) for v in values))

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[float]:
        return iter(self.values)

    def __getitem__(self, i: int) -> float:
        return self.values[i]

    def total(self) -> float:
        return sum(self.values)

    def is_complete(self, tolerance: float = SUM_TOLERANCE) -> bool:
        """True when every entry is a probability and the mass sums to 1."""
        in_range = all(0.0 <= v <= 1.0 for v in self.values)
        return in_range and abs(self.total() - 1.0) <= tolerance

    @classmethod
    def point_mass(cls, size: int, index: int) -> "ProbabilityVector":
        if not 0 <= index < size:
            raise ValueError(f"point-mass index {index} out of range for size {size}")
        return cls(1.0 if i == index else 0.0 for i in range(size))


@dataclass(frozen=True)
class ParentConfiguration:
    """One joint assignment of states to a variable's parents.

    Assignments are kept in schema parent order so that configurations
    compare, hash, and serialize deterministically.  The empty configuration
    stands for a parentless variable.
    """

    items: tuple[tuple[str, str], ...] = ()

    def as_dict(self) -> dict[str, str]:
        return dict(self.items)

    def __str__(self) -> str:
        if not self.items:
            return "(no parents)"
        return ", ".join(f"{name}={state}" for name, state in self.items)


@dataclass(frozen=True)
class VariableDef:
    """One network variable: ordered states, kind, and ordered parents."""

    name: str
    states: tuple[str, ...]
    kind: Kind = "chance"
    parents: tuple[str, ...] = ()
    table: "ConditionalTable | None" = None

    def __init__(
        self,
        name: str,
        states: Iterable[str],
        kind: Kind = "chance",
        parents: Iterable[str] = (),
        table: "ConditionalTable | None" = None,
    ):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "states", tuple(states))
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "parents", tuple(parents))
        object.__setattr__(self, "table", table)

    def state_index(self, state: str) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            raise SchemaError(f"{self.name}: unknown state: {state}") from None


@dataclass(frozen=True)
class NetworkSchema:
    """An ordered collection of variables forming a directed acyclic graph."""

    variables: tuple[VariableDef, ...]

    def __init__(self, variables: Iterable[VariableDef]):
        object.__setattr__(self, "variables", tuple(variables))

    @cached_property
    def _by_name(self) -> dict[str, VariableDef]:
        return {v.name: v for v in self.variables}

    def variable(self, name: str) -> VariableDef:
        try:
            return self._by_name[name]
        except KeyError:
            raise SchemaError(f"unknown variable: {name}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def chance_variables(self) -> tuple[VariableDef, ...]:
        return tuple(v for v in self.variables if v.kind == "chance")


@dataclass(frozen=True)
class ConditionalTable:
    """A distribution over one variable's states per parent configuration.

    Rows are stored in parent-configuration enumeration order, which makes
    equality, iteration, and serialization deterministic.
    """

    variable: str
    rows: tuple[tuple[ParentConfiguration, ProbabilityVector], ...]

    def __init__(
        self,
        variable: str,
        rows: Iterable[tuple[ParentConfiguration, ProbabilityVector]],
    ):
        object.__setattr__(self, "variable", variable)
        object.__setattr__(self, "rows", tuple(rows))

    @cached_property
    def _by_config(self) -> dict[ParentConfiguration, ProbabilityVector]:
        return dict(self.rows)

    def row(self, config: ParentConfiguration) -> ProbabilityVector:
        try:
            return self._by_config[config]
        except KeyError:
            raise SchemaError(
                f"{self.variable}: no table row for configuration {config}"
            ) from None

    def __len__(self) -> int:
        return len(self.rows)


def parent_config(
    schema: NetworkSchema, variable: str, assignments: Mapping[str, str]
) -> ParentConfiguration:
    """Build a validated ParentConfiguration in schema parent order."""
    var = schema.variable(variable)
    unknown = set(assignments) - set(var.parents)
    if unknown:
        raise SchemaError(
            f"{variable}: not parents of this variable: {', '.join(sorted(unknown))}"
        )
    items = []
    for parent in var.parents:
        if parent not in assignments:
            raise SchemaError(f"{variable}: configuration is missing parent {parent}")
        state = assignments[parent]
        parent_var = schema.variable(parent)
        if state not in parent_var.states:
            raise SchemaError(f"{parent}: unknown state: {state}")
        items.append((parent, state))
    return ParentConfiguration(tuple(items))


def enumerate_parent_configs(
    schema: NetworkSchema, variable: str
) -> list[ParentConfiguration]:
    """All parent configurations of a variable, last parent varying fastest.

    A parentless variable yields exactly one empty configuration.
    """
    var = schema.variable(variable)
    parent_states = [schema.variable(p).states for p in var.parents]
    configs = []
    for combo in itertools.product(*parent_states):
        configs.append(ParentConfiguration(tuple(zip(var.parents, combo))))
    return configs


def _find_cycle(schema: NetworkSchema) -> list[str] | None:
    """Return one parent-graph cycle as a variable-name path, if any."""
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {v.name: WHITE for v in schema.variables}
    # Edges point parent -> child; a cycle in either orientation is a cycle.
    children: dict[str, list[str]] = {v.name: [] for v in schema.variables}
    for v in schema.variables:
        for p in v.parents:
            if p in children:
                children[p].append(v.name)

    stack: list[str] = []

    def visit(name: str) -> list[str] | None:
        color[name] = GRAY
        stack.append(name)
        for child in children[name]:
            if color[child] == GRAY:
                i = stack.index(child)
                return stack[i:] + [child]
            if color[child] == WHITE:
                found = visit(child)
                if found:
                    return found
        stack.pop()
        color[name] = BLACK
        return None

    for v in schema.variables:
        if color[v.name] == WHITE:
            cycle = visit(v.name)
            if cycle:
                return cycle
    return None


def validate_schema(schema: NetworkSchema) -> list[str]:
    """Check every structural invariant; return human-readable violations.

    An empty list means the schema is valid.
    """
    violations: list[str] = []
    seen: set[str] = set()
    names = {v.name for v in schema.variables}

    for var in schema.variables:
        if not var.name:
            violations.append("variable with empty name")
        if var.name in seen:
            violations.append(f"duplicate variable: {var.name}")
        seen.add(var.name)

        if len(var.states) < 2:
            violations.append(f"{var.name}: fewer than 2 states")
        state_seen: set[str] = set()
        for s in var.states:
            if s in state_seen:
                violations.append(f"{var.name}: duplicate state label: {s}")
            state_seen.add(s)

        parent_seen: set[str] = set()
        for p in var.parents:
            if p in parent_seen:
                violations.append(f"{var.name}: duplicate parent: {p}")
            parent_seen.add(p)
            if p not in names:
                violations.append(f"{var.name}: unknown parent: {p}")
        if var.name in var.parents:
            violations.append(f"{var.name}: variable is its own parent")

        if var.kind not in KINDS:
            violations.append(f"{var.name}: unknown kind: {var.kind}")
        if var.table is not None:
            if var.kind != "deterministic":
                violations.append(f"{var.name}: only deterministic variables carry a table")
            else:
                violations.extend(_validate_deterministic_table(schema, var))

    # Cycle detection only makes sense once parent references resolve.
    if not violations:
        cycle = _find_cycle(schema)
        if cycle:
            violations.append("cycle detected: " + " -> ".join(cycle))
    return violations


def _validate_deterministic_table(schema: NetworkSchema, var: VariableDef) -> list[str]:
    violations: list[str] = []
    table = var.table
    assert table is not None
    if table.variable != var.name:
        violations.append(f"{var.name}: table is for variable {table.variable}")
        return violations
    try:
        expected = enumerate_parent_configs(schema, var.name)
    except SchemaError:
        return violations  # unknown parents are reported separately
    have = {cfg for cfg, _ in table.rows}
    for cfg in expected:
        if cfg not in have:
            violations.append(f"{var.name}: missing table row for {cfg}")
    for cfg, vec in table.rows:
        if cfg not in set(expected):
            violations.append(f"{var.name}: table row for unknown configuration {cfg}")
            continue
        if len(vec) != len(var.states):
            violations.append(f"{var.name}: row for {cfg} has {len(vec)} entries")
        elif sorted(vec.values) != [0.0] * (len(vec) - 1) + [1.0]:
            violations.append(f"{var.name}: deterministic row for {cfg} is not a point mass")
    return violations


@dataclass(frozen=True)
class VariableCount:
    """Assessment accounting for one variable."""

    entries: int
    free_parameters: int


@dataclass(frozen=True)
class AssessmentCounts:
    per_variable: dict[str, VariableCount] = field(default_factory=dict)

    @property
    def total_entries(self) -> int:
        return sum(c.entries for c in self.per_variable.values())

    @property
    def total_free_parameters(self) -> int:
        return sum(c.free_parameters for c in self.per_variable.values())


def count_assessments(schema: NetworkSchema) -> AssessmentCounts:
    """Number of table entries and free parameters required per variable.

    entries = |states| x prod(|parent states|); the free-parameter count
    subtracts the one sum-to-1 constraint per parent configuration.
    """
    per: dict[str, VariableCount] = {}
    for var in schema.variables:
        n_configs = 1
        for p in var.parents:
            n_configs *= len(schema.variable(p).states)
        per[var.name] = VariableCount(
            entries=len(var.states) * n_configs,
            free_parameters=(len(var.states) - 1) * n_configs,
        )
    return AssessmentCounts(per_variable=per)


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------


def _jsonable_prob(v: float) -> float:
    # Strip float noise accumulated by grid arithmetic; 10 decimals is far
    # below every tolerance used anywhere in the workbench.
    return round(v, 10)


def _table_rows_to_json(table: ConditionalTable) -> list[dict]:
    return [
        {"parents": cfg.as_dict(), "p": [_jsonable_prob(v) for v in vec]}
        for cfg, vec in table.rows
    ]


def _table_rows_from_json(
    schema: NetworkSchema, variable: str, rows: list
) -> ConditionalTable:
    parsed = []
    for i, row in enumerate(rows):
        if not isinstance(row, dict) or "parents" not in row or "p" not in row:
            raise SchemaError(f"{variable}: table row {i} must have 'parents' and 'p'")
        cfg = parent_config(schema, variable, row["parents"])
        parsed.append((cfg, ProbabilityVector(row["p"])))
    return ConditionalTable(variable, parsed)


def parse_schema(text: str) -> NetworkSchema:
    """Parse the JSON schema document and validate it.

    Raises SchemaError with a position for syntax errors and with the full
    violation list for semantic errors.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(
            f"syntax error at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from None

    if not isinstance(doc, dict) or not isinstance(doc.get("variables"), list):
        raise SchemaError("schema document must be an object with a 'variables' array")

    variables = []
    raw_tables: list[tuple[str, list]] = []
    for i, entry in enumerate(doc["variables"]):
        if not isinstance(entry, dict):
            raise SchemaError(f"variable {i} must be an object")
        for key in ("name", "kind", "states", "parents"):
            if key not in entry:
                raise SchemaError(f"variable {i} is missing '{key}'")
        name = entry["name"]
        if not isinstance(name, str):
            raise SchemaError(f"variable {i}: name must be a string")
        states = entry["states"]
        parents = entry["parents"]
        if not isinstance(states, list) or not all(isinstance(s, str) for s in states):
            raise SchemaError(f"{name}: states must be an array of strings")
        if not isinstance(parents, list) or not all(isinstance(p, str) for p in parents):
            raise SchemaError(f"{name}: parents must be an array of strings")
        variables.append(VariableDef(name, states, entry["kind"], parents))
        if "table" in entry:
            raw_tables.append((name, entry["table"]))

    schema = NetworkSchema(variables)
    violations = validate_schema(schema)
    if violations:
        raise SchemaError("invalid schema: " + "; ".join(violations))

    if raw_tables:
        # Tables can only be attached once parent references validate.
        with_tables = []
        table_for = {}
        for name, rows in raw_tables:
            if not isinstance(rows, list):
                raise SchemaError(f"{name}: table must be an array of rows")
            table_for[name] = _table_rows_from_json(schema, name, rows)
        for var in schema.variables:
            if var.name in table_for:
                with_tables.append(
                    VariableDef(var.name, var.states, var.kind, var.parents,
                                table_for[var.name])
                )
            else:
                with_tables.append(var)
        schema = NetworkSchema(with_tables)
        violations = validate_schema(schema)
        if violations:
            raise SchemaError("invalid schema: " + "; ".join(violations))
    return schema


def serialize_schema(schema: NetworkSchema) -> str:
    """Render the schema back to its canonical JSON document."""
    entries = []
    for var in schema.variables:
        entry: dict = {
            "name": var.name,
            "kind": var.kind,
            "states": list(var.states),
            "parents": list(var.parents),
        }
        if var.table is not None:
            entry["table"] = _table_rows_to_json(var.table)
        entries.append(entry)
    return json.dumps({"variables": entries}, indent=2) + "\n"


def write_cpt_file(tables: Mapping[str, ConditionalTable], order: Iterable[str]) -> str:
    """Render compiled tables to the CPT file format, in the given order."""
    out = {
        "tables": [
            {"variable": name, "rows": _table_rows_to_json(tables[name])}
            for name in order
            if name in tables
        ]
    }
    return json.dumps(out, indent=2) + "\n"


def read_cpt_file(schema: NetworkSchema, text: str) -> dict[str, ConditionalTable]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(
            f"syntax error at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("tables"), list):
        raise SchemaError("CPT document must be an object with a 'tables' array")
    tables: dict[str, ConditionalTable] = {}
    for entry in doc["tables"]:
        name = entry.get("variable")
        if name not in schema:
            raise SchemaError(f"unknown variable: {name}")
        tables[name] = _table_rows_from_json(schema, name, entry.get("rows", []))
    return tables
