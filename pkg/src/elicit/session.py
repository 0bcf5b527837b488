"""Elicitation sessions: an append-only assessment log and its derived state.

A session records every probability the expert marks.  The full history is
kept (the latest record per item wins), each conditional distribution's
remaining mass is tracked for the easiest-first workflow, and the final
conditional probability tables are compiled only once every distribution
validates.

When the session is bound to a log file, every accepted mutation is
appended, flushed, and fsynced before the in-memory state changes, so an
acknowledged assessment survives a crash; replaying the file reproduces the
state exactly.
"""

from __future__ import annotations

import json
import math
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Mapping

from .errors import CompileError, ElicitError, ScaleError, SessionError
from .plan import ElicitationPlan
from .scale import ProbabilityScale, default_scale, snap, verbal_to_number
from .schema import (
    ConditionalTable,
    NetworkSchema,
    ParentConfiguration,
    ProbabilityVector,
    enumerate_parent_configs,
    parent_config,
)
from .trend import TREND_PROVENANCE, TrendSpec, check_no_cycle

VALIDATE_TOLERANCE = 1e-6

NUMERIC_MARK = "numeric-mark"
VERBAL_ANCHOR = "verbal-anchor"
TREND_DERIVED = TREND_PROVENANCE
RESIDUAL_SUGGESTED = "residual-suggested"
PROVENANCE_KINDS = (NUMERIC_MARK, VERBAL_ANCHOR, TREND_DERIVED, RESIDUAL_SUGGESTED)

DistributionKey = tuple[str, ParentConfiguration]


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass(frozen=True)
class Assessment:
    """One recorded probability with its provenance."""

    item_id: str
    variable: str
    state: str
    parent_config: ParentConfiguration
    value: float
    provenance: str
    source_detail: str | None
    ts: str


@dataclass(frozen=True)
class DistributionStatus:
    """Snapshot of one conditional distribution's progress."""

    variable: str
    parent_config: ParentConfiguration
    assessed: dict[str, float]
    residual_mass: float
    complete: bool

    @property
    def key(self) -> DistributionKey:
        return (self.variable, self.parent_config)


def _assessment_record(a: Assessment) -> dict:
    return {
        "item_id": a.item_id,
        "variable": a.variable,
        "state": a.state,
        "parent_config": a.parent_config.as_dict(),
        "value": round(a.value, 10),
        "provenance": a.provenance,
        "source_detail": a.source_detail,
        "ts": a.ts,
    }


def trend_record(spec: TrendSpec) -> dict:
    return {
        "kind": "trend",
        "source": {"variable": spec.variable, "parents": spec.source.as_dict()},
        "target": {"variable": spec.variable, "parents": spec.target.as_dict()},
        "alpha": spec.fraction,
        "direction": spec.direction,
    }


def trend_from_record(schema: NetworkSchema, rec: Mapping) -> TrendSpec:
    source, target = rec["source"], rec["target"]
    if source["variable"] != target["variable"]:
        raise SessionError("trend source and target variables differ")
    variable = source["variable"]
    return TrendSpec(
        variable=variable,
        source=parent_config(schema, variable, source["parents"]),
        target=parent_config(schema, variable, target["parents"]),
        fraction=float(rec["alpha"]),
        direction=rec["direction"],
    )


class Session:
    """Live elicitation state over a plan, optionally bound to a log file.

    All mutations are serialized through one lock; concurrent readers see a
    consistent snapshot.  Opening a session on an existing log replays it.
    """

    def __init__(
        self,
        plan: ElicitationPlan,
        schema: NetworkSchema,
        scale: ProbabilityScale | None = None,
        log_path: str | Path | None = None,
        clock: Callable[[], str] | None = None,
    ):
        self.plan = plan
        self.schema = schema
        self.scale = scale if scale is not None else default_scale()
        self._clock = clock or _utc_now
        self._lock = threading.RLock()
        self._latest: dict[str, Assessment] = {}
        self._history: list[Assessment] = []
        self._trends: list[TrendSpec] = []
        self._log = None
        self._log_path = Path(log_path) if log_path is not None else None
        if self._log_path is not None:
            if self._log_path.exists():
                self._replay(self._log_path.read_text(encoding="utf-8"))
            self._log = open(self._log_path, "a", encoding="utf-8")

    @property
    def grid(self) -> float:
        return self.scale.rounding_grid

    @property
    def trends(self) -> tuple[TrendSpec, ...]:
        return tuple(self._trends)

    @property
    def history(self) -> tuple[Assessment, ...]:
        return tuple(self._history)

    @property
    def log_path(self) -> Path | None:
        return self._log_path

    def close(self) -> None:
        if self._log is not None:
            self._log.close()
            self._log = None

    def assessment_for(self, item_id: str) -> Assessment | None:
        return self._latest.get(item_id)

    # -- log replay --------------------------------------------------------

    def _replay(self, text: str) -> None:
        for n, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise SessionError(f"corrupt session log at line {n}: {e.msg}") from None
            try:
                self._apply_record(rec)
            except ElicitError as e:
                raise SessionError(f"corrupt session log at line {n}: {e}") from None
            except (KeyError, TypeError, ValueError) as e:
                raise SessionError(f"corrupt session log at line {n}: {e!r}") from None

    def _apply_record(self, rec: Mapping) -> None:
        if rec.get("kind") == "trend":
            self._register_trend(trend_from_record(self.schema, rec))
            return
        a = self._build_assessment(
            rec["item_id"], rec["value"], rec["provenance"],
            rec.get("source_detail"), rec["ts"],
        )
        if (
            rec["variable"] != a.variable
            or rec["state"] != a.state
            or dict(rec["parent_config"]) != a.parent_config.as_dict()
        ):
            raise SessionError(f"record does not match plan item {a.item_id}")
        self._store(a)

    # -- mutations ----------------------------------------------------------

    def record_assessment(
        self,
        item_id: str,
        value: float | None,
        provenance: str = NUMERIC_MARK,
        source_detail: str | None = None,
    ) -> DistributionStatus:
        """Snap one probability onto the grid and store it.

        A verbal-anchor assessment may omit the value; it is taken from the
        anchor, and an explicit value must agree with the anchor's position.
        Returns the refreshed status of the item's distribution.
        """
        with self._lock:
            a = self._build_assessment(
                item_id, value, provenance, source_detail, self._clock()
            )
            self._append([_assessment_record(a)])
            self._store(a)
            return self.status(a.variable, a.parent_config)

    def record_trend(
        self, spec: TrendSpec, values: Mapping[str, float]
    ) -> list[Assessment]:
        """Atomically log a trend spec plus its derived per-state assessments."""
        with self._lock:
            item_ids = self.plan.distribution_index.get(spec.target_key)
            if item_ids is None:
                raise SessionError(
                    f"unknown distribution: {spec.variable} ({spec.target})"
                )
            by_state = {self.plan.item(i).state: i for i in item_ids}
            ts = self._clock()
            assessments = []
            for state, value in values.items():
                if state not in by_state:
                    raise SessionError(f"{spec.variable}: unknown state: {state}")
                assessments.append(
                    self._build_assessment(
                        by_state[state], value, TREND_DERIVED, spec.describe(), ts
                    )
                )
            records = [trend_record(spec)]
            records += [_assessment_record(a) for a in assessments]
            self._append(records)
            self._register_trend(spec)
            for a in assessments:
                self._store(a)
            return assessments

    def accept_residual(
        self, variable: str, config: ParentConfiguration
    ) -> list[Assessment]:
        """Store the residual suggestion with residual-suggested provenance."""
        with self._lock:
            suggestion = self.suggest_residual(variable, config)
            item_ids = self.plan.distribution_index[(variable, config)]
            by_state = {self.plan.item(i).state: i for i in item_ids}
            ts = self._clock()
            assessments = [
                self._build_assessment(
                    by_state[state], value, RESIDUAL_SUGGESTED, None, ts
                )
                for state, value in suggestion.items()
            ]
            self._append([_assessment_record(a) for a in assessments])
            for a in assessments:
                self._store(a)
            return assessments

    def _build_assessment(
        self,
        item_id: str,
        value: float | None,
        provenance: str,
        source_detail: str | None,
        ts: str,
    ) -> Assessment:
        try:
            item = self.plan.item(item_id)
        except KeyError:
            raise SessionError(f"unknown item: {item_id}") from None
        if provenance not in PROVENANCE_KINDS:
            raise SessionError(f"unknown provenance: {provenance}")
        if provenance == VERBAL_ANCHOR:
            if not source_detail:
                raise SessionError(
                    "provenance/source mismatch: verbal-anchor needs an anchor label"
                )
            try:
                anchor_value = verbal_to_number(self.scale, source_detail)
            except ScaleError as e:
                raise SessionError(f"provenance/source mismatch: {e}") from None
            if value is None:
                value = anchor_value
            elif abs(float(value) - anchor_value) > 1e-9:
                raise SessionError(
                    f"provenance/source mismatch: value {value} does not match "
                    f"anchor {source_detail!r}"
                )
        if value is None:
            raise SessionError("assessment needs a value")
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise SessionError(f"value must be a number, got {value!r}") from None
        if not 0.0 <= value <= 1.0:
            raise SessionError(f"value out of range: {value}")
        return Assessment(
            item_id=item.item_id,
            variable=item.variable,
            state=item.state,
            parent_config=item.parent_config,
            value=snap(value, self.grid),
            provenance=provenance,
            source_detail=source_detail,
            ts=ts,
        )

    def _register_trend(self, spec: TrendSpec) -> None:
        if spec in self._trends:
            return
        check_no_cycle(self._trends, spec)
        self._trends.append(spec)

    def _store(self, a: Assessment) -> None:
        self._history.append(a)
        self._latest[a.item_id] = a

    def _append(self, records: list[dict]) -> None:
        if self._log is None:
            return
        for rec in records:
            self._log.write(json.dumps(rec) + "\n")
        self._log.flush()
        os.fsync(self._log.fileno())

    # -- derived state -------------------------------------------------------

    def status(self, variable: str, config: ParentConfiguration) -> DistributionStatus:
        var = self.schema.variable(variable)
        item_ids = self.plan.distribution_index.get((variable, config))
        if item_ids is None:
            raise SessionError(f"unknown distribution: {variable} ({config})")
        assessed: dict[str, float] = {}
        for item_id in item_ids:
            a = self._latest.get(item_id)
            if a is not None:
                assessed[a.state] = a.value
        total = math.fsum(assessed.values())
        complete = (
            len(assessed) == len(var.states)
            and abs(total - 1.0) <= VALIDATE_TOLERANCE
        )
        return DistributionStatus(variable, config, assessed, 1.0 - total, complete)

    def suggest_residual(
        self, variable: str, config: ParentConfiguration
    ) -> dict[str, float]:
        """Divide the unassigned mass uniformly over the unassessed states.

        Every share is snapped to the grid and capped by the mass still
        available; the last unassessed state absorbs the remainder, so an
        accepted suggestion always sums to exactly the residual.
        """
        st = self.status(variable, config)
        var = self.schema.variable(variable)
        unassessed = [s for s in var.states if s not in st.assessed]
        if not unassessed:
            raise SessionError(f"nothing unassessed: {variable} ({config})")
        residual = st.residual_mass
        if residual < -1e-9:
            raise SessionError(f"mass over-allocated by {-residual:.2f}")
        residual = max(residual, 0.0)

        share = snap(residual / len(unassessed), self.grid)
        out: dict[str, float] = {}
        remaining = residual
        for state in unassessed[:-1]:
            v = min(share, max(remaining, 0.0))
            out[state] = v
            remaining -= v
        out[unassessed[-1]] = max(remaining, 0.0)
        return out

    def validate_distribution(
        self,
        variable: str,
        config: ParentConfiguration,
        tolerance: float = VALIDATE_TOLERANCE,
    ) -> list[str]:
        """All violations keeping this distribution from compiling; [] if ok."""
        st = self.status(variable, config)
        var = self.schema.variable(variable)
        violations = [f"unassessed: {s}" for s in var.states if s not in st.assessed]
        for state, value in st.assessed.items():
            if not 0.0 <= value <= 1.0:
                violations.append(f"value out of range: {state} = {value}")
        if not violations:
            total = math.fsum(st.assessed.values())
            if abs(total - 1.0) > tolerance:
                violations.append(f"sum = {total:.2f}")
        return violations

    def distribution_keys(self) -> list[DistributionKey]:
        """All chance-variable distribution keys, in plan order."""
        keys = []
        for var in self.schema.chance_variables():
            for config in enumerate_parent_configs(self.schema, var.name):
                keys.append((var.name, config))
        return keys

    def progress(self) -> dict:
        per: dict[str, dict] = {}
        assessed_total = 0
        item_total = 0
        for var in self.schema.chance_variables():
            configs = enumerate_parent_configs(self.schema, var.name)
            n_done = 0
            n_complete = 0
            for config in configs:
                st = self.status(var.name, config)
                n_done += len(st.assessed)
                if st.complete:
                    n_complete += 1
            n_items = len(var.states) * len(configs)
            per[var.name] = {
                "assessed": n_done,
                "total": n_items,
                "complete_distributions": n_complete,
                "distributions": len(configs),
            }
            assessed_total += n_done
            item_total += n_items
        return {"assessed": assessed_total, "total": item_total, "per_variable": per}

    def stale_trends(self) -> list[TrendSpec]:
        """Registered trends whose target no longer matches their source."""
        from .trend import derived_values

        stale = []
        for spec in self._trends:
            if self.validate_distribution(spec.variable, spec.source):
                stale.append(spec)
                continue
            want = derived_values(self, spec)
            got = self.status(spec.variable, spec.target).assessed
            if any(
                abs(got.get(s, -1.0) - v) > 1e-9 for s, v in want.items()
            ):
                stale.append(spec)
        return stale


def compile_cpts(
    session: Session, schema: NetworkSchema | None = None
) -> dict[str, ConditionalTable]:
    """Assemble one ConditionalTable per variable, or fail atomically.

    Chance variables compile from the session's current values; deterministic
    variables take the table carried by the schema.  Any violation anywhere
    rejects the whole compilation.
    """
    schema = schema if schema is not None else session.schema
    violations: list[str] = []
    tables: dict[str, ConditionalTable] = {}
    for var in schema.variables:
        if var.kind == "deterministic":
            if var.table is None:
                violations.append(f"{var.name}: deterministic variable has no table")
            else:
                tables[var.name] = var.table
            continue
        rows = []
        for config in enumerate_parent_configs(schema, var.name):
            found = session.validate_distribution(var.name, config)
            if found:
                violations.extend(f"{var.name} ({config}): {v}" for v in found)
                continue
            st = session.status(var.name, config)
            rows.append(
                (config, ProbabilityVector(st.assessed[s] for s in var.states))
            )
        tables[var.name] = ConditionalTable(var.name, rows)
    if violations:
        raise CompileError(violations)
    return tables


def session_state_json(session: Session) -> str:
    """Canonical JSON snapshot of the derived state, for replay comparison."""
    items = {}
    for item in session.plan.items():
        a = session.assessment_for(item.item_id)
        if a is None:
            continue
        items[item.item_id] = {
            "value": round(a.value, 10),
            "provenance": a.provenance,
            "source_detail": a.source_detail,
            "ts": a.ts,
        }
    return json.dumps(
        {"items": items, "trends": [trend_record(s) for s in session.trends]},
        indent=2,
    ) + "\n"
