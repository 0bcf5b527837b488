"""Trends: deriving one conditional distribution from another.

A trend is a fixed relation between two conditional distributions of the
*same* variable under different conditioning contexts: a fraction of each
state's probability mass moves one step along the state order (e.g. "these
patients are 10% worse off").  The state at the terminal end of the shift
keeps its mass, so the result is again a proper distribution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import TrendError
from .scale import snap
from .schema import ParentConfiguration, ProbabilityVector

if TYPE_CHECKING:
    from .session import Assessment, Session

TOWARD_LAST = "toward-last"
TOWARD_FIRST = "toward-first"
DIRECTIONS = (TOWARD_LAST, TOWARD_FIRST)

# Provenance tag carried by assessments that a trend derivation records.
TREND_PROVENANCE = "trend-derived"


@dataclass(frozen=True)
class TrendSpec:
    """Source and target contexts of one variable, shift fraction, direction."""

    variable: str
    source: ParentConfiguration
    target: ParentConfiguration
    fraction: float
    direction: str = TOWARD_LAST

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 1.0:
            raise TrendError(f"trend fraction {self.fraction} outside [0,1]")
        if self.direction not in DIRECTIONS:
            raise TrendError(f"unknown trend direction: {self.direction}")
        if self.source == self.target:
            raise TrendError("trend source and target contexts are identical")

    @property
    def source_key(self) -> tuple[str, ParentConfiguration]:
        return (self.variable, self.source)

    @property
    def target_key(self) -> tuple[str, ParentConfiguration]:
        return (self.variable, self.target)

    def describe(self) -> str:
        return (
            f"trend {self.variable}[{self.source}] -> [{self.target}] "
            f"fraction={self.fraction:g} {self.direction}"
        )


def apply_trend(x: ProbabilityVector, spec: TrendSpec) -> ProbabilityVector:
    """Shift fraction a of each state's mass one step along the state order.

    For a shift toward the last state with fraction a over states 1..n:

        y_1 = (1 - a) x_1
        y_i = (1 - a) x_i + a x_{i-1}        for 1 < i < n
        y_n = x_n + a x_{n-1}

    The terminal state loses nothing, so the output sums to 1 whenever the
    input does, and every entry stays inside [0,1].  toward-first is the
    exact mirror image.
    """
    values = np.asarray(x.values, dtype=float)
    n = values.size
    if n < 2:
        raise TrendError("trend needs a variable with at least 2 states")
    if not x.is_complete():
        raise TrendError(
            f"trend source must be a complete distribution (sum = {x.total():.6f})"
        )
    a = spec.fraction

    y = np.empty_like(values)
    if spec.direction == TOWARD_LAST:
        y[0] = (1.0 - a) * values[0]
        if n > 2:
            y[1:-1] = (1.0 - a) * values[1:-1] + a * values[:-2]
        y[-1] = values[-1] + a * values[-2]
    else:
        y[-1] = (1.0 - a) * values[-1]
        if n > 2:
            y[1:-1] = (1.0 - a) * values[1:-1] + a * values[2:]
        y[0] = values[0] + a * values[1]
    return ProbabilityVector(y.tolist())


def snap_distribution(y: ProbabilityVector, direction: str, grid: float) -> list[float]:
    """Snap a derived distribution to the grid without losing mass.

    Every state snaps to its nearest grid value, capped by the mass still
    unallocated; the terminal state of the shift absorbs the rounding
    remainder, so the result sums to 1 exactly and stays non-negative.
    """
    n = len(y)
    terminal = n - 1 if direction == TOWARD_LAST else 0
    out = [0.0] * n
    remaining = 1.0
    for i, v in enumerate(y):
        if i == terminal:
            continue
        share = min(snap(min(max(v, 0.0), 1.0), grid), max(remaining, 0.0))
        out[i] = share
        remaining -= share
    out[terminal] = max(remaining, 0.0)
    return out


def derive_distribution(
    session: "Session", spec: TrendSpec, overwrite: bool = False
) -> "list[Assessment]":
    """Apply a trend to the session's source distribution and record the target.

    The derived values are snapped to the session grid (terminal state
    absorbing the remainder) and stored with trend-derived provenance; the
    spec itself is logged so a later source edit can flag the target stale.
    Manually assessed targets are protected unless overwrite is set.
    """
    if session.validate_distribution(spec.variable, spec.source):
        raise TrendError("source distribution incomplete")
    target_ids = session.plan.distribution_index.get(spec.target_key)
    if target_ids is None:
        raise TrendError(
            f"unknown target distribution: {spec.variable} ({spec.target})"
        )
    if not overwrite:
        for item_id in target_ids:
            existing = session.assessment_for(item_id)
            if existing is not None and existing.provenance != TREND_PROVENANCE:
                raise TrendError("target has manual assessments")
    check_no_cycle(list(session.trends), spec)

    var = session.schema.variable(spec.variable)
    source = session.status(spec.variable, spec.source)
    x = ProbabilityVector(source.assessed[s] for s in var.states)
    y = apply_trend(x, spec)
    snapped = snap_distribution(y, spec.direction, session.grid)
    values = {state: snapped[i] for i, state in enumerate(var.states)}
    return session.record_trend(spec, values)


def derived_values(session: "Session", spec: TrendSpec) -> dict[str, float]:
    """The per-state values a derivation would store, without recording them."""
    if session.validate_distribution(spec.variable, spec.source):
        raise TrendError("source distribution incomplete")
    var = session.schema.variable(spec.variable)
    source = session.status(spec.variable, spec.source)
    x = ProbabilityVector(source.assessed[s] for s in var.states)
    y = apply_trend(x, spec)
    snapped = snap_distribution(y, spec.direction, session.grid)
    return {state: snap(snapped[i], session.grid) for i, state in enumerate(var.states)}


def check_no_cycle(
    existing: list[TrendSpec], new: TrendSpec
) -> None:
    """Reject a trend whose registration would close a derivation cycle."""
    edges: dict[tuple, list[tuple]] = {}
    for spec in list(existing) + [new]:
        edges.setdefault(spec.source_key, []).append(spec.target_key)

    seen: set[tuple] = set()
    stack = [new.target_key]
    while stack:
        key = stack.pop()
        if key == new.source_key:
            raise TrendError(
                f"trend cycle: deriving {new.target_key[1]} from {new.source_key[1]} "
                f"while a chain already derives the source from the target"
            )
        if key in seen:
            continue
        seen.add(key)
        stack.extend(edges.get(key, []))
