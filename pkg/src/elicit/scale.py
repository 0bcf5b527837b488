"""The dual numerical/verbal probability scale used for marking assessments.

The default scale pairs seven calibrated verbal expressions with numerical
anchor ticks, and carries the rounding grid applied to every stored
assessment (5% by default).  Scales are plain values: project-specific
variants (an extra anchor near 40%, domain relabelings) are built by adding
anchors rather than by mutating the default.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable

from .errors import ScaleError

DEFAULT_GRID = 0.05

# Verbal expression -> calibrated position, most certain first.  The extreme
# expressions carry the "(almost)" moderator in their display label.
DEFAULT_VERBAL_ANCHORS = (
    ("(almost) certain", 1.00),
    ("probable", 0.85),
    ("expected", 0.75),
    ("fifty-fifty", 0.50),
    ("uncertain", 0.25),
    ("improbable", 0.15),
    ("(almost) impossible", 0.00),
)

DEFAULT_NUMERIC_ANCHORS = (0.0, 0.25, 0.50, 0.75, 1.0)


@dataclass(frozen=True)
class ScaleAnchor:
    position: float
    kind: str  # "numeric" | "verbal"
    label: str

    def __post_init__(self):
        if not 0.0 <= self.position <= 1.0:
            raise ScaleError(f"anchor position {self.position} outside [0,1]")
        if self.kind not in ("numeric", "verbal"):
            raise ScaleError(f"unknown anchor kind: {self.kind}")
        if self.kind == "verbal" and not self.label:
            raise ScaleError("verbal anchor with empty label")


def _anchor_sort_key(anchor: ScaleAnchor) -> tuple:
    # Verbal before numeric at equal positions: the verbal label is the
    # informative one when an anchor is reported back to the expert.
    return (anchor.position, 0 if anchor.kind == "verbal" else 1, anchor.label)


@dataclass(frozen=True)
class ProbabilityScale:
    anchors: tuple[ScaleAnchor, ...]
    rounding_grid: float = DEFAULT_GRID

    def __init__(self, anchors: Iterable[ScaleAnchor], rounding_grid: float = DEFAULT_GRID):
        anchors = tuple(sorted(anchors, key=_anchor_sort_key))
        if not 0.0 < rounding_grid <= 1.0:
            raise ScaleError(f"rounding grid {rounding_grid} outside (0,1]")
        labels = [a.label for a in anchors if a.kind == "verbal"]
        if len(labels) != len(set(labels)):
            raise ScaleError("verbal anchor labels must be unique")
        object.__setattr__(self, "anchors", anchors)
        object.__setattr__(self, "rounding_grid", rounding_grid)

    def verbal(self, expression: str) -> float:
        return verbal_to_number(self, expression)

    def verbal_anchors(self) -> tuple[ScaleAnchor, ...]:
        return tuple(a for a in self.anchors if a.kind == "verbal")

    def with_anchor(self, anchor: ScaleAnchor) -> "ProbabilityScale":
        """A new scale with one extra anchor, keeping anchors sorted."""
        return ProbabilityScale(self.anchors + (anchor,), self.rounding_grid)


def default_scale() -> ProbabilityScale:
    """The standard elicitation scale: seven verbal anchors, quartile ticks."""
    anchors = [
        ScaleAnchor(pos, "verbal", label) for label, pos in DEFAULT_VERBAL_ANCHORS
    ]
    anchors += [
        ScaleAnchor(pos, "numeric", f"{int(round(pos * 100))}")
        for pos in DEFAULT_NUMERIC_ANCHORS
    ]
    return ProbabilityScale(anchors, DEFAULT_GRID)


def verbal_to_number(scale: ProbabilityScale, expression: str) -> float:
    """Map a verbal expression to its calibrated position (case-insensitive)."""
    wanted = expression.strip().lower()
    for anchor in scale.anchors:
        if anchor.kind == "verbal" and anchor.label.lower() == wanted:
            return anchor.position
    raise ScaleError(f"unknown verbal expression: {expression!r}")


def snap(p: float, grid: float = DEFAULT_GRID) -> float:
    """Round a probability to the nearest grid multiple inside [0,1].

    Exact midpoints round away from zero.  The comparison uses a tiny slack
    so that midpoints survive the division by a grid that is not exactly
    representable in binary (0.125/0.05 must still round up to 0.15).
    """
    if not 0.0 <= p <= 1.0:
        raise ScaleError(f"probability {p} outside [0,1]")
    if not 0.0 < grid <= 1.0:
        raise ScaleError(f"grid {grid} outside (0,1]")
    q = p / grid
    k = math.floor(q)
    if q - k >= 0.5 - 1e-9:
        k += 1
    k = min(k, math.floor(1.0 / grid + 1e-9))
    return min(1.0, k * grid)


def nearest_anchor(scale: ProbabilityScale, p: float) -> ScaleAnchor:
    """The anchor closest to p; ties go to the lower position."""
    if not 0.0 <= p <= 1.0:
        raise ScaleError(f"probability {p} outside [0,1]")
    if not scale.anchors:
        raise ScaleError("scale has no anchors")
    # Anchors are sorted by (position, verbal-first), so the first strict
    # minimum implements both tie rules at once.
    best = scale.anchors[0]
    best_d = abs(best.position - p)
    for anchor in scale.anchors[1:]:
        d = abs(anchor.position - p)
        if d < best_d - 1e-15:
            best, best_d = anchor, d
    return best


# ---------------------------------------------------------------------------
# Scale file (optional project override)
# ---------------------------------------------------------------------------


def scale_to_json(scale: ProbabilityScale) -> dict:
    return {
        "anchors": [
            {"position": a.position, "kind": a.kind, "label": a.label}
            for a in scale.anchors
        ],
        "rounding_grid": scale.rounding_grid,
    }


def parse_scale(text: str) -> ProbabilityScale:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScaleError(f"syntax error at line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("anchors"), list):
        raise ScaleError("scale document must be an object with an 'anchors' array")
    anchors = []
    for i, entry in enumerate(doc["anchors"]):
        try:
            anchors.append(ScaleAnchor(float(entry["position"]), entry["kind"], entry["label"]))
        except (KeyError, TypeError, ValueError) as e:
            raise ScaleError(f"anchor {i}: {e}") from None
    return ProbabilityScale(anchors, float(doc.get("rounding_grid", DEFAULT_GRID)))
