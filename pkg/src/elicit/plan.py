"""Elicitation plans: one text fragment per required probability, packed onto sheets.

Every conditional probability of every chance variable becomes one item: a
prose fragment describing the conditioning context and asking, in likelihood
form, for one state's probability.  Items of the same conditional
distribution stay contiguous so the expert can weigh them together, and are
packed onto small sheets (two or three figures each).
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import TemplateError
from .schema import (
    NetworkSchema,
    ParentConfiguration,
    enumerate_parent_configs,
)
from .scale import ProbabilityScale, default_scale

DEFAULT_CAPACITY = 3
STATE_PLACEHOLDER = "state"

DistributionKey = tuple[str, ParentConfiguration]


def _placeholders(text: str) -> list[str]:
    try:
        return [f[1] for f in string.Formatter().parse(text) if f[1] is not None]
    except ValueError as e:
        raise TemplateError(f"malformed template text: {e}") from None


@dataclass(frozen=True)
class FragmentTemplate:
    """Prose template for one variable's items.

    context_intro names each parent state exactly once (empty for parentless
    variables); question asks for the target state via the {state}
    placeholder.  Rendered text is in likelihood form ("How likely is
    it...") rather than frequency form.
    """

    variable: str
    context_intro: str
    question: str

    def validate(self, parents: tuple[str, ...]) -> None:
        intro = _placeholders(self.context_intro)
        if sorted(intro) != sorted(parents):
            raise TemplateError(
                f"{self.variable}: context placeholders {sorted(set(intro))} "
                f"do not match parents {sorted(parents)}"
            )
        if _placeholders(self.question) != [STATE_PLACEHOLDER]:
            raise TemplateError(
                f"{self.variable}: question must use exactly one {{state}} placeholder"
            )


def render_fragment(
    template: FragmentTemplate, state: str, config: ParentConfiguration
) -> str:
    """Substitute the context states and target state into the template."""
    values = config.as_dict()
    try:
        intro = template.context_intro.format(**values)
        question = template.question.format(state=state)
    except (KeyError, IndexError) as e:
        raise TemplateError(
            f"{template.variable}: no substitution value for placeholder {e}"
        ) from None
    if not intro:
        return question
    return f"{intro} {question}"


@dataclass(frozen=True)
class ElicitationItem:
    item_id: str
    variable: str
    state: str
    parent_config: ParentConfiguration
    fragment: str


@dataclass(frozen=True)
class Sheet:
    index: int
    items: tuple[ElicitationItem, ...]


@dataclass(frozen=True)
class ElicitationPlan:
    sheets: tuple[Sheet, ...]
    capacity: int = DEFAULT_CAPACITY
    distribution_index: dict[DistributionKey, tuple[str, ...]] = field(default_factory=dict)

    def items(self) -> list[ElicitationItem]:
        return [item for sheet in self.sheets for item in sheet.items]

    def item(self, item_id: str) -> ElicitationItem:
        found = self._by_id.get(item_id)
        if found is None:
            raise KeyError(item_id)
        return found

    @property
    def _by_id(self) -> dict[str, ElicitationItem]:
        cached = self.__dict__.get("_by_id_cache")
        if cached is None:
            cached = {item.item_id: item for item in self.items()}
            self.__dict__["_by_id_cache"] = cached
        return cached

    def distribution_items(self, key: DistributionKey) -> list[ElicitationItem]:
        return [self.item(i) for i in self.distribution_index.get(key, ())]


def item_id_for(variable: str, config_index: int, state_index: int) -> str:
    return f"{variable}:{config_index}:{state_index}"


def build_plan(
    schema: NetworkSchema,
    templates: Mapping[str, FragmentTemplate],
    capacity: int = DEFAULT_CAPACITY,
) -> ElicitationPlan:
    """Lay out every chance-variable probability as an item and pack sheets.

    Items follow (schema variable order, parent-configuration enumeration
    order, state order).  A distribution that fits on one sheet never starts
    on a sheet it would not fit; a distribution larger than a sheet fills
    sheets to capacity and spills onto the next.
    """
    if capacity not in (2, 3):
        raise TemplateError(f"sheet capacity must be 2 or 3, got {capacity}")

    distributions: list[tuple[DistributionKey, list[ElicitationItem]]] = []
    for var in schema.variables:
        if var.kind != "chance":
            continue
        template = templates.get(var.name)
        if template is None:
            raise TemplateError(f"missing template for variable: {var.name}")
        template.validate(var.parents)
        for ci, config in enumerate(enumerate_parent_configs(schema, var.name)):
            items = [
                ElicitationItem(
                    item_id=item_id_for(var.name, ci, si),
                    variable=var.name,
                    state=state,
                    parent_config=config,
                    fragment=render_fragment(template, state, config),
                )
                for si, state in enumerate(var.states)
            ]
            distributions.append(((var.name, config), items))

    sheets: list[list[ElicitationItem]] = []
    current: list[ElicitationItem] = []
    for _, items in distributions:
        fits_whole = len(items) <= capacity
        if fits_whole and len(items) > capacity - len(current):
            sheets.append(current)
            current = []
        for item in items:
            if len(current) == capacity:
                sheets.append(current)
                current = []
            current.append(item)
    if current:
        sheets.append(current)

    index = {key: tuple(i.item_id for i in items) for key, items in distributions}
    return ElicitationPlan(
        sheets=tuple(Sheet(i, tuple(items)) for i, items in enumerate(sheets)),
        capacity=capacity,
        distribution_index=index,
    )


# ---------------------------------------------------------------------------
# Templates file
# ---------------------------------------------------------------------------


def parse_templates(text: str) -> dict[str, FragmentTemplate]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise TemplateError(
            f"syntax error at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("templates"), list):
        raise TemplateError("templates document must be an object with a 'templates' array")
    templates = {}
    for i, entry in enumerate(doc["templates"]):
        try:
            t = FragmentTemplate(entry["variable"], entry["context_intro"], entry["question"])
        except (KeyError, TypeError) as e:
            raise TemplateError(f"template {i}: {e}") from None
        # the question rule needs no schema, so malformed files fail here
        if _placeholders(t.question) != [STATE_PLACEHOLDER]:
            raise TemplateError(
                f"{t.variable}: question must use exactly one {{state}} placeholder"
            )
        templates[t.variable] = t
    return templates


def templates_to_json(templates: Mapping[str, FragmentTemplate]) -> str:
    out = {
        "templates": [
            {
                "variable": t.variable,
                "context_intro": t.context_intro,
                "question": t.question,
            }
            for t in templates.values()
        ]
    }
    return json.dumps(out, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Plan file + printable sheets
# ---------------------------------------------------------------------------


def plan_to_json(plan: ElicitationPlan) -> str:
    doc = {
        "capacity": plan.capacity,
        "sheets": [
            {
                "index": sheet.index,
                "items": [
                    {
                        "item_id": item.item_id,
                        "variable": item.variable,
                        "state": item.state,
                        "parent_config": item.parent_config.as_dict(),
                        "fragment": item.fragment,
                    }
                    for item in sheet.items
                ],
            }
            for sheet in plan.sheets
        ],
        "distributions": [
            {
                "variable": variable,
                "parents": config.as_dict(),
                "item_ids": list(item_ids),
            }
            for (variable, config), item_ids in plan.distribution_index.items()
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def parse_plan(text: str) -> ElicitationPlan:
    doc = json.loads(text)
    sheets = []
    for s in doc["sheets"]:
        items = tuple(
            ElicitationItem(
                item_id=i["item_id"],
                variable=i["variable"],
                state=i["state"],
                parent_config=ParentConfiguration(tuple(i["parent_config"].items())),
                fragment=i["fragment"],
            )
            for i in s["items"]
        )
        sheets.append(Sheet(s["index"], items))
    index = {
        (d["variable"], ParentConfiguration(tuple(d["parents"].items()))): tuple(d["item_ids"])
        for d in doc["distributions"]
    }
    return ElicitationPlan(tuple(sheets), doc["capacity"], index)


def _wrap(text: str, width: int = 68) -> list[str]:
    words = text.split()
    lines: list[str] = []
    line = ""
    for word in words:
        if line and len(line) + 1 + len(word) > width:
            lines.append(line)
            line = word
        else:
            line = f"{line} {word}" if line else word
    if line:
        lines.append(line)
    return lines


def _scale_ladder(scale: ProbabilityScale) -> list[str]:
    """A vertical text rendering of the marking scale, 100 at the top."""
    labels: dict[int, str] = {}
    for anchor in scale.verbal_anchors():
        labels[int(round(anchor.position * 100))] = anchor.label
    lines = []
    for tick in range(100, -1, -5):
        label = labels.get(tick, "")
        major = tick % 25 == 0
        mark = f"{tick:>3} -+" if major else "    -|"
        lines.append(f"{mark}  {label}".rstrip())
    return lines


def render_sheets_text(plan: ElicitationPlan, scale: ProbabilityScale | None = None) -> str:
    """Printable plain-text sheets, one per page, form-feed separated."""
    scale = scale or default_scale()
    ladder = _scale_ladder(scale)
    pages = []
    for sheet in plan.sheets:
        lines = [f"SHEET {sheet.index + 1}", "=" * 72, ""]
        for item in sheet.items:
            lines.append(f"[{item.item_id}]")
            lines.extend(_wrap(item.fragment))
            lines.append("")
            lines.extend(ladder)
            lines.append("")
        pages.append("\n".join(lines))
    return "\f".join(pages) + "\n"
