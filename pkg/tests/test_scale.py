"""Verbal-numerical scale: anchor mapping, snapping, serialization."""

import json

import pytest
from hypothesis import given, strategies as st

from elicit.errors import ScaleError
from elicit.scale import (
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

GOLDEN_PAIRS = [
    ("(almost) certain", 1.00),
    ("probable", 0.85),
    ("expected", 0.75),
    ("fifty-fifty", 0.50),
    ("uncertain", 0.25),
    ("improbable", 0.15),
    ("(almost) impossible", 0.00),
]


class TestVerbalMapping:
    def test_golden_pairs(self):
        scale = default_scale()
        for label, value in GOLDEN_PAIRS:
            assert verbal_to_number(scale, label) == value

    def test_case_insensitive(self):
        scale = default_scale()
        assert verbal_to_number(scale, "Probable") == 0.85
        assert verbal_to_number(scale, "FIFTY-FIFTY") == 0.50

    def test_unknown_expression(self):
        with pytest.raises(ScaleError, match="unknown verbal expression"):
            verbal_to_number(default_scale(), "maybe")

    def test_moderated_extremes_share_the_endpoints(self):
        # both ends carry the softening prefix and sit exactly at 0 and 1
        scale = default_scale()
        labels = {a.position: a.label for a in scale.verbal_anchors()}
        assert labels[1.0].startswith("(almost)")
        assert labels[0.0].startswith("(almost)")

    def test_numeric_anchors_present(self):
        positions = sorted(
            a.position for a in default_scale().anchors if a.kind == "numeric"
        )
        assert positions == [0.0, 0.25, 0.50, 0.75, 1.0]


class TestSnap:
    def test_grid_multiples_fixed(self):
        for k in range(21):
            v = k * 0.05
            assert snap(v) == pytest.approx(k * 0.05, abs=1e-15)

    def test_midpoint_rounds_up(self):
        assert snap(0.125) == pytest.approx(0.15)
        assert snap(0.375) == pytest.approx(0.40)

    def test_below_midpoint_rounds_down(self):
        assert snap(0.1249) == pytest.approx(0.10)
        assert snap(0.02) == pytest.approx(0.0)

    def test_caps_at_one(self):
        assert snap(1.0) == 1.0
        assert snap(0.999) == 1.0

    @given(st.floats(min_value=0.0, max_value=1.0))
    def test_snapped_is_grid_aligned_and_close(self, p):
        s = snap(p)
        assert 0.0 <= s <= 1.0
        units = s / DEFAULT_GRID
        assert abs(units - round(units)) < 1e-6
        assert abs(s - p) <= DEFAULT_GRID / 2 + 1e-9

    @given(st.floats(min_value=0.0, max_value=1.0),
           st.sampled_from([0.01, 0.05, 0.1, 0.25]))
    def test_snap_is_idempotent(self, p, grid):
        assert snap(snap(p, grid), grid) == snap(p, grid)


class TestNearestAnchor:
    def test_exact_hit(self):
        a = nearest_anchor(default_scale(), 0.85)
        assert a.label == "probable"

    def test_between_anchors(self):
        a = nearest_anchor(default_scale(), 0.70)
        assert a.position == 0.75

    def test_tie_goes_to_lower_position(self):
        # 0.80 is equidistant from 0.75 and 0.85
        a = nearest_anchor(default_scale(), 0.80)
        assert a.position == 0.75


class TestSerialization:
    def test_round_trip(self):
        scale = default_scale()
        text = json.dumps(scale_to_json(scale))
        again = parse_scale(text)
        assert again == scale

    def test_document_shape(self):
        doc = scale_to_json(default_scale())
        assert set(doc) == {"anchors", "rounding_grid"}
        assert doc["rounding_grid"] == DEFAULT_GRID
        for anchor in doc["anchors"]:
            assert set(anchor) == {"position", "kind", "label"}

    def test_custom_anchor_round_trip(self):
        scale = default_scale().with_anchor(
            ScaleAnchor(0.6, "verbal", "leaning likely")
        )
        again = parse_scale(json.dumps(scale_to_json(scale)))
        assert verbal_to_number(again, "leaning likely") == 0.6


class TestValidation:
    def test_position_out_of_range(self):
        with pytest.raises(ScaleError):
            ScaleAnchor(1.2, "numeric", "120")

    def test_unknown_kind(self):
        with pytest.raises(ScaleError):
            ScaleAnchor(0.5, "textual", "half")

    def test_duplicate_verbal_labels_rejected(self):
        with pytest.raises(ScaleError):
            ProbabilityScale(
                [ScaleAnchor(0.4, "verbal", "same"),
                 ScaleAnchor(0.6, "verbal", "same")]
            )
