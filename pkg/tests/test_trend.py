"""Trend operator: simulation oracle, closed form, snapping, derivation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from elicit.errors import TrendError
from elicit.schema import ParentConfiguration, ProbabilityVector, parent_config
from elicit.session import TREND_DERIVED
from elicit.trend import (
    TOWARD_FIRST,
    TOWARD_LAST,
    TrendSpec,
    apply_trend,
    check_no_cycle,
    derive_distribution,
    derived_values,
    snap_distribution,
)


def shift_mass_oracle(x, fraction, direction):
    """Independent oracle: simulate the mass parcels one donation at a time.

    Every state except the terminal one donates fraction*x[i] to its
    neighbour in the shift direction; donations are computed from the
    original masses, so donated mass is never re-donated.
    """
    n = len(x)
    y = list(x)
    if direction == TOWARD_LAST:
        donors, step = range(n - 1), 1
    else:
        donors, step = range(1, n), -1
    for i in donors:
        moved = fraction * x[i]
        y[i] -= moved
        y[i + step] += moved
    return y


# Frozen expectations, worked out by hand before the operator existed.
HAND_TOWARD_LAST = ((0.4, 0.3, 0.2, 0.1), 0.10, (0.36, 0.31, 0.21, 0.12))
HAND_TOWARD_FIRST = ((0.1, 0.2, 0.3, 0.4), 0.25, (0.15, 0.225, 0.325, 0.30))


def _spec(fraction, direction=TOWARD_LAST):
    return TrendSpec(
        "V",
        ParentConfiguration((("P", "a"),)),
        ParentConfiguration((("P", "b"),)),
        fraction,
        direction,
    )


def distributions(min_size=2, max_size=8):
    return (
        st.lists(st.floats(0.01, 1.0), min_size=min_size, max_size=max_size)
        .map(lambda v: [x / math.fsum(v) for x in v])
    )


class TestOracleItself:
    def test_hand_example_toward_last(self):
        x, a, want = HAND_TOWARD_LAST
        assert shift_mass_oracle(x, a, TOWARD_LAST) == pytest.approx(
            list(want), abs=1e-15
        )

    def test_hand_example_toward_first(self):
        x, a, want = HAND_TOWARD_FIRST
        assert shift_mass_oracle(x, a, TOWARD_FIRST) == pytest.approx(
            list(want), abs=1e-15
        )

    def test_oracle_conserves_mass(self):
        y = shift_mass_oracle([0.2, 0.5, 0.3], 0.4, TOWARD_LAST)
        assert math.fsum(y) == pytest.approx(1.0, abs=1e-15)


class TestApplyTrend:
    def test_hand_example(self):
        x, a, want = HAND_TOWARD_LAST
        y = apply_trend(ProbabilityVector(x), _spec(a))
        assert list(y.values) == pytest.approx(list(want), abs=1e-12)

    def test_hand_example_mirror(self):
        x, a, want = HAND_TOWARD_FIRST
        y = apply_trend(ProbabilityVector(x), _spec(a, TOWARD_FIRST))
        assert list(y.values) == pytest.approx(list(want), abs=1e-12)

    @given(distributions(), st.floats(0.0, 1.0),
           st.sampled_from([TOWARD_LAST, TOWARD_FIRST]))
    def test_matches_oracle(self, x, fraction, direction):
        y = apply_trend(ProbabilityVector(x), _spec(fraction, direction))
        want = shift_mass_oracle(x, fraction, direction)
        assert list(y.values) == pytest.approx(want, abs=1e-12)

    @given(distributions(), st.floats(0.0, 1.0),
           st.sampled_from([TOWARD_LAST, TOWARD_FIRST]))
    def test_output_is_a_distribution(self, x, fraction, direction):
        y = apply_trend(ProbabilityVector(x), _spec(fraction, direction))
        assert math.fsum(y.values) == pytest.approx(1.0, abs=1e-9)
        assert all(0.0 <= v <= 1.0 for v in y.values)

    @given(distributions())
    def test_zero_fraction_is_identity(self, x):
        y = apply_trend(ProbabilityVector(x), _spec(0.0))
        assert list(y.values) == pytest.approx(x, abs=1e-15)

    def test_full_fraction_shifts_one_step(self):
        y = apply_trend(ProbabilityVector((0.4, 0.3, 0.2, 0.1)), _spec(1.0))
        assert list(y.values) == pytest.approx([0.0, 0.4, 0.3, 0.3], abs=1e-12)

    @given(distributions(), st.floats(0.0, 1.0))
    def test_directions_mirror_each_other(self, x, fraction):
        forward = apply_trend(ProbabilityVector(x), _spec(fraction, TOWARD_LAST))
        backward = apply_trend(
            ProbabilityVector(list(reversed(x))), _spec(fraction, TOWARD_FIRST)
        )
        assert list(forward.values) == pytest.approx(
            list(reversed(list(backward.values))), abs=1e-12
        )

    def test_terminal_state_never_loses_mass(self):
        x = (0.1, 0.2, 0.7)
        y = apply_trend(ProbabilityVector(x), _spec(0.9))
        assert y.values[-1] >= x[-1]

    def test_incomplete_source_rejected(self):
        with pytest.raises(TrendError, match="complete distribution"):
            apply_trend(ProbabilityVector((0.4, 0.4)), _spec(0.1))

    def test_single_state_rejected(self):
        with pytest.raises(TrendError, match="at least 2 states"):
            apply_trend(ProbabilityVector((1.0,)), _spec(0.1))


class TestSpecValidation:
    def test_fraction_out_of_range(self):
        with pytest.raises(TrendError, match="outside"):
            _spec(1.2)

    def test_unknown_direction(self):
        with pytest.raises(TrendError, match="unknown trend direction"):
            _spec(0.1, "sideways")

    def test_source_equals_target(self):
        cfg = ParentConfiguration((("P", "a"),))
        with pytest.raises(TrendError, match="identical"):
            TrendSpec("V", cfg, cfg, 0.1, TOWARD_LAST)


class TestSnapDistribution:
    def test_over_allocation_is_capped(self):
        # four 0.225 entries would snap up to 0.25 each, exhausting all
        # mass before the terminal state; capping keeps it non-negative
        y = ProbabilityVector((0.225, 0.225, 0.225, 0.225, 0.05, 0.05))
        out = snap_distribution(y, TOWARD_LAST, 0.05)
        assert out == pytest.approx([0.25, 0.25, 0.25, 0.25, 0.0, 0.0],
                                    abs=1e-12)

    def test_terminal_absorbs_remainder(self):
        y = apply_trend(ProbabilityVector((0.4, 0.3, 0.2, 0.1)), _spec(0.10))
        out = snap_distribution(y, TOWARD_LAST, 0.05)
        assert out == pytest.approx([0.35, 0.30, 0.20, 0.15], abs=1e-12)

    def test_toward_first_terminal_is_the_first_state(self):
        y = apply_trend(
            ProbabilityVector((0.1, 0.2, 0.3, 0.4)), _spec(0.25, TOWARD_FIRST)
        )
        out = snap_distribution(y, TOWARD_FIRST, 0.05)
        # midpoints 0.225 and 0.325 snap up; the first state absorbs
        assert out == pytest.approx([0.10, 0.25, 0.35, 0.30], abs=1e-12)

    @settings(max_examples=200)
    @given(distributions(), st.floats(0.0, 1.0),
           st.sampled_from([TOWARD_LAST, TOWARD_FIRST]),
           st.sampled_from([0.05, 0.1]))
    def test_snapped_output_is_valid(self, x, fraction, direction, grid):
        y = apply_trend(ProbabilityVector(x), _spec(fraction, direction))
        out = snap_distribution(y, direction, grid)
        assert math.fsum(out) == pytest.approx(1.0, abs=1e-9)
        assert all(v >= 0.0 for v in out)
        terminal = len(out) - 1 if direction == TOWARD_LAST else 0
        for i, v in enumerate(out):
            if i != terminal:
                units = v / grid
                assert abs(units - round(units)) < 1e-6


class TestDerivation:
    def test_demo_chain_values(self, session, schema):
        ulcer = session.status(
            "Invasion",
            parent_config(schema, "Invasion",
                          {"Shape": "ulcerating", "Length": "less than 5 cm"}),
        )
        states = schema.variable("Invasion").states
        assert [ulcer.assessed[s] for s in states] == pytest.approx(
            [0.35, 0.30, 0.20, 0.15], abs=1e-12
        )
        scirrhous = session.status(
            "Invasion",
            parent_config(schema, "Invasion",
                          {"Shape": "scirrhous", "Length": "less than 5 cm"}),
        )
        assert [scirrhous.assessed[s] for s in states] == pytest.approx(
            [0.30, 0.30, 0.20, 0.20], abs=1e-12
        )

    def test_derived_provenance(self, session, schema):
        cfg = parent_config(schema, "Invasion",
                            {"Shape": "ulcerating", "Length": "less than 5 cm"})
        for item_id in session.plan.distribution_index[("Invasion", cfg)]:
            assert session.assessment_for(item_id).provenance == TREND_DERIVED

    def test_preview_equals_stored(self, session, schema):
        spec = TrendSpec(
            "Invasion",
            parent_config(schema, "Invasion",
                          {"Shape": "polypoid", "Length": "less than 5 cm"}),
            parent_config(schema, "Invasion",
                          {"Shape": "ulcerating", "Length": "less than 5 cm"}),
            0.10,
            TOWARD_LAST,
        )
        preview = derived_values(session, spec)
        stored = session.status("Invasion", spec.target).assessed
        assert preview == pytest.approx(stored, abs=1e-12)

    def test_incomplete_source_rejected(self, session, schema):
        spec = TrendSpec(
            "Lymph",
            parent_config(schema, "Lymph",
                          {"Invasion": "submucosa (T1)"}),
            parent_config(schema, "Lymph",
                          {"Invasion": "muscularis propria (T2)"}),
            0.10,
            TOWARD_LAST,
        )
        # invalidate the source by removing one state's mass balance
        ids = session.plan.distribution_index[spec.source_key]
        session.record_assessment(ids[0], 0.95)
        with pytest.raises(TrendError, match="source distribution incomplete"):
            derived_values(session, spec)

    def test_manual_target_guard_and_overwrite(self, session, schema):
        spec = TrendSpec(
            "Invasion",
            parent_config(schema, "Invasion",
                          {"Shape": "polypoid", "Length": "less than 5 cm"}),
            parent_config(schema, "Invasion",
                          {"Shape": "polypoid", "Length": "5 to 10 cm"}),
            0.10,
            TOWARD_LAST,
        )
        with pytest.raises(TrendError, match="manual assessments"):
            derive_distribution(session, spec)
        assessments = derive_distribution(session, spec, overwrite=True)
        assert all(a.provenance == TREND_DERIVED for a in assessments)

    def test_cycle_rejected(self, session, schema):
        closing = TrendSpec(
            "Invasion",
            parent_config(schema, "Invasion",
                          {"Shape": "scirrhous", "Length": "less than 5 cm"}),
            parent_config(schema, "Invasion",
                          {"Shape": "polypoid", "Length": "less than 5 cm"}),
            0.10,
            TOWARD_LAST,
        )
        with pytest.raises(TrendError, match="trend cycle"):
            derive_distribution(session, closing, overwrite=True)

    def test_check_no_cycle_allows_chains(self):
        a = ParentConfiguration((("P", "a"),))
        b = ParentConfiguration((("P", "b"),))
        c = ParentConfiguration((("P", "c"),))
        first = TrendSpec("V", a, b, 0.1, TOWARD_LAST)
        second = TrendSpec("V", b, c, 0.1, TOWARD_LAST)
        check_no_cycle([first], second)
        with pytest.raises(TrendError, match="trend cycle"):
            check_no_cycle([first, second], TrendSpec("V", c, a, 0.1, TOWARD_LAST))

    def test_stale_after_source_edit(self, session, schema):
        assert session.stale_trends() == []
        source = parent_config(
            schema, "Invasion",
            {"Shape": "polypoid", "Length": "less than 5 cm"},
        )
        ids = session.plan.distribution_index[("Invasion", source)]
        session.record_assessment(ids[0], 0.30)
        session.record_assessment(ids[3], 0.20)
        stale = session.stale_trends()
        assert any(spec.source == source for spec in stale)


class TestNumpyPath:
    def test_vectorized_matches_oracle_bulk(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            n = rng.integers(2, 9)
            x = rng.dirichlet(np.ones(n)).tolist()
            fraction = float(rng.uniform())
            direction = TOWARD_LAST if rng.uniform() < 0.5 else TOWARD_FIRST
            y = apply_trend(ProbabilityVector(x), _spec(fraction, direction))
            want = shift_mass_oracle(x, fraction, direction)
            np.testing.assert_allclose(list(y.values), want, atol=1e-12)
