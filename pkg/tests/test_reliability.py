"""Outcome-driven source reliability: decision contributions,
aggregation, min-max normalisation and the end-to-end pipeline."""

import json

import pytest

from rpsfusion import (
    DecisionContribution,
    Frame,
    InvariantError,
    MassFunction,
    ProbabilityDistribution,
    ReliabilityReport,
    aggregate_dc,
    compute_reliabilities,
    decision_contribution,
    ranked_probability_transform,
    rps_transform,
    source_reliability,
)

X_FRAME = Frame(["x1", "x2", "x3"])


def _sweep_sources(eta):
    m1 = MassFunction(X_FRAME, {
        ("x1",): eta,
        ("x3",): 0.7 - eta,
        ("x2", "x3"): 0.2,
        ("x1", "x2", "x3"): 0.1,
    })
    m_certain = MassFunction(X_FRAME, {("x1",): 1.0})
    m_opposing = MassFunction(X_FRAME, {("x2", "x3"): 1.0})
    return [m1, m_certain, m_opposing]


class TestDecisionContribution:
    def test_certainty_scores_one(self):
        dist = ProbabilityDistribution(X_FRAME, {"x1": 1.0, "x2": 0.0, "x3": 0.0})
        assert decision_contribution(dist, "x1") == pytest.approx(1.0)

    def test_uniform_scores_zero(self):
        dist = ProbabilityDistribution(X_FRAME, {lab: 1 / 3 for lab in X_FRAME})
        assert decision_contribution(dist, "x2") == pytest.approx(0.0, abs=1e-12)

    def test_opposing_source_scores_minus_half(self):
        # Pipeline evaluation: all mass on the two wrong labels splits
        # evenly, so the contribution is 0 - (0.5 + 0.5)/2.
        m = MassFunction(X_FRAME, {("x2", "x3"): 1.0})
        rpt = ranked_probability_transform(rps_transform(m), 0.67)
        assert decision_contribution(rpt, "x1") == pytest.approx(-0.5, abs=1e-12)

    def test_unknown_label(self):
        dist = ProbabilityDistribution(X_FRAME, {lab: 1 / 3 for lab in X_FRAME})
        with pytest.raises(InvariantError):
            decision_contribution(dist, "zz")

    def test_single_label_frame_is_rejected(self):
        dist = ProbabilityDistribution(Frame(["only"]), {"only": 1.0})
        with pytest.raises(InvariantError):
            decision_contribution(dist, "only")

    def test_bounds(self):
        lo = ProbabilityDistribution(X_FRAME, {"x1": 0.0, "x2": 0.5, "x3": 0.5})
        assert decision_contribution(lo, "x1") >= -1.0 / (len(X_FRAME) - 1) - 1e-12


class TestAggregateDc:
    def test_single_sample_per_source(self):
        contribs = [DecisionContribution(0, 0, 0.4), DecisionContribution(1, 0, -0.2)]
        assert aggregate_dc(contribs, 2) == pytest.approx([0.4, -0.2])

    def test_stream_sums_per_source(self):
        contribs = [
            DecisionContribution(0, 0, 1.0),
            DecisionContribution(0, 1, -0.5),
            DecisionContribution(1, 0, 0.2),
        ]
        assert aggregate_dc(contribs, 2) == pytest.approx([0.5, 0.2])

    def test_repeated_samples_scale_linearly(self):
        contribs = [DecisionContribution(0, j, 0.3) for j in range(5)]
        assert aggregate_dc(contribs, 1) == pytest.approx([1.5])

    def test_out_of_range_source(self):
        with pytest.raises(InvariantError):
            aggregate_dc([DecisionContribution(3, 0, 0.1)], 2)


class TestSourceReliability:
    def test_min_max_arithmetic(self):
        assert source_reliability([3.0, 1.0, -1.0]) == pytest.approx([1.0, 0.5, 0.0])

    def test_all_equal_means_fully_reliable(self):
        assert source_reliability([0.7, 0.7, 0.7]) == [1.0, 1.0, 1.0]

    def test_shift_invariance(self):
        base = source_reliability([3.0, 1.0, -1.0])
        shifted = source_reliability([13.0, 11.0, 9.0])
        assert shifted == pytest.approx(base, abs=0.0)

    def test_output_stays_in_unit_interval(self):
        rels = source_reliability([0.2, -4.0, 7.5, 7.5])
        assert all(0.0 <= r <= 1.0 for r in rels)
        assert max(rels) == 1.0 and min(rels) == 0.0

    def test_empty_is_rejected(self):
        with pytest.raises(InvariantError):
            source_reliability([])


class TestComputeReliabilities:
    def test_single_source_is_fully_reliable(self):
        m = MassFunction(X_FRAME, {("x1",): 1.0})
        report = compute_reliabilities([[m]], ["x1"])
        assert report.reliabilities == [1.0]
        assert report.fusion_order == [0]

    def test_bounds_sources_pin_the_extremes(self):
        sources = _sweep_sources(0.7)
        report = compute_reliabilities([[m] for m in sources], ["x1"], 0.67)
        assert report.reliabilities[1] == 1.0
        assert report.reliabilities[2] == 0.0
        assert 0.0 < report.reliabilities[0] < 1.0
        assert report.fusion_order[0] == 1

    def test_reliability_grows_with_direct_support(self):
        values = []
        for i in range(71):
            sources = _sweep_sources(i / 100.0)
            report = compute_reliabilities([[m] for m in sources], ["x1"], 0.67)
            values.append(report.reliabilities[0])
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_none_entries_contribute_zero(self):
        m = MassFunction(X_FRAME, {("x1",): 1.0})
        bad = MassFunction(X_FRAME, {("x2",): 1.0})
        report = compute_reliabilities([[m, m], [bad, None]], ["x1", "x1"], 0.67)
        assert report.reliabilities == [1.0, 0.0]

    def test_shape_mismatch(self):
        m = MassFunction(X_FRAME, {("x1",): 1.0})
        with pytest.raises(InvariantError):
            compute_reliabilities([[m, m], [m]], ["x1", "x1"])

    def test_frame_mismatch_across_sources(self):
        m = MassFunction(X_FRAME, {("x1",): 1.0})
        other = MassFunction(["x1", "x2"], {("x1",): 1.0})
        with pytest.raises(InvariantError):
            compute_reliabilities([[m], [other]], ["x1"])

    def test_empty_training_set(self):
        with pytest.raises(InvariantError):
            compute_reliabilities([[]], [])

    def test_tie_break_is_index_ascending(self):
        m = MassFunction(X_FRAME, {("x1",): 1.0})
        report = compute_reliabilities([[m], [m]], ["x1"])
        assert report.reliabilities == [1.0, 1.0]
        assert report.fusion_order == [0, 1]


class TestReliabilityReport:
    def test_json_round_trip(self):
        report = ReliabilityReport(
            per_source_dc=[0.5, -0.2], reliabilities=[1.0, 0.0], fusion_order=[0, 1]
        )
        again = ReliabilityReport.from_dict(json.loads(json.dumps(report.to_dict())))
        assert again == report

    def test_dict_keys(self):
        report = ReliabilityReport([0.1], [1.0], [0])
        assert set(report.to_dict()) == {"dc", "reliability", "fusion_order"}

    def test_table_rendering_lists_every_source(self):
        report = ReliabilityReport([0.5, -0.2], [1.0, 0.0], [0, 1])
        table = report.as_table()
        assert len(table.splitlines()) == 3
