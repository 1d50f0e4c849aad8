"""Permutation algebra: event space, ordered intersections, orthogonal
sums, ordered probability transformation and order-aware discounting."""

import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rpsfusion import (
    Frame,
    InvariantError,
    RandomPermutationSet,
    TotalConflictError,
    dempster_combine,
    discount_rps,
    enumerate_pes,
    left_intersect,
    left_orthogonal_sum,
    opt,
    perm_count,
    right_intersect,
    right_orthogonal_sum,
)
from _support import is_subsequence, label_set, random_mass_function, random_rps


class TestEnumeratePes:
    def test_three_labels_gives_fifteen_events(self):
        assert len(enumerate_pes(Frame(["D", "N", "A"]))) == 15
        assert perm_count(3) == 16

    def test_single_label(self):
        assert enumerate_pes(Frame(["a"])) == (("a",),)

    def test_four_labels(self):
        # 4 + 12 + 24 + 24 arrangements of sizes 1..4.
        assert len(enumerate_pes(Frame(label_set(4)))) == 64
        assert perm_count(4) == 65

    def test_deterministic_order(self):
        events = enumerate_pes(Frame(["a", "b"]))
        assert events == (("a",), ("b",), ("a", "b"), ("b", "a"))

    def test_large_frames_are_rejected(self):
        with pytest.raises(InvariantError):
            enumerate_pes(Frame(label_set(9)))


class TestIntersections:
    def test_left_keeps_first_operand_order(self):
        assert left_intersect(("x1", "x2", "x3"), ("x3", "x1")) == ("x1", "x3")

    def test_right_keeps_second_operand_order(self):
        assert right_intersect(("x1", "x2", "x3"), ("x3", "x1")) == ("x3", "x1")

    def test_identical_events(self):
        assert left_intersect(("a", "b"), ("a", "b")) == ("a", "b")
        assert right_intersect(("a", "b"), ("a", "b")) == ("a", "b")

    def test_disjoint_events_are_empty(self):
        assert left_intersect(("x1",), ("x2",)) == ()
        assert right_intersect(("x1",), ("x2",)) == ()

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_subsequence_property_exhaustive(self, n):
        events = enumerate_pes(Frame(label_set(n)))
        for a, b in itertools.product(events, repeat=2):
            assert is_subsequence(left_intersect(a, b), a)
            assert is_subsequence(right_intersect(a, b), b)


class TestRandomPermutationSet:
    def test_events_are_order_significant(self):
        mu = RandomPermutationSet(["a", "b"], {("a", "b"): 0.4, ("b", "a"): 0.6})
        assert mu[("a", "b")] == 0.4
        assert mu[("b", "a")] == 0.6

    def test_rejects_repeated_labels(self):
        with pytest.raises(InvariantError):
            RandomPermutationSet(["a", "b"], {("a", "a"): 1.0})

    def test_rejects_empty_event(self):
        with pytest.raises(InvariantError):
            RandomPermutationSet(["a"], {(): 1.0})

    def test_round_trip_is_lossless(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            mu = random_rps(rng, label_set(3))
            again = RandomPermutationSet.from_dict(json.loads(json.dumps(mu.to_dict())))
            assert dict(again.items()) == dict(mu.items())

    def test_from_dict_rejects_duplicates(self):
        doc = {"frame": ["a", "b"], "pmf": [
            {"event": ["a", "b"], "mass": 0.5},
            {"event": ["a", "b"], "mass": 0.5},
        ]}
        with pytest.raises(InvariantError):
            RandomPermutationSet.from_dict(doc)


class TestOrthogonalSums:
    def test_left_operand_order_wins(self):
        frame = ["x1", "x2"]
        mu1 = RandomPermutationSet(frame, {("x1", "x2"): 1.0})
        mu2 = RandomPermutationSet(frame, {("x2", "x1"): 1.0})
        assert left_orthogonal_sum(mu1, mu2)[("x1", "x2")] == pytest.approx(1.0)
        assert right_orthogonal_sum(mu1, mu2)[("x2", "x1")] == pytest.approx(1.0)

    def test_full_frame_event_is_neutral_on_the_left_sum(self):
        frame = ["x1", "x2", "x3"]
        rng = np.random.default_rng(2)
        mu1 = random_rps(rng, tuple(frame))
        mu2 = RandomPermutationSet(frame, {("x3", "x1", "x2"): 1.0})
        fused = left_orthogonal_sum(mu1, mu2)
        for event, mass in mu1.items():
            assert fused[event] == pytest.approx(mass, abs=1e-12)

    def test_identical_certain_inputs(self):
        frame = ["x1", "x2"]
        mu = RandomPermutationSet(frame, {("x1",): 1.0})
        assert right_orthogonal_sum(mu, mu)[("x1",)] == pytest.approx(1.0)

    def test_uniform_singletons_brute_force(self):
        # Oracle: the four product terms by hand. Two agreeing pairs survive
        # with mass 0.25 each, two disagreeing pairs conflict, so K = 0.5 and
        # each singleton renormalises to 0.5.
        frame = ["x1", "x2"]
        mu = RandomPermutationSet(frame, {("x1",): 0.5, ("x2",): 0.5})
        for combine in (left_orthogonal_sum, right_orthogonal_sum):
            out = combine(mu, mu)
            assert out[("x1",)] == pytest.approx(0.5, abs=1e-12)
            assert out[("x2",)] == pytest.approx(0.5, abs=1e-12)

    def test_total_conflict_raises(self):
        frame = ["x1", "x2"]
        mu1 = RandomPermutationSet(frame, {("x1",): 1.0})
        mu2 = RandomPermutationSet(frame, {("x2",): 1.0})
        with pytest.raises(TotalConflictError):
            left_orthogonal_sum(mu1, mu2)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 4))
    def test_output_is_normalised(self, seed, n):
        rng = np.random.default_rng(seed)
        mu1 = random_rps(rng, label_set(n))
        mu2 = random_rps(rng, label_set(n))
        for combine in (left_orthogonal_sum, right_orthogonal_sum):
            try:
                out = combine(mu1, mu2)
            except TotalConflictError:
                continue
            assert math.fsum(v for _, v in out.items()) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_singleton_sources_degenerate_to_dempster(self, n):
        rng = np.random.default_rng(n)
        labels = label_set(n)
        for _ in range(20):
            m1 = random_mass_function(rng, labels, singleton_only=True)
            m2 = random_mass_function(rng, labels, singleton_only=True)
            mu1 = RandomPermutationSet(labels, dict(m1.items()))
            mu2 = RandomPermutationSet(labels, dict(m2.items()))
            expected = dempster_combine(m1, m2)
            for combine in (left_orthogonal_sum, right_orthogonal_sum):
                out = combine(mu1, mu2)
                for focal, mass in expected.items():
                    assert out[focal] == pytest.approx(mass, abs=1e-9)


class TestOpt:
    def test_last_element_is_ignored(self):
        mu = RandomPermutationSet(["x1", "x2"], {("x1",): 0.5, ("x1", "x2"): 0.5})
        dist = opt(mu)
        assert dist["x1"] == pytest.approx(1.0, abs=1e-12)
        assert dist["x2"] == 0.0

    def test_certainty(self):
        mu = RandomPermutationSet(["x1", "x2"], {("x1",): 1.0})
        assert opt(mu)["x1"] == 1.0

    def test_full_event_splits_over_leading_elements(self):
        mu = RandomPermutationSet(label_set(3), {("x1", "x2", "x3"): 1.0})
        dist = opt(mu)
        assert dist["x1"] == pytest.approx(0.5, abs=1e-12)
        assert dist["x2"] == pytest.approx(0.5, abs=1e-12)
        assert dist["x3"] == 0.0

    def test_single_label_frame(self):
        mu = RandomPermutationSet(["only"], {("only",): 1.0})
        assert opt(mu)["only"] == 1.0

    def test_always_sums_to_one(self):
        rng = np.random.default_rng(9)
        for n in (2, 3, 4):
            for _ in range(20):
                dist = opt(random_rps(rng, label_set(n)))
                assert math.fsum(dist.probs.values()) == pytest.approx(1.0, abs=1e-9)


class TestDiscountRps:
    def test_full_reliability_is_identity(self):
        mu = RandomPermutationSet(["a", "b"], {("a",): 0.3, ("b", "a"): 0.7})
        assert discount_rps(mu, 1.0) == mu

    def test_spreads_over_all_multi_element_events(self):
        # perm_count(3) - 3 - 1 = 12 multi-element events share 0.6 evenly.
        frame = label_set(3)
        mu = RandomPermutationSet(frame, {("x1",): 1.0})
        out = discount_rps(mu, 0.4)
        assert out[("x1",)] == pytest.approx(0.4, abs=1e-12)
        multi = [ev for ev, _ in out.items() if len(ev) > 1]
        assert len(multi) == 12
        for ev in multi:
            assert out[ev] == pytest.approx(0.05, abs=1e-12)

    def test_zero_reliability_is_uniform_over_multis(self):
        frame = label_set(3)
        mu = RandomPermutationSet(frame, {("x1",): 1.0})
        out = discount_rps(mu, 0.0)
        assert out[("x1",)] == 0.0
        for ev, mass in out.items():
            assert len(ev) > 1
            assert mass == pytest.approx(1 / 12, abs=1e-12)

    def test_single_label_frame_is_rejected(self):
        mu = RandomPermutationSet(["a"], {("a",): 1.0})
        with pytest.raises(InvariantError):
            discount_rps(mu, 0.5)

    def test_rejects_out_of_range(self):
        mu = RandomPermutationSet(["a", "b"], {("a",): 1.0})
        with pytest.raises(InvariantError):
            discount_rps(mu, -0.1)

    @settings(max_examples=40, deadline=None)
    @given(
        st.integers(0, 2**32 - 1),
        st.floats(0.0, 1.0, allow_nan=False, allow_infinity=False),
    )
    def test_preserves_normalisation(self, seed, alpha):
        mu = random_rps(np.random.default_rng(seed), label_set(3))
        out = discount_rps(mu, alpha)
        assert math.fsum(v for _, v in out.items()) == pytest.approx(1.0, abs=1e-9)


def test_enumeration_cache_does_not_change_results():
    frame_a = Frame(["a", "b"])
    frame_b = Frame(["a", "b"])
    first = enumerate_pes(frame_a)
    second = enumerate_pes(frame_b)
    assert first == second
