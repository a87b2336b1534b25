"""Tolerance-matched metrics: matcher oracle, scores, hybrid rescoring."""

import json

import numpy as np
import pytest

from strumkit.evaluation import (class_scores, chord_accuracy, evaluate_run,
                                 hybrid_direction, match_times,
                                 precision_recall_f1, render_report_table)
from strumkit.events import ChordSymbol, Direction, StrumEvent
from strumkit.motion import MotionTrace

C_MAJ = ChordSymbol.parse("C:maj")
G_MAJ = ChordSymbol.parse("G:maj")


def brute_force_max_matching(ref, est, tol_s):
    """Exhaustive maximum bipartite matching cardinality (oracle)."""
    feasible = [[abs(r - e) <= tol_s for e in est] for r in ref]

    def best(i, used):
        if i == len(ref):
            return 0
        top = best(i + 1, used)
        for j in range(len(est)):
            if feasible[i][j] and not used & (1 << j):
                top = max(top, 1 + best(i + 1, used | (1 << j)))
        return top

    return best(0, 0)


def make_events(times, direction=Direction.DOWN, chord=C_MAJ):
    return [StrumEvent(t, direction, chord) for t in times]


class TestMatchTimes:
    def test_hand_example(self):
        pairs = match_times([1.03, 2.10], [1.00, 2.00], 0.05)
        assert pairs == [(0, 0)]

    def test_identical_all_matched(self):
        times = [0.5, 1.0, 1.5]
        assert len(match_times(times, times, 0.05)) == 3

    def test_greedy_would_fail(self):
        # nearest-first greedy pairs 1.04 with 1.03 and strands 1.00
        pairs = match_times([1.00, 1.04], [1.03, 1.08], 0.05)
        assert sorted(pairs) == [(0, 0), (1, 1)]

    def test_empty_inputs(self):
        assert match_times([], [1.0], 0.05) == []
        assert match_times([1.0], [], 0.05) == []

    def test_bad_tolerance(self):
        with pytest.raises(ValueError):
            match_times([1.0], [1.0], 0.0)

    def test_min_total_deviation_among_max_matchings(self):
        # both est times are within tolerance of the single ref; closest wins
        pairs = match_times([1.00], [1.04, 1.01], 0.05)
        assert pairs == [(0, 1)]

    def test_oracle_cardinality_200_instances(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            n_ref = int(rng.integers(0, 13))
            n_est = int(rng.integers(0, 13))
            ref = np.sort(rng.uniform(0, 3, n_ref))
            est = np.sort(rng.uniform(0, 3, n_est))
            got = len(match_times(list(ref), list(est), 0.05))
            want = brute_force_max_matching(list(ref), list(est), 0.05)
            assert got == want

    def test_translation_invariance(self):
        rng = np.random.default_rng(7)
        ref = list(np.sort(rng.uniform(0, 5, 10)))
        est = list(np.sort(rng.uniform(0, 5, 12)))
        base = match_times(ref, est, 0.05)
        shifted = match_times([t + 100 for t in ref],
                              [t + 100 for t in est], 0.05)
        assert base == shifted


class TestScores:
    def test_f1_formula_identity(self):
        p, r, f1 = precision_recall_f1(3, 6, 4)
        assert p == 0.75 and r == 0.5
        assert f1 == pytest.approx(2 * p * r / (p + r))

    def test_empty_convention(self):
        assert precision_recall_f1(0, 0, 0) == (0.0, 0.0, 0.0)

    def test_perfect_transcription(self):
        events = make_events([0.5, 1.0], Direction.DOWN) + \
            make_events([1.5], Direction.UP)
        events.sort(key=lambda e: e.time_s)
        report = class_scores(events, events, 0.05)
        assert report.any.f1 == report.down.f1 == report.up.f1 == 1.0

    def test_flipped_directions(self):
        ref = make_events([0.5, 1.0], Direction.DOWN)
        est = make_events([0.5, 1.0], Direction.UP)
        report = class_scores(ref, est, 0.05)
        assert report.any.f1 == 1.0
        assert report.down.f1 == 0.0
        assert report.up.f1 == 0.0

    def test_empty_estimate(self):
        ref = make_events([0.5, 1.0])
        report = class_scores(ref, [], 0.05)
        for score in (report.any, report.down, report.up):
            assert score.f1 == score.precision == score.recall == 0.0

    def test_counts_consistent(self):
        ref = make_events([1.0, 2.0, 3.0])
        est = make_events([1.01, 2.5])
        report = class_scores(ref, est, 0.05)
        assert (report.any.tp, report.any.fp, report.any.fn) == (1, 1, 2)


class TestChordAccuracy:
    def test_all_correct(self):
        ref = make_events([0.5, 1.0], chord=C_MAJ)
        assert chord_accuracy(ref, lambda t: C_MAJ) == 1.0

    def test_half_correct(self):
        ref = make_events([0.0, 1.0, 2.0, 3.0, 4.0, 5.0], chord=C_MAJ)
        accuracy = chord_accuracy(ref, lambda t: C_MAJ if t < 3 else G_MAJ)
        assert accuracy == 0.5

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            chord_accuracy([], lambda t: C_MAJ)

    def test_random_predictor_baseline(self):
        rng = np.random.default_rng(0)
        ref = make_events(np.arange(10000, dtype=float), chord=C_MAJ)
        lookup = {t.time_s: ChordSymbol.from_class_index(int(rng.integers(24)))
                  for t in ref}
        accuracy = chord_accuracy(ref, lambda t: lookup[t])
        assert accuracy == pytest.approx(1 / 24, abs=0.01)


class TestHybridDirection:
    def test_unknown_everywhere_is_identity(self):
        trace = MotionTrace(200.0, np.zeros(1000), np.zeros(1000))
        est = make_events([0.5, 1.0], Direction.UP)
        assert hybrid_direction(est, trace) == est

    def test_empty_events(self):
        trace = MotionTrace(200.0, np.zeros(100), np.zeros(100))
        assert hybrid_direction([], trace) == []

    def test_overrides_from_trace(self):
        # strictly increasing a_y: positive derivative everywhere (up stroke)
        rate = 200.0
        a_y = np.arange(1000) / rate
        trace = MotionTrace(rate, np.zeros(1000), a_y)
        est = make_events([1.0, 2.0], Direction.DOWN)
        out = hybrid_direction(est, trace)
        assert all(e.direction is Direction.UP for e in out)
        assert [e.time_s for e in out] == [1.0, 2.0]


class TestReports:
    def test_json_stable_keys(self):
        ref = make_events([1.0, 2.0])
        report, payload = evaluate_run(ref, ref, chord_at=lambda t: C_MAJ)
        data = json.loads(payload)
        for key in ("f1_any", "p_any", "r_any", "f1_down", "f1_up",
                    "tp_any", "fp_any", "fn_any", "chord_accuracy",
                    "tolerance_s"):
            assert key in data
        assert data["f1_any"] == 1.0
        assert data["chord_accuracy"] == 1.0

    def test_deterministic_bytes(self):
        ref = make_events([1.0, 2.0])
        est = make_events([1.01])
        _, first = evaluate_run(ref, est)
        _, second = evaluate_run(ref, est)
        assert first == second

    def test_table_renders_rows(self):
        ref = make_events([1.0])
        report, _ = evaluate_run(ref, ref)
        table = render_report_table({"flux": report, "model": report})
        lines = table.splitlines()
        assert "F1_any" in lines[0]
        assert len(lines) == 4  # header, rule, two rows
