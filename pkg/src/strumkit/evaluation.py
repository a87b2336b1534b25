"""Tolerance-matched transcription metrics: onset matching, per-direction
precision/recall/F1, chord accuracy, hybrid model+sensor rescoring, and
report rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from strumkit.events import Direction, StrumEvent
from strumkit.motion import MotionTrace, StrokeDirection, classify_direction

DEFAULT_TOLERANCE_S = 0.05


def match_times(ref: list[float], est: list[float],
                tol_s: float = DEFAULT_TOLERANCE_S) -> list[tuple[int, int]]:
    """Maximum-cardinality one-to-one matching under |t_ref - t_est| <= tol_s.

    Among maximum matchings, the one minimizing the total |dt| is returned as
    (ref index, est index) pairs.
    """
    if tol_s <= 0:
        raise ValueError("tolerance must be positive")
    if len(ref) == 0 or len(est) == 0:
        return []
    dt = np.abs(np.subtract.outer(np.asarray(ref, dtype=float),
                                  np.asarray(est, dtype=float)))
    feasible = dt <= tol_s
    # A penalty far above any achievable |dt| total makes the assignment
    # maximize cardinality first, then minimize total deviation.
    penalty = (dt.size + 1) * tol_s * 10
    cost = np.where(feasible, dt, penalty)
    rows, cols = linear_sum_assignment(cost)
    return [(int(r), int(c)) for r, c in zip(rows, cols) if feasible[r, c]]


def precision_recall_f1(n_match: int, n_ref: int, n_est: int) -> tuple[float, float, float]:
    """Empty estimates (or refs) score zero by convention."""
    precision = n_match / n_est if n_est else 0.0
    recall = n_match / n_ref if n_ref else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


@dataclass(frozen=True)
class ClassScore:
    f1: float
    precision: float
    recall: float
    tp: int
    fp: int
    fn: int


@dataclass(frozen=True)
class EvalReport:
    any: ClassScore
    down: ClassScore
    up: ClassScore
    chord_accuracy: float | None
    tolerance_s: float
    dataset_id: str = ""

    def to_dict(self) -> dict:
        d = {"tolerance_s": self.tolerance_s, "dataset_id": self.dataset_id}
        for name, score in [("any", self.any), ("down", self.down), ("up", self.up)]:
            d[f"f1_{name}"] = score.f1
            d[f"p_{name}"] = score.precision
            d[f"r_{name}"] = score.recall
            d[f"tp_{name}"] = score.tp
            d[f"fp_{name}"] = score.fp
            d[f"fn_{name}"] = score.fn
        d["chord_accuracy"] = self.chord_accuracy
        return d


def _score_subset(ref_times: list[float], est_times: list[float],
                  tol_s: float) -> ClassScore:
    matches = match_times(ref_times, est_times, tol_s) if len(ref_times) and len(est_times) else []
    tp = len(matches)
    fp = len(est_times) - tp
    fn = len(ref_times) - tp
    p, r, f1 = precision_recall_f1(tp, len(ref_times), len(est_times))
    return ClassScore(f1, p, r, tp, fp, fn)


def class_scores(ref_events: list[StrumEvent], est_events: list[StrumEvent],
                 tol_s: float = DEFAULT_TOLERANCE_S,
                 dataset_id: str = "") -> EvalReport:
    """F1/P/R for class-agnostic, down-only, and up-only event subsets.

    Per-direction scores match the direction-filtered subsets independently.
    """
    if tol_s <= 0:
        raise ValueError("tolerance must be positive")

    def times(events, direction=None):
        return [e.time_s for e in events
                if direction is None or e.direction is direction]

    return EvalReport(
        any=_score_subset(times(ref_events), times(est_events), tol_s),
        down=_score_subset(times(ref_events, Direction.DOWN),
                           times(est_events, Direction.DOWN), tol_s),
        up=_score_subset(times(ref_events, Direction.UP),
                         times(est_events, Direction.UP), tol_s),
        chord_accuracy=None,
        tolerance_s=tol_s,
        dataset_id=dataset_id,
    )


def chord_accuracy(ref_events: list[StrumEvent], chord_at) -> float:
    """Fraction of reference events whose predicted chord (looked up at the
    ground-truth event time) matches the reference chord."""
    if not ref_events:
        raise ValueError("reference events must be non-empty")
    correct = sum(1 for e in ref_events if chord_at(e.time_s) == e.chord)
    return correct / len(ref_events)


def hybrid_direction(est_events: list[StrumEvent], trace: MotionTrace,
                     offset_s: float = 0.0) -> list[StrumEvent]:
    """Keep the model's event times but take directions from the motion trace.

    Unknown classifications fall back to the model's own direction.
    """
    out = []
    for e in est_events:
        direction = classify_direction(trace, e.time_s, offset_s)
        if direction is StrokeDirection.UP:
            out.append(replace(e, direction=Direction.UP))
        elif direction is StrokeDirection.DOWN:
            out.append(replace(e, direction=Direction.DOWN))
        else:
            out.append(e)
    return out


def render_report_table(rows: dict[str, EvalReport]) -> str:
    """Aligned human-readable table, one row per method."""
    header = f"{'method':<20} {'F1_any':>8} {'P_any':>8} {'R_any':>8} " \
             f"{'F1_down':>8} {'F1_up':>8} {'chord_acc':>10}"
    lines = [header, "-" * len(header)]
    for name, rep in rows.items():
        acc = f"{rep.chord_accuracy:.4f}" if rep.chord_accuracy is not None else "-"
        lines.append(
            f"{name:<20} {rep.any.f1:>8.4f} {rep.any.precision:>8.4f} "
            f"{rep.any.recall:>8.4f} {rep.down.f1:>8.4f} {rep.up.f1:>8.4f} {acc:>10}")
    return "\n".join(lines) + "\n"


def evaluate_run(ref_events: list[StrumEvent], est_events: list[StrumEvent],
                 tol_s: float = DEFAULT_TOLERANCE_S, dataset_id: str = "",
                 chord_at=None) -> tuple[EvalReport, str]:
    """Score one run and serialize a machine-readable report.

    Returns (report, JSON text); the JSON carries stable keys (f1_any, p_any,
    ..., chord_accuracy, tp/fp/fn per class).
    """
    report = class_scores(ref_events, est_events, tol_s, dataset_id)
    if chord_at is not None and ref_events:
        report = replace(report, chord_accuracy=chord_accuracy(ref_events, chord_at))
    return report, json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
