"""Semi-automatic annotation: expected event grid from the recording plan,
onset-to-grid alignment, motion-based direction assignment, interpolation of
missed strums, and a manual-edit algebra with provenance tracking."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np

from strumkit import dsp
from strumkit.audio import AudioClip, resample
from strumkit.events import ChordSymbol, Direction, StrumEvent, StrumPattern16, events_to_csv
from strumkit.motion import MotionTrace, StrokeDirection, classify_direction


class EventSource(str, Enum):
    DETECTED = "detected"
    INTERPOLATED = "interpolated"
    MANUAL = "manual"


@dataclass(frozen=True)
class LabeledEvent:
    event: StrumEvent
    source: EventSource
    grid_index: int

    @property
    def time_s(self) -> float:
        return self.event.time_s


@dataclass(frozen=True)
class RecordingPlan:
    """What the player was instructed to play: pattern, tempo, chord cycle."""

    pattern: StrumPattern16
    tempo_bpm: float
    chords: tuple[ChordSymbol, ...]
    technique: str = "pick"
    volume: str = "medium"
    movement: str = "normal"

    def __post_init__(self):
        if self.tempo_bpm <= 0:
            raise ValueError("tempo must be positive")
        if not self.chords:
            raise ValueError("chord cycle must be non-empty")

    @property
    def slot_period_s(self) -> float:
        """Duration of one 16th slot: 60 / (4 * tempo)."""
        return 60.0 / (4.0 * self.tempo_bpm)

    def to_dict(self) -> dict:
        return {
            "pattern": str(self.pattern),
            "tempo_bpm": self.tempo_bpm,
            "chords": [str(c) for c in self.chords],
            "technique": self.technique,
            "volume": self.volume,
            "movement": self.movement,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RecordingPlan":
        return cls(
            pattern=StrumPattern16.parse(d["pattern"]),
            tempo_bpm=float(d["tempo_bpm"]),
            chords=tuple(ChordSymbol.parse(c) for c in d["chords"]),
            technique=d.get("technique", "pick"),
            volume=d.get("volume", "medium"),
            movement=d.get("movement", "normal"),
        )


def expected_grid(plan: RecordingPlan, start_time_s: float,
                  duration_s: float) -> list[LabeledEvent]:
    """Theoretical event grid implied by the plan, starting at start_time_s.

    Chords cycle one per measure; grid indices count non-rest slots from the
    start of the recording.
    """
    if duration_s <= 0:
        raise ValueError("duration must be positive")
    period = plan.slot_period_s
    measure_s = 16 * period
    strokes = plan.pattern.stroke_slots
    out: list[LabeledEvent] = []
    grid_index = 0
    measure = 0
    while measure * measure_s < duration_s - 1e-9:
        chord = plan.chords[measure % len(plan.chords)]
        for slot, direction in strokes:
            t = measure * measure_s + slot * period
            if t < duration_s - 1e-9:
                out.append(LabeledEvent(
                    StrumEvent(start_time_s + t, direction, chord),
                    EventSource.DETECTED, grid_index))
            grid_index += 1
        measure += 1
    return out


def align_onsets_to_grid(candidates: list[float], grid: list[LabeledEvent],
                         tol_s: float) -> tuple[list[tuple[int, float]], list[int]]:
    """One-to-one maximum-cardinality matching of detected onsets to the grid.

    Returns (matched (grid position, detected time) pairs, unmatched grid
    positions); positions index into the ``grid`` list. Among maximum
    matchings the one with the smallest total |dt| is chosen.
    """
    if tol_s <= 0:
        raise ValueError("tolerance must be positive")
    from strumkit.evaluation import match_times

    pairs = match_times([g.time_s for g in grid], candidates, tol_s)
    matched = [(gi, candidates[ci]) for gi, ci in pairs]
    matched_grid = {gi for gi, _ in pairs}
    unmatched = [i for i in range(len(grid)) if i not in matched_grid]
    return matched, unmatched


def interpolate_missing(grid: list[LabeledEvent],
                        matched: list[tuple[int, float]]) -> list[LabeledEvent]:
    """Fill unmatched grid slots by interpolating the timing deviation.

    Matched slots take the detected time; missing slots get the grid time
    plus a deviation linearly interpolated between neighboring matched slots
    (constant extrapolation at the boundaries).
    """
    if len(matched) < 2:
        raise ValueError("need at least 2 matched events to interpolate")
    matched_by_pos = dict(matched)
    pos = sorted(matched_by_pos)
    grid_times = np.array([grid[p].time_s for p in pos])
    deviations = np.array([matched_by_pos[p] - grid[p].time_s for p in pos])
    out: list[LabeledEvent] = []
    for i, g in enumerate(grid):
        if i in matched_by_pos:
            out.append(LabeledEvent(replace(g.event, time_s=matched_by_pos[i]),
                                    EventSource.DETECTED, g.grid_index))
        else:
            dev = float(np.interp(g.time_s, grid_times, deviations))
            out.append(LabeledEvent(replace(g.event, time_s=g.time_s + dev),
                                    EventSource.INTERPOLATED, g.grid_index))
    return sorted(out, key=lambda e: e.time_s)


def assign_directions(events: list[LabeledEvent], trace: MotionTrace,
                      offset_s: float) -> tuple[list[LabeledEvent], int]:
    """Overwrite non-manual directions from the motion trace.

    Unknown classifications keep the grid prior; the count of Unknowns is
    returned for the session summary. Manual events are never touched.
    """
    out: list[LabeledEvent] = []
    unknown = 0
    for ev in events:
        if ev.source is EventSource.MANUAL:
            out.append(ev)
            continue
        direction = classify_direction(trace, ev.time_s, offset_s)
        if direction is StrokeDirection.UNKNOWN:
            unknown += 1
            out.append(ev)
        else:
            mapped = Direction.UP if direction is StrokeDirection.UP else Direction.DOWN
            out.append(LabeledEvent(replace(ev.event, direction=mapped),
                                    ev.source, ev.grid_index))
    return out, unknown


def grid_tolerance_s(plan: RecordingPlan) -> float:
    """Default alignment tolerance: min(70 ms, 0.4 * slot period)."""
    return min(0.07, 0.4 * plan.slot_period_s)


@dataclass
class AnnotationSession:
    """One recording under annotation; single-writer, revision-counted."""

    audio: AudioClip
    plan: RecordingPlan
    motion: MotionTrace | None = None
    start_time_s: float = 0.0
    motion_offset_s: float = 0.0
    events: list[LabeledEvent] = field(default_factory=list)
    revision: int = 0
    unknown_direction_count: int = 0


def auto_annotate(session: AnnotationSession,
                  peak_threshold: float | None = None,
                  recompute_only: bool = False) -> list[LabeledEvent]:
    """Run the full semi-automatic pipeline on the session.

    Spectral-flux peaks are aligned to the plan's expected grid, missed slots
    are interpolated, and directions are assigned from motion when a trace is
    present. Manual events are preserved verbatim; deterministic for a fixed
    session state.
    """
    audio16 = resample(session.audio, dsp.SAMPLE_RATE)
    curve = dsp.spectral_flux(dsp.log_mel(audio16))
    if peak_threshold is None:
        peak_threshold = 0.5 * float(np.std(curve.values))
    min_gap = 0.5 * session.plan.slot_period_s
    candidates = dsp.pick_peaks(curve, peak_threshold, min_gap)

    grid = expected_grid(session.plan, session.start_time_s,
                         session.audio.duration_s - session.start_time_s)
    manual = [e for e in session.events if e.source is EventSource.MANUAL]
    manual_grid_indices = {e.grid_index for e in manual if e.grid_index >= 0}
    grid = [g for g in grid if g.grid_index not in manual_grid_indices]

    matched, _ = align_onsets_to_grid(candidates, grid, grid_tolerance_s(session.plan))
    if len(matched) >= 2:
        events = interpolate_missing(grid, matched)
        # grid slots trailing the last detected onset are usually the decay
        # tail of the recording, not missed strums; drop them
        last_detected = max(t for _, t in matched)
        cutoff = last_detected + 1.5 * session.plan.slot_period_s
        events = [e for e in events
                  if e.source is not EventSource.INTERPOLATED or e.time_s <= cutoff]
    else:
        events = grid

    unknown = 0
    if session.motion is not None:
        events, unknown = assign_directions(events, session.motion,
                                            session.motion_offset_s)
    session.unknown_direction_count = unknown
    return sorted(events + manual, key=lambda e: e.time_s)


# --- edit algebra ---

@dataclass(frozen=True)
class SetStartTime:
    start_time_s: float


@dataclass(frozen=True)
class SetMotionOffset:
    motion_offset_s: float


@dataclass(frozen=True)
class OverrideEvent:
    index: int
    time_s: float | None = None
    direction: Direction | None = None
    chord: ChordSymbol | None = None


@dataclass(frozen=True)
class InsertEvent:
    time_s: float
    direction: Direction
    chord: ChordSymbol


@dataclass(frozen=True)
class DeleteEvent:
    index: int


SessionEdit = SetStartTime | SetMotionOffset | OverrideEvent | InsertEvent | DeleteEvent


def apply_session_edit(session: AnnotationSession, edit: SessionEdit) -> AnnotationSession:
    """Apply one edit, bump the revision, and recompute where required.

    SetStartTime / SetMotionOffset re-run the automatic pipeline over
    non-manual events; Override / Insert mark the touched event as manual so
    later recomputes leave it alone.
    """
    if isinstance(edit, SetStartTime):
        if edit.start_time_s < 0:
            raise ValueError("start time must be >= 0")
        session.start_time_s = edit.start_time_s
        session.events = auto_annotate(session)
    elif isinstance(edit, SetMotionOffset):
        session.motion_offset_s = edit.motion_offset_s
        session.events = auto_annotate(session)
    elif isinstance(edit, OverrideEvent):
        if not 0 <= edit.index < len(session.events):
            raise IndexError(f"no event at index {edit.index}")
        old = session.events[edit.index]
        ev = old.event
        if edit.time_s is not None:
            if edit.time_s < 0:
                raise ValueError("event time must be >= 0")
            ev = replace(ev, time_s=edit.time_s)
        if edit.direction is not None:
            ev = replace(ev, direction=edit.direction)
        if edit.chord is not None:
            ev = replace(ev, chord=edit.chord)
        session.events[edit.index] = LabeledEvent(ev, EventSource.MANUAL, old.grid_index)
        session.events.sort(key=lambda e: e.time_s)
    elif isinstance(edit, InsertEvent):
        if edit.time_s < 0:
            raise ValueError("event time must be >= 0")
        session.events.append(LabeledEvent(
            StrumEvent(edit.time_s, edit.direction, edit.chord),
            EventSource.MANUAL, -1))
        session.events.sort(key=lambda e: e.time_s)
    elif isinstance(edit, DeleteEvent):
        if not 0 <= edit.index < len(session.events):
            raise IndexError(f"no event at index {edit.index}")
        del session.events[edit.index]
    else:
        raise TypeError(f"unknown edit type: {type(edit)!r}")
    session.revision += 1
    return session


def export_annotations(events: list[LabeledEvent]) -> str:
    """Label CSV for the session's events (time_s, direction, chord)."""
    return events_to_csv([e.event for e in events])


def session_to_dict(session: AnnotationSession, audio_path: str = "",
                    motion_path: str = "") -> dict:
    """Self-describing session archive (file references, not raw audio)."""
    return {
        "format_version": 1,
        "audio_path": audio_path,
        "motion_path": motion_path,
        "plan": session.plan.to_dict(),
        "start_time_s": session.start_time_s,
        "motion_offset_s": session.motion_offset_s,
        "revision": session.revision,
        "events": [
            {
                "time_s": e.time_s,
                "direction": e.event.direction.value,
                "chord": str(e.event.chord),
                "source": e.source.value,
                "grid_index": e.grid_index,
            }
            for e in session.events
        ],
    }


def save_session(path: str | Path, session: AnnotationSession,
                 audio_path: str = "", motion_path: str = "") -> None:
    Path(path).write_text(json.dumps(session_to_dict(session, audio_path, motion_path),
                                     indent=2))
