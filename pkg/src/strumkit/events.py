"""Transcription currency: chords, strum events, patterns, and the label CSV format."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

PITCH_NAMES = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"]
_PITCH_INDEX = {name: i for i, name in enumerate(PITCH_NAMES)}


class Direction(str, Enum):
    DOWN = "down"
    UP = "up"


class Quality(str, Enum):
    MAJOR = "maj"
    MINOR = "min"


@dataclass(frozen=True, order=True)
class ChordSymbol:
    """One of the 24 major/minor chords: chromatic root 0-11 (0 = C) + quality."""

    root: int
    quality: Quality

    def __post_init__(self):
        if not 0 <= self.root < 12:
            raise ValueError(f"root must be in [0, 12), got {self.root}")

    @property
    def class_index(self) -> int:
        """Index in [0, 24): minor chords occupy 12-23."""
        return (12 if self.quality is Quality.MINOR else 0) + self.root

    @classmethod
    def from_class_index(cls, index: int) -> "ChordSymbol":
        if not 0 <= index < 24:
            raise ValueError(f"chord class index out of range: {index}")
        return cls(index % 12, Quality.MINOR if index >= 12 else Quality.MAJOR)

    def transposed(self, semitones: int) -> "ChordSymbol":
        return ChordSymbol((self.root + semitones) % 12, self.quality)

    def __str__(self) -> str:
        return f"{PITCH_NAMES[self.root]}:{self.quality.value}"

    @classmethod
    def parse(cls, text: str) -> "ChordSymbol":
        try:
            root_name, quality = text.split(":")
            return cls(_PITCH_INDEX[root_name], Quality(quality))
        except (ValueError, KeyError) as exc:
            raise ValueError(f"malformed chord symbol {text!r}") from exc


@dataclass(frozen=True)
class StrumEvent:
    time_s: float
    direction: Direction
    chord: ChordSymbol

    def __post_init__(self):
        if not math.isfinite(self.time_s):
            raise ValueError("event time must be finite")

    def shifted(self, dt: float) -> "StrumEvent":
        return StrumEvent(self.time_s + dt, self.direction, self.chord)


class Slot(str, Enum):
    """One 16th-note slot of a strumming pattern."""

    DOWN = "d"
    UP = "u"
    REST = "."


@dataclass(frozen=True)
class StrumPattern16:
    """One 4/4 measure on a 16th grid: 16 slots of down/up/rest."""

    slots: tuple[Slot, ...]

    def __post_init__(self):
        if len(self.slots) != 16:
            raise ValueError(f"pattern needs exactly 16 slots, got {len(self.slots)}")

    @classmethod
    def parse(cls, text: str) -> "StrumPattern16":
        """Parse a 16-character string of 'd', 'u', '.' characters."""
        return cls(tuple(Slot(c) for c in text))

    def __str__(self) -> str:
        return "".join(s.value for s in self.slots)

    @property
    def stroke_slots(self) -> list[tuple[int, Direction]]:
        """(slot index, direction) for every non-rest slot."""
        out = []
        for i, slot in enumerate(self.slots):
            if slot is Slot.DOWN:
                out.append((i, Direction.DOWN))
            elif slot is Slot.UP:
                out.append((i, Direction.UP))
        return out


LABEL_HEADER = ["time_s", "direction", "chord"]


def events_to_csv(events: list[StrumEvent]) -> str:
    """Serialize events to the label CSV format (time at 6 decimals)."""
    times = [e.time_s for e in events]
    if times != sorted(times):
        raise ValueError("events must be sorted by time")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(LABEL_HEADER)
    for e in events:
        writer.writerow([f"{e.time_s:.6f}", e.direction.value, str(e.chord)])
    return buf.getvalue()


def events_from_csv(text: str) -> list[StrumEvent]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != LABEL_HEADER:
        raise ValueError(f"unexpected label CSV header: {header}")
    events = []
    for row in reader:
        if not row:
            continue
        time_s, direction, chord = row
        events.append(StrumEvent(float(time_s), Direction(direction), ChordSymbol.parse(chord)))
    return events


def write_labels(path: str | Path, events: list[StrumEvent]) -> None:
    Path(path).write_text(events_to_csv(events))


def read_labels(path: str | Path) -> list[StrumEvent]:
    return events_from_csv(Path(path).read_text())
