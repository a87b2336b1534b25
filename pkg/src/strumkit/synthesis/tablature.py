"""Strumming tablature sampling: progression x key x pattern x tempo, with
the occasional dropped last string to imitate imperfect strums."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from strumkit.events import ChordSymbol, Direction, StrumEvent, StrumPattern16
from strumkit.synthesis.banks import (PATTERN_BANK, PROGRESSION_BANK,
                                      ProgressionTemplate, resolve_progression)
from strumkit.synthesis.fingerings import Fingering, fingering_for


@dataclass(frozen=True)
class Tablature:
    """A playable strumming chart: per-measure chord + fingering, one pattern,
    one tempo, and per-strum drop flags (True = last string of that strum is
    skipped)."""

    tempo_bpm: float
    measures: tuple[tuple[ChordSymbol, Fingering], ...]
    pattern: StrumPattern16
    drop_last_flags: tuple[bool, ...]

    def __post_init__(self):
        if self.tempo_bpm <= 0:
            raise ValueError("tempo must be positive")
        n_strums = len(self.pattern.stroke_slots) * len(self.measures)
        if len(self.drop_last_flags) != n_strums:
            raise ValueError("need one drop flag per strummed event")

    @property
    def slot_period_s(self) -> float:
        return 60.0 / (4.0 * self.tempo_bpm)

    @property
    def duration_s(self) -> float:
        """Symbolic duration (without any decay tail)."""
        return len(self.measures) * 16 * self.slot_period_s


@dataclass(frozen=True)
class SampleConfig:
    tempo_range: tuple[float, float] = (60.0, 140.0)
    measures_range: tuple[int, int] = (4, 6)
    drop_probability: float = 0.5
    progressions: list[ProgressionTemplate] = field(default_factory=lambda: PROGRESSION_BANK)
    patterns: list[StrumPattern16] = field(default_factory=lambda: PATTERN_BANK)


def sample_tablature(rng: np.random.Generator,
                     cfg: SampleConfig | None = None) -> tuple[Tablature, list[StrumEvent]]:
    """Draw one tablature and its slot-exact ground-truth events.

    Uniform draws: progression, key (12), pattern, tempo, measure count; each
    strummed chord's last-sounding string is dropped with probability 0.5,
    recorded in the drop flags.
    """
    cfg = cfg or SampleConfig()
    if not cfg.progressions or not cfg.patterns:
        raise ValueError("banks must be non-empty")

    progression = cfg.progressions[rng.integers(len(cfg.progressions))]
    key = int(rng.integers(12))
    pattern = cfg.patterns[rng.integers(len(cfg.patterns))]
    tempo = float(rng.uniform(*cfg.tempo_range))
    n_measures = int(rng.integers(cfg.measures_range[0], cfg.measures_range[1] + 1))

    chords = resolve_progression(progression, key)
    measures = tuple((chords[m % len(chords)], fingering_for(chords[m % len(chords)]))
                     for m in range(n_measures))

    strokes = pattern.stroke_slots
    drop_flags = tuple(bool(rng.random() < cfg.drop_probability)
                       for _ in range(len(strokes) * n_measures))

    period = 60.0 / (4.0 * tempo)
    events = []
    for m, (chord, _) in enumerate(measures):
        for slot, direction in strokes:
            events.append(StrumEvent((m * 16 + slot) * period, direction, chord))

    tab = Tablature(tempo, measures, pattern, drop_flags)
    return tab, events
