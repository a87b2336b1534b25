"""Chord fingering lookup table for standard tuning (E2 A2 D3 G3 B3 E4).

Common chords use their open shapes; everything else falls back to the E- or
A-shape barre with the lower fret position. Every entry sounds at least three
strings and its sounding pitch classes cover exactly the chord triad.
"""

from __future__ import annotations

from dataclasses import dataclass

from strumkit.events import ChordSymbol, Quality

MUTED = -1

# MIDI numbers of the open strings, low to high
OPEN_STRING_MIDI = (40, 45, 50, 55, 59, 64)  # E2 A2 D3 G3 B3 E4


@dataclass(frozen=True)
class Fingering:
    """Per-string frets, low to high; MUTED (-1) marks a silent string."""

    frets: tuple[int, int, int, int, int, int]

    def __post_init__(self):
        if len(self.frets) != 6:
            raise ValueError("need exactly six strings")
        for f in self.frets:
            if f != MUTED and not 0 <= f <= 12:
                raise ValueError(f"fret out of range: {f}")
        if sum(1 for f in self.frets if f != MUTED) < 3:
            raise ValueError("strummable chords need at least 3 sounding strings")

    def sounding_midi(self) -> list[tuple[int, int]]:
        """(string index, MIDI note) for each sounding string, low to high."""
        return [(i, OPEN_STRING_MIDI[i] + f)
                for i, f in enumerate(self.frets) if f != MUTED]

    def pitch_classes(self) -> set[int]:
        return {midi % 12 for _, midi in self.sounding_midi()}


_OPEN_SHAPES: dict[str, tuple[int, ...]] = {
    "C:maj": (MUTED, 3, 2, 0, 1, 0),
    "A:maj": (MUTED, 0, 2, 2, 2, 0),
    "G:maj": (3, 2, 0, 0, 0, 3),
    "E:maj": (0, 2, 2, 1, 0, 0),
    "D:maj": (MUTED, MUTED, 0, 2, 3, 2),
    "A:min": (MUTED, 0, 2, 2, 1, 0),
    "E:min": (0, 2, 2, 0, 0, 0),
    "D:min": (MUTED, MUTED, 0, 2, 3, 1),
}


def _e_shape(fret: int, quality: Quality) -> tuple[int, ...]:
    third = fret + 1 if quality is Quality.MAJOR else fret
    return (fret, fret + 2, fret + 2, third, fret, fret)


def _a_shape(fret: int, quality: Quality) -> tuple[int, ...]:
    third = fret + 2 if quality is Quality.MAJOR else fret + 1
    return (MUTED, fret, fret + 2, fret + 2, third, fret)


def _build_table() -> dict[int, Fingering]:
    table: dict[int, Fingering] = {}
    for index in range(24):
        chord = ChordSymbol.from_class_index(index)
        open_shape = _OPEN_SHAPES.get(str(chord))
        if open_shape is not None:
            table[index] = Fingering(open_shape)
            continue
        e_fret = (chord.root - 4) % 12
        a_fret = (chord.root - 9) % 12
        shape = _e_shape(e_fret, chord.quality) if e_fret <= a_fret \
            else _a_shape(a_fret, chord.quality)
        table[index] = Fingering(shape)
    return table


_FINGERING_TABLE = _build_table()


def fingering_for(chord: ChordSymbol) -> Fingering:
    """Deterministic fingering for any of the 24 vocabulary chords."""
    return _FINGERING_TABLE[chord.class_index]
