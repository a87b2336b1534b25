"""Progression and strumming-pattern banks.

Progressions are written in functional (Roman-numeral) notation; uppercase
degrees are major, lowercase minor, with the usual borrowed-chord spellings
(bVII etc.) mapped onto the 24-chord major/minor vocabulary. The banks hold
51 progressions and 36 one-measure 16th-grid patterns.
"""

from __future__ import annotations

from dataclasses import dataclass

from strumkit.events import ChordSymbol, Quality, StrumPattern16

# degree -> (semitones above the key root, chord quality)
DEGREE_TABLE: dict[str, tuple[int, Quality]] = {
    "I": (0, Quality.MAJOR),
    "ii": (2, Quality.MINOR),
    "II": (2, Quality.MAJOR),
    "iii": (4, Quality.MINOR),
    "III": (3, Quality.MAJOR),
    "IV": (5, Quality.MAJOR),
    "iv": (5, Quality.MINOR),
    "V": (7, Quality.MAJOR),
    "v": (7, Quality.MINOR),
    "vi": (9, Quality.MINOR),
    "VI": (8, Quality.MAJOR),
    "VII": (10, Quality.MAJOR),
    "bVII": (10, Quality.MAJOR),
    "bVI": (8, Quality.MAJOR),
    "bIII": (3, Quality.MAJOR),
    "i": (0, Quality.MINOR),
}


@dataclass(frozen=True)
class ProgressionTemplate:
    degrees: tuple[str, ...]

    def __post_init__(self):
        if not self.degrees:
            raise ValueError("progression must be non-empty")
        for d in self.degrees:
            if d not in DEGREE_TABLE:
                raise ValueError(f"unknown degree {d!r}")


def resolve_progression(template: ProgressionTemplate, key: int) -> list[ChordSymbol]:
    """Resolve functional degrees to concrete chords in the given key (0 = C)."""
    out = []
    for degree in template.degrees:
        interval, quality = DEGREE_TABLE[degree]
        out.append(ChordSymbol((key + interval) % 12, quality))
    return out


def _p(*degrees: str) -> ProgressionTemplate:
    return ProgressionTemplate(tuple(degrees))


PROGRESSION_BANK: list[ProgressionTemplate] = [
    # major-key staples
    _p("I", "IV", "V", "I"),
    _p("I", "V", "vi", "IV"),
    _p("I", "vi", "IV", "V"),
    _p("vi", "IV", "I", "V"),
    _p("I", "IV", "I", "V"),
    _p("I", "ii", "V", "I"),
    _p("I", "iii", "IV", "V"),
    _p("I", "vi", "ii", "V"),
    _p("IV", "V", "I", "vi"),
    _p("I", "IV", "vi", "V"),
    _p("I", "V", "IV", "V"),
    _p("ii", "V", "I", "I"),
    _p("I", "bVII", "IV", "I"),
    _p("I", "V", "ii", "IV"),
    _p("vi", "V", "IV", "V"),
    _p("I", "IV"),
    _p("I", "V"),
    _p("IV", "I", "V", "vi"),
    _p("I", "iii", "vi", "IV"),
    _p("V", "IV", "I", "I"),
    _p("I", "ii", "iii", "IV"),
    _p("I", "bVII", "bVI", "V"),
    _p("I", "vi", "iii", "V"),
    _p("ii", "IV", "V", "I"),
    _p("I", "IV", "ii", "V"),
    _p("vi", "ii", "V", "I"),
    _p("I", "V", "vi", "iii", "IV", "I", "IV", "V"),
    _p("I", "IV", "V", "IV"),
    _p("iii", "vi", "ii", "V"),
    _p("I", "II", "IV", "I"),
    # minor-key staples
    _p("i", "iv", "v", "i"),
    _p("i", "VI", "III", "VII"),
    _p("i", "iv", "VII", "III"),
    _p("i", "VII", "VI", "VII"),
    _p("i", "v", "iv", "i"),
    _p("i", "VI", "VII", "i"),
    _p("iv", "i", "v", "i"),
    _p("i", "III", "VII", "iv"),
    _p("i", "iv"),
    _p("i", "VII"),
    _p("i", "v", "VI", "III"),
    _p("VI", "VII", "i", "i"),
    _p("i", "iv", "i", "v"),
    _p("i", "VI", "iv", "v"),
    _p("i", "III", "iv", "VI"),
    _p("i", "VII", "III", "VI"),
    _p("iv", "VI", "VII", "i"),
    _p("i", "v", "i", "VII"),
    _p("i", "iv", "VI", "VII"),
    _p("i", "III", "VI", "VII"),
    _p("i", "VI", "III", "iv"),
]

_PATTERN_STRINGS = [
    "d...............",
    "d.......d.......",
    "d...d...d...d...",
    "d...d...d...d.u.",
    "d.d.d.d.d.d.d.d.",
    "d.u.d.u.d.u.d.u.",
    "d..ud.u.d..ud.u.",
    "d...d.u...u.d...",
    "d...d.u...u.d.u.",
    "d..ud.u.d.u.d.u.",
    "d.d.d.u.d.d.d.u.",
    "d..ud..ud..ud..u",
    "d...d...d.u.d.u.",
    "d.u...u.d.u...u.",
    "d...d..ud...d..u",
    "d.dud.dud.dud.du",
    "dudududududududu",
    "d..u..u...u..u..",
    "d.....u...u.d...",
    "d.d.u.d.d.d.u.d.",
    "d...u...d...u...",
    "d.u.d..ud.u.d..u",
    "d..ud.u...u.d...",
    "d.d.d.d.d.u.d.u.",
    "d......ud......u",
    "d.u.d.u.d..ud..u",
    "d...d...d...u...",
    "d.ududu.d.ududu.",
    "d..u.ud.d..u.ud.",
    "d.u..ud..ud..ud.",
    "d...dudud...dudu",
    "dud.dud.dud.dud.",
    "d..d..d.d..d..d.",
    "d..d..u.d..d..u.",
    "d.u.u.d.d.u.u.d.",
    "du.ud.du.ud.du.u",
]

PATTERN_BANK: list[StrumPattern16] = [StrumPattern16.parse(s) for s in _PATTERN_STRINGS]
