"""Guitar strumming transcription toolkit.

Subpackages cover the full pipeline: DSP and onset detection (`dsp`),
hand-motion simulation and direction classification (`motion`),
semi-automatic annotation (`annotation`), synthetic dataset generation
(`synthesis`), the CRNN transcription model (`neural`), evaluation
metrics (`evaluation`), and the CLI / annotation service (`cli`,
`service`).
"""

from strumkit.audio import AudioClip, load_wav, save_wav, resample, pitch_shift
from strumkit.events import ChordSymbol, Direction, StrumEvent, StrumPattern16

__all__ = [
    "AudioClip",
    "ChordSymbol",
    "Direction",
    "StrumEvent",
    "StrumPattern16",
    "load_wav",
    "save_wav",
    "resample",
    "pitch_shift",
]
