from strumkit.synthesis.banks import (
    PROGRESSION_BANK,
    PATTERN_BANK,
    ProgressionTemplate,
    resolve_progression,
)
from strumkit.synthesis.fingerings import Fingering, fingering_for, MUTED
from strumkit.synthesis.tablature import Tablature, SampleConfig, sample_tablature
from strumkit.synthesis.render import RenderConfig, render_tablature, karplus_strong
from strumkit.synthesis.augment import AugmentConfig, augment_audio
from strumkit.synthesis.dataset import DatasetConfig, DatasetManifest, generate_dataset

__all__ = [
    "PROGRESSION_BANK",
    "PATTERN_BANK",
    "ProgressionTemplate",
    "resolve_progression",
    "Fingering",
    "fingering_for",
    "MUTED",
    "Tablature",
    "SampleConfig",
    "sample_tablature",
    "RenderConfig",
    "render_tablature",
    "karplus_strong",
    "AugmentConfig",
    "augment_audio",
    "DatasetConfig",
    "DatasetManifest",
    "generate_dataset",
]
