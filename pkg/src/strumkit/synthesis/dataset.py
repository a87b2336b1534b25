"""Labeled dataset generation: sample -> render -> augment -> write.

Each example derives its RNG from (dataset seed, example index), so examples
are reproducible independently of generation order; the whole run is
byte-deterministic for a fixed seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from strumkit.audio import AudioClip, save_wav
from strumkit.events import StrumEvent, write_labels
from strumkit.synthesis.augment import AugmentConfig, augment_audio
from strumkit.synthesis.render import RenderConfig, render_tablature
from strumkit.synthesis.tablature import SampleConfig, sample_tablature

SPLITS = ("train", "valid", "test")


@dataclass(frozen=True)
class ManifestEntry:
    example_id: str
    audio_path: str
    label_path: str
    split: str
    seed: list[int]
    params: dict


@dataclass(frozen=True)
class DatasetManifest:
    seed: int
    count: int
    entries: list[ManifestEntry]

    def split_counts(self) -> dict[str, int]:
        counts = {s: 0 for s in SPLITS}
        for e in self.entries:
            counts[e.split] += 1
        return counts

    def to_json(self) -> str:
        return json.dumps({
            "format_version": 1,
            "seed": self.seed,
            "count": self.count,
            "entries": [vars(e) for e in self.entries],
        }, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "DatasetManifest":
        d = json.loads(text)
        entries = [ManifestEntry(**e) for e in d["entries"]]
        return cls(d["seed"], d["count"], entries)


@dataclass(frozen=True)
class DatasetConfig:
    count: int = 1000
    seed: int = 0
    sample: SampleConfig = field(default_factory=SampleConfig)
    render: RenderConfig = field(default_factory=RenderConfig)
    augment: AugmentConfig = field(default_factory=AugmentConfig)


def assign_splits(count: int, seed: int) -> list[str]:
    """90/5/5 split by seeded shuffle.

    Rounding: train = floor(90%), valid = floor(5%), test = remainder
    (count 50 -> 45/2/3, count 1000 -> 900/50/50).
    """
    n_train = int(count * 0.90)
    n_valid = int(count * 0.05)
    order = np.random.default_rng([seed, 0x5917]).permutation(count)
    splits = [""] * count
    for rank, idx in enumerate(order):
        if rank < n_train:
            splits[idx] = "train"
        elif rank < n_train + n_valid:
            splits[idx] = "valid"
        else:
            splits[idx] = "test"
    return splits


def generate_example(cfg: DatasetConfig, index: int,
                     assets: list[AudioClip] | None = None
                     ) -> tuple[AudioClip, list[StrumEvent], dict]:
    """One sample -> render -> augment pass, reproducible from (seed, index)."""
    rng = np.random.default_rng([cfg.seed, index])
    tab, _ = sample_tablature(rng, cfg.sample)
    clip, events = render_tablature(tab, rng, cfg.render)
    clip, aug_record = augment_audio(clip, rng, assets, cfg.augment)
    params = {
        "tempo_bpm": tab.tempo_bpm,
        "n_measures": len(tab.measures),
        "pattern": str(tab.pattern),
        "chords": [str(c) for c, _ in tab.measures],
        "drop_last_flags": list(tab.drop_last_flags),
        "augment": aug_record,
    }
    return clip, events, params


def generate_dataset(cfg: DatasetConfig, out_dir: str | Path,
                     assets: list[AudioClip] | None = None) -> DatasetManifest:
    """Write `count` examples as WAV + label CSV under out_dir/{train,valid,test}."""
    if cfg.count < 20:
        raise ValueError("count must be >= 20")
    out = Path(out_dir)
    for split in SPLITS:
        (out / split).mkdir(parents=True, exist_ok=True)

    splits = assign_splits(cfg.count, cfg.seed)
    entries = []
    for i in range(cfg.count):
        clip, events, params = generate_example(cfg, i, assets)
        example_id = f"{i:05d}"
        audio_rel = f"{splits[i]}/{example_id}.wav"
        label_rel = f"{splits[i]}/{example_id}.csv"
        save_wav(out / audio_rel, clip)
        write_labels(out / label_rel, events)
        entries.append(ManifestEntry(example_id, audio_rel, label_rel,
                                     splits[i], [cfg.seed, i], params))

    manifest = DatasetManifest(cfg.seed, cfg.count, entries)
    (out / "manifest").write_text(manifest.to_json())
    return manifest
