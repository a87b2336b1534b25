"""Clip segmentation and regression-target construction.

Onset targets are triangular activations of the time difference to the
nearest event of each action channel, peaking at 1 on the event and reaching
zero J frames away; chord targets are one-hot within the same +/- J frame
window around each event and zero elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from strumkit import dsp
from strumkit.audio import AudioClip
from strumkit.events import Direction, StrumEvent
from strumkit.neural.config import TargetSpec

ACTION_CHANNELS = (Direction.DOWN, Direction.UP)


@dataclass(frozen=True)
class ClipExample:
    """One training unit: Mel frames with action/chord targets and its events."""

    mel: np.ndarray  # T x n_mels
    g_action: np.ndarray  # T x K
    g_chord: np.ndarray  # T x C
    events: tuple[StrumEvent, ...]  # clip-relative times

    def __post_init__(self):
        if not (self.mel.shape[0] == self.g_action.shape[0] == self.g_chord.shape[0]):
            raise ValueError("frame counts of mel and targets must agree")


def build_targets(events: list[StrumEvent],
                  spec: TargetSpec) -> tuple[np.ndarray, np.ndarray]:
    """Targets on the clip's frame clock (frame i centered at i * delta_s).

    Overlapping triangles combine by elementwise max so targets stay <= 1.
    Chord targets take the nearest event's chord within the window.
    """
    g_action = np.zeros((spec.T, spec.K))
    g_chord = np.zeros((spec.T, spec.C))
    if not events:
        return g_action, g_chord

    width = spec.J * spec.delta_s
    frame_times = np.arange(spec.T) * spec.delta_s
    nearest_dt = np.full(spec.T, np.inf)
    nearest_chord = np.zeros(spec.T, dtype=int)

    for e in events:
        k = ACTION_CHANNELS.index(e.direction)
        dt = np.abs(frame_times - e.time_s)
        tri = np.where(dt <= width + 1e-12, 1.0 - dt / width, 0.0)
        g_action[:, k] = np.maximum(g_action[:, k], tri)
        closer = dt < nearest_dt
        nearest_dt[closer] = dt[closer]
        nearest_chord[closer] = e.chord.class_index

    in_window = nearest_dt <= width + 1e-12
    g_chord[in_window, nearest_chord[in_window]] = 1.0
    return np.clip(g_action, 0.0, 1.0), g_chord


def clip_example(audio: AudioClip, events: list[StrumEvent], start_s: float,
                 spec: TargetSpec) -> ClipExample:
    """One 10 s clip starting at start_s, zero-padded past the recording end."""
    n_clip_samples = int(round(spec.clip_length_s * dsp.SAMPLE_RATE))
    start = int(round(start_s * dsp.SAMPLE_RATE))
    chunk = audio.samples[start:start + n_clip_samples]
    if len(chunk) < n_clip_samples:
        chunk = np.pad(chunk, (0, n_clip_samples - len(chunk)))
    mel = dsp.log_mel(AudioClip(chunk, dsp.SAMPLE_RATE)).frames[:spec.T]
    clip_events = tuple(e.shifted(-start_s) for e in events
                        if start_s <= e.time_s < start_s + spec.clip_length_s)
    g_action, g_chord = build_targets(list(clip_events), spec)
    return ClipExample(mel, g_action, g_chord, clip_events)


def segment_recording(audio: AudioClip, events: list[StrumEvent],
                      spec: TargetSpec) -> list[ClipExample]:
    """Cut a recording into overlapping 10 s clips with a 1 s hop.

    The final partial clip is zero-padded; events are re-timed relative to
    each clip start, and clips without events are kept (they teach silence).
    """
    if audio.sample_rate != dsp.SAMPLE_RATE:
        raise ValueError(f"expected {dsp.SAMPLE_RATE} Hz audio")
    if len(audio) == 0:
        raise ValueError("empty audio")

    clip_len = spec.clip_length_s
    hop = 1.0
    duration = audio.duration_s
    n_clips = max(1, 1 + math.ceil(round(duration - clip_len, 6)))
    n_clip_samples = int(round(clip_len * dsp.SAMPLE_RATE))

    out = []
    for c in range(n_clips):
        start_s = c * hop
        start = int(round(start_s * dsp.SAMPLE_RATE))
        chunk = audio.samples[start:start + n_clip_samples]
        if len(chunk) < n_clip_samples:
            chunk = np.pad(chunk, (0, n_clip_samples - len(chunk)))
        mel = dsp.log_mel(AudioClip(chunk, dsp.SAMPLE_RATE)).frames[:spec.T]
        clip_events = tuple(e.shifted(-start_s) for e in events
                            if start_s <= e.time_s < start_s + clip_len)
        g_action, g_chord = build_targets(list(clip_events), spec)
        out.append(ClipExample(mel, g_action, g_chord, clip_events))
    return out
