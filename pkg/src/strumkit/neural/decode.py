"""Event decoding from frame-level network outputs."""

from __future__ import annotations

import numpy as np
import torch

from strumkit import dsp
from strumkit.audio import AudioClip, resample
from strumkit.events import ChordSymbol, StrumEvent
from strumkit.neural.config import TargetSpec
from strumkit.neural.features import ACTION_CHANNELS, segment_recording
from strumkit.neural.model import StrumTranscriber

DEFAULT_THRESHOLD = 0.3
DEFAULT_MIN_GAP_S = 0.05


def _channel_peaks(curve: np.ndarray, threshold: float,
                   min_gap_frames: int) -> list[tuple[float, float]]:
    """(refined frame position, peak value) for one activation channel.

    Strict local maxima at or above the threshold, greedily thinned so no two
    survivors are closer than min_gap_frames (larger peaks win), each refined
    by fitting a parabola through the peak and its neighbors.
    """
    idx = [i for i in range(1, len(curve) - 1)
           if curve[i] > curve[i - 1] and curve[i] > curve[i + 1]
           and curve[i] >= threshold]
    kept: list[int] = []
    for i in sorted(idx, key=lambda i: curve[i], reverse=True):
        if all(abs(i - j) >= min_gap_frames for j in kept):
            kept.append(i)

    out = []
    for i in sorted(kept):
        left, mid, right = curve[i - 1], curve[i], curve[i + 1]
        denom = left - 2.0 * mid + right
        delta = 0.0 if abs(denom) < 1e-12 else 0.5 * (left - right) / denom
        delta = float(np.clip(delta, -0.5, 0.5))
        out.append((i + delta, float(mid)))
    return out


def decode_events(r_action: np.ndarray, p_chord: np.ndarray,
                  spec: TargetSpec | None = None,
                  threshold: float = DEFAULT_THRESHOLD,
                  min_gap_s: float = DEFAULT_MIN_GAP_S) -> list[StrumEvent]:
    """Turn per-frame activations into a sorted list of strum events.

    Peaks are picked independently per action channel; when a down and an up
    peak land within J frames of each other only the stronger one survives.
    Each event's chord is the argmax chord probability at its peak frame.
    """
    spec = spec or TargetSpec(T=r_action.shape[0])
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    if r_action.ndim != 2 or r_action.shape[1] != spec.K:
        raise ValueError(f"expected (T, {spec.K}) action activations")
    if p_chord.shape != (r_action.shape[0], spec.C):
        raise ValueError(f"expected (T, {spec.C}) chord activations")

    min_gap_frames = max(1, int(round(min_gap_s / spec.delta_s)))
    candidates = []  # (frame position, value, direction)
    for k, direction in enumerate(ACTION_CHANNELS):
        for pos, value in _channel_peaks(r_action[:, k], threshold, min_gap_frames):
            candidates.append((pos, value, direction))

    # Cross-channel suppression: conflicting directions within J frames.
    candidates.sort(key=lambda c: c[1], reverse=True)
    kept: list[tuple[float, float, object]] = []
    for pos, value, direction in candidates:
        if all(d is direction or abs(pos - p) > spec.J for p, _, d in kept):
            kept.append((pos, value, direction))

    events = []
    for pos, _, direction in sorted(kept):
        frame = int(round(pos))
        chord = ChordSymbol.from_class_index(int(np.argmax(p_chord[frame])))
        events.append(StrumEvent(pos * spec.delta_s, direction, chord))
    return events


def transcribe(model: StrumTranscriber, audio: AudioClip,
               spec: TargetSpec | None = None,
               threshold: float = DEFAULT_THRESHOLD,
               min_gap_s: float = DEFAULT_MIN_GAP_S,
               batch_size: int = 8) -> list[StrumEvent]:
    """Transcribe a recording of any length and sample rate.

    The recording is cut into overlapping 10 s clips (1 s hop), frame
    activations from overlapping clips are averaged on the recording's frame
    clock, and the merged activations are decoded to absolute-time events.
    """
    spec = spec or TargetSpec()
    audio = resample(audio, dsp.SAMPLE_RATE)
    clips = segment_recording(audio, [], spec)
    hop_frames = int(round(1.0 / spec.delta_s))
    n_frames = 1 + len(audio) // dsp.HOP

    sum_action = np.zeros((n_frames, spec.K))
    sum_chord = np.zeros((n_frames, spec.C))
    counts = np.zeros(n_frames)

    model.eval()
    with torch.no_grad():
        for begin in range(0, len(clips), batch_size):
            batch = clips[begin:begin + batch_size]
            mel = torch.tensor(np.stack([c.mel for c in batch]),
                               dtype=torch.float32)
            r_action, p_chord = model(mel)
            for j, _ in enumerate(batch):
                start = (begin + j) * hop_frames
                span = min(spec.T, n_frames - start)
                if span <= 0:
                    continue
                sum_action[start:start + span] += r_action[j, :span].numpy()
                sum_chord[start:start + span] += p_chord[j, :span].numpy()
                counts[start:start + span] += 1.0

    counts = np.maximum(counts, 1.0)
    merged_spec = TargetSpec(J=spec.J, delta_s=spec.delta_s, K=spec.K,
                             C=spec.C, T=n_frames)
    return decode_events(sum_action / counts[:, None],
                         sum_chord / counts[:, None],
                         merged_spec, threshold, min_gap_s)
