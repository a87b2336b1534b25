"""Audio container, WAV I/O, resampling and pitch shifting."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.io import wavfile
from scipy.signal import resample_poly


@dataclass(frozen=True)
class AudioClip:
    """Mono waveform with its sample rate. Samples are float64 in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError(f"expected mono 1-D samples, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples contain non-finite values")
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate

    def __len__(self) -> int:
        return len(self.samples)


def load_wav(path: str | Path) -> AudioClip:
    """Load a WAV file (PCM16, PCM32 or float32); stereo is downmixed to mono."""
    rate, data = wavfile.read(str(path))
    return _decode_wav(rate, data)


def load_wav_bytes(data: bytes) -> AudioClip:
    """Decode an in-memory WAV payload (same formats as load_wav)."""
    import io
    rate, samples = wavfile.read(io.BytesIO(data))
    return _decode_wav(rate, samples)


def _decode_wav(rate: int, data: np.ndarray) -> AudioClip:
    if data.ndim == 2:
        data = data.mean(axis=1)
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.int32:
        samples = data.astype(np.float64) / 2147483648.0
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise ValueError(f"unsupported WAV sample format: {data.dtype}")
    return AudioClip(samples, int(rate))


def save_wav(path: str | Path, clip: AudioClip) -> None:
    """Write a clip as mono 16-bit PCM."""
    pcm = np.clip(np.round(clip.samples * 32767.0), -32768, 32767).astype(np.int16)
    wavfile.write(str(path), clip.sample_rate, pcm)


def resample(clip: AudioClip, target_rate: int) -> AudioClip:
    """Polyphase resampling to target_rate; duration preserved within one sample."""
    if target_rate <= 0:
        raise ValueError(f"target_rate must be positive, got {target_rate}")
    if target_rate == clip.sample_rate:
        return clip
    ratio = Fraction(target_rate, clip.sample_rate)
    out = resample_poly(clip.samples, ratio.numerator, ratio.denominator)
    n_target = int(round(len(clip.samples) * target_rate / clip.sample_rate))
    if len(out) > n_target:
        out = out[:n_target]
    elif len(out) < n_target:
        out = np.pad(out, (0, n_target - len(out)))
    return AudioClip(out, target_rate)


def pitch_shift(clip: AudioClip, semitones: int) -> tuple[AudioClip, float]:
    """Resampling-based pitch shift (no time stretch).

    Frequencies are multiplied by 2**(semitones/12) and the duration by
    time_scale = 2**(-semitones/12). Event times on the original clip must be
    rescaled by the returned time_scale.
    """
    if abs(semitones) > 12:
        raise ValueError(f"|semitones| must be <= 12, got {semitones}")
    if semitones == 0:
        return clip, 1.0
    time_scale = 2.0 ** (-semitones / 12.0)
    # Rational approximation of the irrational resampling ratio.
    ratio = Fraction(time_scale).limit_denominator(1000)
    out = resample_poly(clip.samples, ratio.numerator, ratio.denominator)
    return AudioClip(out, clip.sample_rate), time_scale
