"""Core DSP: log-Mel spectrograms, onset detection functions, peak picking,
and cross-correlation alignment.

All functions are pure; spectrogram framing is centered so that a clip of
``n`` samples yields ``1 + n // HOP`` frames on a 10 ms frame clock.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy import signal as sps

from strumkit.audio import AudioClip

SAMPLE_RATE = 16000
WINDOW = 2048
HOP = 160
N_MELS = 229
FMIN = 30.0
LOG_EPS = 1e-10
FRAME_HOP_S = HOP / SAMPLE_RATE


@dataclass(frozen=True)
class MelSpectrogram:
    """Log-magnitude Mel spectrogram: frames is T x 229."""

    frames: np.ndarray
    frame_hop_s: float = FRAME_HOP_S
    min_freq: float = FMIN

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim != 2 or frames.shape[1] != N_MELS:
            raise ValueError(f"expected T x {N_MELS} frames, got {frames.shape}")
        if not np.all(np.isfinite(frames)):
            raise ValueError("spectrogram contains non-finite values")
        object.__setattr__(self, "frames", frames)

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]


@dataclass(frozen=True)
class OnsetCurve:
    """Non-negative frame-wise novelty values on the spectrogram frame clock."""

    values: np.ndarray
    frame_hop_s: float = FRAME_HOP_S

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError("onset curve must be 1-D")
        if np.any(values < 0):
            raise ValueError("onset curve values must be non-negative")
        object.__setattr__(self, "values", values)


def hz_to_mel(f):
    """HTK mel scale."""
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_mels: int = N_MELS, n_fft: int = WINDOW,
                   sample_rate: int = SAMPLE_RATE, fmin: float = FMIN,
                   fmax: float | None = None) -> np.ndarray:
    """Triangular HTK-mel filterbank, shape (n_mels, n_fft // 2 + 1)."""
    if fmax is None:
        fmax = sample_rate / 2
    edges_hz = mel_to_hz(np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_mels + 2))
    fft_freqs = np.fft.rfftfreq(n_fft, d=1.0 / sample_rate)
    fb = np.zeros((n_mels, len(fft_freqs)))
    for i in range(n_mels):
        lo, center, hi = edges_hz[i], edges_hz[i + 1], edges_hz[i + 2]
        up = (fft_freqs - lo) / (center - lo)
        down = (hi - fft_freqs) / (hi - center)
        fb[i] = np.maximum(0.0, np.minimum(up, down))
    return fb


def mel_bin_centers(n_mels: int = N_MELS, sample_rate: int = SAMPLE_RATE,
                    fmin: float = FMIN, fmax: float | None = None) -> np.ndarray:
    if fmax is None:
        fmax = sample_rate / 2
    edges_hz = mel_to_hz(np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_mels + 2))
    return edges_hz[1:-1]


def stft(samples: np.ndarray, window: int = WINDOW, hop: int = HOP) -> np.ndarray:
    """Centered complex STFT, shape (T, window // 2 + 1) with T = 1 + n // hop."""
    n = len(samples)
    if n < 1:
        raise ValueError("empty input")
    pad = window // 2
    padded = np.pad(samples, (pad, pad))
    n_frames = 1 + n // hop
    idx = np.arange(window)[None, :] + hop * np.arange(n_frames)[:, None]
    frames = padded[idx]
    win = np.hanning(window)
    return np.fft.rfft(frames * win, axis=1)


def log_mel(clip: AudioClip) -> MelSpectrogram:
    """Log-compressed Mel spectrogram (window 2048, hop 160, 229 bins, fmin 30 Hz)."""
    if clip.sample_rate != SAMPLE_RATE:
        raise ValueError(f"expected {SAMPLE_RATE} Hz audio, got {clip.sample_rate}")
    if len(clip) < 1:
        raise ValueError("empty clip")
    mag = np.abs(stft(clip.samples))
    mel = mag @ mel_filterbank().T
    return MelSpectrogram(np.log(mel + LOG_EPS))


def spectral_flux(spec: MelSpectrogram) -> OnsetCurve:
    """Half-wave-rectified first difference summed over bins; frame 0 is zero."""
    if spec.n_frames < 2:
        raise ValueError("need at least 2 frames")
    diff = np.diff(spec.frames, axis=0)
    values = np.concatenate([[0.0], np.maximum(diff, 0.0).sum(axis=1)])
    return OnsetCurve(values, spec.frame_hop_s)


def superflux(spec: MelSpectrogram, max_width: int = 3, lag: int = 1) -> OnsetCurve:
    """Spectral flux against a frequency max-filtered reference frame.

    The max filter (width 3 bins) widens the reference spectrum so that small
    pitch wobbles (vibrato) do not register as positive flux.
    """
    if spec.n_frames < lag + 1:
        raise ValueError("need at least lag + 1 frames")
    ref = ndimage.maximum_filter(spec.frames, size=(1, max_width), mode="nearest")
    diff = spec.frames[lag:] - ref[:-lag]
    values = np.concatenate([np.zeros(lag), np.maximum(diff, 0.0).sum(axis=1)])
    return OnsetCurve(values, spec.frame_hop_s)


def complex_domain_odf(clip: AudioClip) -> OnsetCurve:
    """Complex-domain onset detection function.

    Each frame's target spectrum keeps the previous magnitude and linearly
    extrapolates the phase; the curve is the summed magnitude of the deviation
    between observed and predicted complex bins. Steady sinusoids predict
    almost perfectly, transients do not.
    """
    if clip.sample_rate != SAMPLE_RATE:
        raise ValueError(f"expected {SAMPLE_RATE} Hz audio, got {clip.sample_rate}")
    spec = stft(clip.samples)
    n_frames = spec.shape[0]
    values = np.zeros(n_frames)
    if n_frames >= 3:
        mag = np.abs(spec)
        phase = np.angle(spec)
        predicted = mag[1:-1] * np.exp(1j * (2.0 * phase[1:-1] - phase[:-2]))
        values[2:] = np.abs(spec[2:] - predicted).sum(axis=1)
    return OnsetCurve(values, FRAME_HOP_S)


def pick_peaks(curve: OnsetCurve, threshold: float, min_gap_s: float,
               mean_window_s: float = 0.5) -> list[float]:
    """Times of strict local maxima above an adaptive threshold.

    The threshold at each frame is the local mean over +/- mean_window_s plus
    the fixed offset. Peaks closer than min_gap_s are suppressed, larger
    values winning.
    """
    if threshold < 0 or min_gap_s < 0:
        raise ValueError("threshold and min_gap_s must be non-negative")
    v = curve.values
    if len(v) < 3:
        return []
    half = max(1, int(round(mean_window_s / curve.frame_hop_s)))
    kernel = np.ones(2 * half + 1)
    local_mean = np.convolve(v, kernel, mode="same") / np.convolve(
        np.ones_like(v), kernel, mode="same")
    is_peak = (v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])
    candidates = np.flatnonzero(is_peak) + 1
    candidates = candidates[v[candidates] > local_mean[candidates] + threshold]
    # greedy suppression, strongest first
    kept: list[int] = []
    for idx in sorted(candidates, key=lambda i: (-v[i], i)):
        if all(abs(idx - j) * curve.frame_hop_s >= min_gap_s for j in kept):
            kept.append(idx)
    return [i * curve.frame_hop_s for i in sorted(kept)]


def cross_correlate_lag(a: AudioClip, b: AudioClip,
                        max_lag_s: float) -> tuple[float, float]:
    """Lag of b relative to a maximizing normalized cross-correlation.

    Positive lag means b is delayed. Confidence is the peak correlation
    coefficient in [0, 1]; values below ~0.2 indicate unrelated signals.
    """
    if a.sample_rate != b.sample_rate:
        raise ValueError("sample rates must match")
    if len(a) == 0 or len(b) == 0:
        raise ValueError("both clips must be non-empty")
    x = a.samples - a.samples.mean()
    y = b.samples - b.samples.mean()
    corr = sps.correlate(y, x, mode="full", method="fft")
    lags = np.arange(-(len(x) - 1), len(y))
    norm = np.sqrt((x ** 2).sum() * (y ** 2).sum())
    if norm == 0:
        return 0.0, 0.0
    corr = corr / norm
    max_lag = int(round(max_lag_s * a.sample_rate))
    mask = np.abs(lags) <= max_lag
    corr, lags = corr[mask], lags[mask]
    best = int(np.argmax(corr))
    return lags[best] / a.sample_rate, float(np.clip(corr[best], 0.0, 1.0))
