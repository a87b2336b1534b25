"""Audio augmentation chain: distortion, filtering, compression, reverb,
background noise at a target SNR, sparse percussive bursts, and a limiter.

Every random draw is recorded in the returned parameter record so a dataset
entry can be reproduced or inspected later. Noise assets are pluggable; by
default procedural white/pink/crackle generators stand in for ambient
recordings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import butter, fftconvolve, sosfilt

from strumkit.audio import AudioClip


@dataclass(frozen=True)
class AugmentConfig:
    distortion: bool = True
    drive_range: tuple[float, float] = (0.5, 3.0)
    highpass: bool = True
    highpass_range_hz: tuple[float, float] = (40.0, 200.0)
    lowpass: bool = True
    lowpass_range_hz: tuple[float, float] = (3000.0, 8000.0)
    compressor: bool = True
    comp_threshold_range_dbfs: tuple[float, float] = (-30.0, -10.0)
    comp_ratio_range: tuple[float, float] = (2.0, 6.0)
    reverb: bool = True
    reverb_decay_range_s: tuple[float, float] = (0.2, 0.8)
    reverb_wet_range: tuple[float, float] = (0.0, 0.5)
    noise: bool = True
    snr_range_db: tuple[float, float] = (5.0, 30.0)
    bursts: bool = True
    burst_rate_per_s: float = 0.2
    limiter_peak: float = 1.0

    @classmethod
    def bypass(cls) -> "AugmentConfig":
        """Identity chain (used to verify the pipeline adds nothing on its own)."""
        return cls(distortion=False, highpass=False, lowpass=False,
                   compressor=False, reverb=False, noise=False, bursts=False)


def _soft_clip(x: np.ndarray, drive: float) -> np.ndarray:
    # normalized so drive -> 0 approaches the identity
    return np.tanh(drive * x) / np.tanh(drive) if drive > 1e-6 else x


def _compress(x: np.ndarray, rate: int, threshold_dbfs: float,
              ratio: float) -> np.ndarray:
    """Feedforward compressor on a 10 ms RMS envelope."""
    win = max(1, int(0.010 * rate))
    kernel = np.ones(win) / win
    env = np.sqrt(np.convolve(x ** 2, kernel, mode="same") + 1e-12)
    env_db = 20.0 * np.log10(env)
    over = np.maximum(env_db - threshold_dbfs, 0.0)
    gain_db = -over * (1.0 - 1.0 / ratio)
    return x * 10.0 ** (gain_db / 20.0)


def _exp_decay_impulse(rng: np.random.Generator, rate: int, decay_s: float) -> np.ndarray:
    n = int(decay_s * rate)
    t = np.arange(n) / rate
    ir = rng.standard_normal(n) * np.exp(-3.0 * t / decay_s)
    ir[0] = 1.0
    return ir / np.sqrt((ir ** 2).sum())


def _pink_noise(rng: np.random.Generator, n: int) -> np.ndarray:
    spectrum = rng.standard_normal(n // 2 + 1) + 1j * rng.standard_normal(n // 2 + 1)
    freqs = np.arange(n // 2 + 1, dtype=float)
    freqs[0] = 1.0
    noise = np.fft.irfft(spectrum / np.sqrt(freqs), n)
    return noise / (np.abs(noise).max() + 1e-12)


def _crackle(rng: np.random.Generator, n: int, rate: int) -> np.ndarray:
    noise = np.zeros(n)
    n_pops = max(1, int(n / rate * 20))
    for _ in range(n_pops):
        pos = rng.integers(n)
        width = int(rng.uniform(0.001, 0.005) * rate)
        end = min(pos + width, n)
        noise[pos:end] += rng.uniform(0.2, 1.0) * rng.standard_normal(end - pos)
    return noise / (np.abs(noise).max() + 1e-12)


def _draw_noise(rng: np.random.Generator, n: int, rate: int,
                assets: list[AudioClip] | None) -> tuple[np.ndarray, str]:
    if assets:
        clip = assets[rng.integers(len(assets))]
        kind = "asset"
        src = clip.samples
        if len(src) >= n:
            start = rng.integers(len(src) - n + 1)
            return src[start:start + n], kind
        reps = int(np.ceil(n / len(src)))
        return np.tile(src, reps)[:n], kind
    kind = ["white", "pink", "crackle"][rng.integers(3)]
    if kind == "white":
        return rng.standard_normal(n), kind
    if kind == "pink":
        return _pink_noise(rng, n), kind
    return _crackle(rng, n, rate), kind


def _mix_at_snr(x: np.ndarray, noise: np.ndarray, snr_db: float) -> np.ndarray:
    p_signal = (x ** 2).mean()
    p_noise = (noise ** 2).mean()
    if p_noise < 1e-20 or p_signal < 1e-20:
        return x
    scale = np.sqrt(p_signal / (p_noise * 10.0 ** (snr_db / 10.0)))
    return x + scale * noise


def augment_audio(clip: AudioClip, rng: np.random.Generator,
                  assets: list[AudioClip] | None = None,
                  cfg: AugmentConfig | None = None) -> tuple[AudioClip, dict]:
    """Run the ordered augmentation chain; returns (audio, parameter record)."""
    if len(clip) == 0:
        raise ValueError("empty clip")
    cfg = cfg or AugmentConfig()
    rate = clip.sample_rate
    x = clip.samples.copy()
    record: dict = {}

    if cfg.distortion:
        drive = float(rng.uniform(*cfg.drive_range))
        record["distortion_drive"] = drive
        x = _soft_clip(x, drive)
    if cfg.highpass:
        cutoff = float(rng.uniform(*cfg.highpass_range_hz))
        record["highpass_hz"] = cutoff
        x = sosfilt(butter(2, cutoff, "highpass", fs=rate, output="sos"), x)
    if cfg.lowpass:
        cutoff = float(rng.uniform(*cfg.lowpass_range_hz))
        record["lowpass_hz"] = cutoff
        x = sosfilt(butter(2, cutoff, "lowpass", fs=rate, output="sos"), x)
    if cfg.compressor:
        threshold = float(rng.uniform(*cfg.comp_threshold_range_dbfs))
        ratio = float(rng.uniform(*cfg.comp_ratio_range))
        record["comp_threshold_dbfs"] = threshold
        record["comp_ratio"] = ratio
        x = _compress(x, rate, threshold, ratio)
    if cfg.reverb:
        decay = float(rng.uniform(*cfg.reverb_decay_range_s))
        wet = float(rng.uniform(*cfg.reverb_wet_range))
        record["reverb_decay_s"] = decay
        record["reverb_wet"] = wet
        if wet > 0:
            ir = _exp_decay_impulse(rng, rate, decay)
            x = (1.0 - wet) * x + wet * fftconvolve(x, ir)[:len(x)]
    if cfg.noise:
        snr = float(rng.uniform(*cfg.snr_range_db))
        noise, kind = _draw_noise(rng, len(x), rate, assets)
        record["noise_snr_db"] = snr
        record["noise_kind"] = kind
        x = _mix_at_snr(x, noise, snr)
    if cfg.bursts:
        duration = len(x) / rate
        n_bursts = int(rng.poisson(cfg.burst_rate_per_s * duration))
        record["n_bursts"] = n_bursts
        for _ in range(n_bursts):
            pos = int(rng.uniform(0, len(x)))
            width = int(rng.uniform(0.02, 0.05) * rate)
            end = min(pos + width, len(x))
            t = np.arange(end - pos) / rate
            burst = rng.standard_normal(end - pos) * np.exp(-t * 80.0)
            sos = butter(2, (1000.0, 6000.0), "bandpass", fs=rate, output="sos")
            x[pos:end] += 0.1 * sosfilt(sos, burst)

    peak = np.max(np.abs(x))
    if peak > cfg.limiter_peak:
        x = x * (cfg.limiter_peak / peak)
        record["limited"] = True
    return AudioClip(x, rate), record
