"""Plucked-string rendering of tablatures.

Each sounding string is a Karplus-Strong voice: a short noise burst fed into
a recirculating delay line with a two-tap averaging damper, realized as a
single IIR filter so the whole pluck renders in one lfilter call. Strums
sweep the strings with small per-string delays; the labeled event time is the
first string's excitation, so the renderer is latency-free by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from strumkit.audio import AudioClip
from strumkit.events import Direction, StrumEvent
from strumkit.synthesis.tablature import Tablature

RENDER_SAMPLE_RATE = 44100


def midi_to_hz(midi: float) -> float:
    return 440.0 * 2.0 ** ((midi - 69) / 12.0)


def karplus_strong(freq_hz: float, n_samples: int, rng: np.random.Generator,
                   sample_rate: int = RENDER_SAMPLE_RATE,
                   damping: float = 0.995) -> np.ndarray:
    """One pluck at freq_hz.

    The averaging loop y[n] = x[n] + damping * (y[n-N] + y[n-N-1]) / 2 has an
    effective delay of N + 0.5 samples, so N is chosen to center the
    fundamental on the requested frequency.
    """
    if freq_hz <= 0:
        raise ValueError("frequency must be positive")
    n_delay = max(2, int(round(sample_rate / freq_hz - 0.5)))
    burst = np.zeros(n_samples)
    n_excite = min(n_delay, n_samples)
    burst[:n_excite] = rng.uniform(-1.0, 1.0, n_excite)
    a = np.zeros(n_delay + 2)
    a[0] = 1.0
    a[n_delay] = -0.5 * damping
    a[n_delay + 1] = -0.5 * damping
    return lfilter([1.0], a, burst)


@dataclass(frozen=True)
class RenderConfig:
    sample_rate: int = RENDER_SAMPLE_RATE
    strum_delay_range_s: tuple[float, float] = (0.004, 0.012)
    amp_jitter_db: float = 3.0
    tail_s: float = 1.5
    ring_s: float = 2.5
    damping: float = 0.995
    peak_dbfs: float = -1.0


def render_tablature(tab: Tablature, rng: np.random.Generator,
                     cfg: RenderConfig | None = None) -> tuple[AudioClip, list[StrumEvent]]:
    """Render a tablature at 44.1 kHz and return it with its labeled events.

    Down strokes excite the sounding strings in ascending pitch order, up
    strokes descending, with a per-adjacent-string delay drawn uniformly from
    the configured range. Event times equal the symbolic slot times exactly.
    """
    cfg = cfg or RenderConfig()
    rate = cfg.sample_rate
    period = tab.slot_period_s
    strokes = tab.pattern.stroke_slots

    total_s = tab.duration_s + cfg.tail_s
    n_total = int(round(total_s * rate))
    out = np.zeros(n_total)

    events: list[StrumEvent] = []
    flag_idx = 0
    for m, (chord, fingering) in enumerate(tab.measures):
        for slot, direction in strokes:
            t_event = (m * 16 + slot) * period
            strings = fingering.sounding_midi()
            strings.sort(key=lambda sm: sm[1])  # ascending pitch
            if direction is Direction.UP:
                strings = strings[::-1]
            if tab.drop_last_flags[flag_idx]:
                strings = strings[:-1]
            flag_idx += 1

            amp = 10.0 ** (rng.uniform(-cfg.amp_jitter_db, cfg.amp_jitter_db) / 20.0)
            t_string = t_event
            for _, midi in strings:
                start = int(round(t_string * rate))
                if start >= n_total:
                    break
                n_ring = min(int(round(cfg.ring_s * rate)), n_total - start)
                voice = karplus_strong(midi_to_hz(midi), n_ring, rng,
                                       rate, cfg.damping)
                # fade the tail so the voice ending never clicks
                n_fade = min(int(0.1 * rate), n_ring)
                if n_fade > 1:
                    voice[-n_fade:] *= 0.5 * (1 + np.cos(np.pi * np.arange(n_fade) / n_fade))
                out[start:start + n_ring] += amp * voice
                t_string += rng.uniform(*cfg.strum_delay_range_s)
            events.append(StrumEvent(t_event, direction, chord))

    peak = np.max(np.abs(out))
    if peak > 0:
        out *= 10.0 ** (cfg.peak_dbfs / 20.0) / peak
    return AudioClip(out, rate), events
