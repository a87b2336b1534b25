"""Hand-motion model: stroke simulator, derivative-sign direction classifier,
and motion-to-audio offset estimation.

Clock conventions: a trace's samples live on their own clock (sample ``k`` at
``k / sample_rate`` seconds). ``t0_s`` records the audio time at which the
trace starts; an unsynchronized session does not know it, which is exactly
what ``estimate_motion_offset`` recovers (it returns approximately ``-t0_s``,
the correction to add to an audio time to look up the trace).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from strumkit.dsp import OnsetCurve
from strumkit.events import Direction, StrumEvent

G0 = 9.81  # m/s^2 per g-unit


class StrokeDirection(str, Enum):
    DOWN = "down"
    UP = "up"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class MotionTrace:
    """2-axis acceleration in g-units at a uniform rate."""

    sample_rate: float
    a_x: np.ndarray
    a_y: np.ndarray
    t0_s: float = 0.0

    def __post_init__(self):
        a_x = np.asarray(self.a_x, dtype=np.float64)
        a_y = np.asarray(self.a_y, dtype=np.float64)
        if a_x.shape != a_y.shape or a_x.ndim != 1:
            raise ValueError("axes must be equal-length 1-D arrays")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if not (np.all(np.isfinite(a_x)) and np.all(np.isfinite(a_y))):
            raise ValueError("acceleration values must be finite")
        object.__setattr__(self, "a_x", a_x)
        object.__setattr__(self, "a_y", a_y)

    @property
    def duration_s(self) -> float:
        return len(self.a_y) / self.sample_rate

    def __len__(self) -> int:
        return len(self.a_y)


@dataclass(frozen=True)
class StrokeMotionParams:
    """Parameters of the semicircular hand-motion model.

    The hand swings around the elbow; gravity projects onto the sensor axes
    through the swing angle, strokes add tangential (x) and centripetal (y)
    components. ``sign_flip_y`` records the axis-polarity ambiguity of real
    hardware: the default polarity makes an up stroke produce a positive
    a_y derivative at the stroke center.

    The default radius is small so the centripetal term (which carries no
    direction information, being the same bump for both stroke directions)
    stays well below the gravity modulation that the derivative-sign
    classifier relies on.
    """

    gravity_g: float = 1.0
    sweep_angle_rad: float = math.radians(60.0)
    stroke_duration_s: float = 0.12
    arm_radius_m: float = 0.04
    s_x: int = -1
    s_y: int = 1
    noise_sigma_g: float = 0.0
    sign_flip_y: bool = False

    def __post_init__(self):
        if not 0 < self.sweep_angle_rad <= math.pi / 2:
            raise ValueError("sweep angle must be in (0, pi/2]")
        if self.s_x not in (-1, 1) or self.s_y not in (-1, 1):
            raise ValueError("orientation signs must be +/-1")


def compose_acceleration(phi: np.ndarray, rate: float,
                         params: StrokeMotionParams) -> tuple[np.ndarray, np.ndarray]:
    """Map a swing-angle timeline to (a_x, a_y) in g-units.

    a_x combines tangential acceleration with the gravity projection cos(phi);
    a_y combines centripetal acceleration with sin(phi). Orientation signs
    are applied afterwards.
    """
    omega = np.gradient(phi) * rate
    alpha = np.gradient(omega) * rate
    a_tangential = params.arm_radius_m * alpha / G0
    a_centripetal = params.arm_radius_m * omega ** 2 / G0
    a_x = params.s_x * (a_tangential + params.gravity_g * np.cos(phi))
    a_y = params.s_y * (a_centripetal + params.gravity_g * np.sin(phi))
    if params.sign_flip_y:
        a_y = -a_y
    return a_x, a_y


def _stroke_profile(u: np.ndarray) -> np.ndarray:
    """Raised-cosine sweep from -1 to +1 over u in [0, 1]."""
    return -np.cos(np.pi * np.clip(u, 0.0, 1.0))


def simulate_motion(events: list[StrumEvent], params: StrokeMotionParams,
                    rate: float, duration_s: float,
                    rng: np.random.Generator | None = None,
                    t0_s: float = 0.0) -> MotionTrace:
    """Synthesize a motion trace for a list of strum events.

    Each down stroke sweeps the angle from +sweep to -sweep (top to bottom),
    each up stroke the reverse, on a raised-cosine profile centered on the
    event time. Between strokes the angle eases back to the next stroke's
    start position. Gaussian noise with ``noise_sigma_g`` is added per axis.
    """
    if rate < 50:
        raise ValueError(f"rate must be >= 50 Hz, got {rate}")
    times = [e.time_s for e in events]
    if times != sorted(times):
        raise ValueError("events must be sorted by time")
    if events and not (t0_s <= times[0] and times[-1] <= t0_s + duration_s):
        raise ValueError("events must fall within the trace span")

    n = int(round(duration_s * rate))
    t = t0_s + np.arange(n) / rate
    amp = params.sweep_angle_rad

    # per-stroke angle endpoints: down sweeps +amp -> -amp, up sweeps -amp -> +amp
    starts = [amp if e.direction is Direction.DOWN else -amp for e in events]
    ends = [-s for s in starts]

    phi = np.full(n, starts[0] if events else 0.0)
    prev_end_t = t0_s
    prev_end_phi = starts[0] if events else 0.0
    for i, e in enumerate(events):
        half = params.stroke_duration_s / 2
        w0, w1 = e.time_s - half, e.time_s + half
        # ease from the previous stroke's end to this stroke's start
        gap = (t >= prev_end_t) & (t < w0)
        if gap.any() and w0 > prev_end_t:
            u = (t[gap] - prev_end_t) / (w0 - prev_end_t)
            phi[gap] = prev_end_phi + (starts[i] - prev_end_phi) * (1 - np.cos(np.pi * u)) / 2
        stroke = (t >= w0) & (t <= w1)
        u = (t[stroke] - w0) / (w1 - w0)
        phi[stroke] = starts[i] + (ends[i] - starts[i]) * (_stroke_profile(u) + 1) / 2
        after = t > w1
        phi[after] = ends[i]
        prev_end_t, prev_end_phi = w1, ends[i]

    a_x, a_y = compose_acceleration(phi, rate, params)
    if params.noise_sigma_g > 0:
        if rng is None:
            rng = np.random.default_rng()
        a_x = a_x + rng.normal(0.0, params.noise_sigma_g, n)
        a_y = a_y + rng.normal(0.0, params.noise_sigma_g, n)
    return MotionTrace(rate, a_x, a_y, t0_s=t0_s)


def differentiate_smoothed(trace: MotionTrace, smooth_window_s: float = 0.03) -> np.ndarray:
    """Moving-average smoothing of a_y followed by a central first difference.

    Returns the derivative in g/s, same length as the trace.
    """
    if len(trace) == 0:
        raise ValueError("empty trace")
    if smooth_window_s < 0:
        raise ValueError("smoothing window must be >= 0")
    a_y = trace.a_y
    win = int(round(smooth_window_s * trace.sample_rate))
    if win > 1:
        kernel = np.ones(win) / win
        pad = np.pad(a_y, (win // 2, win - 1 - win // 2), mode="edge")
        a_y = np.convolve(pad, kernel, mode="valid")
    return np.gradient(a_y) * trace.sample_rate


DIRECTION_DEAD_ZONE_G_PER_S = 0.1


def classify_direction(trace: MotionTrace, onset_time_s: float, offset_s: float = 0.0,
                       smooth_window_s: float = 0.03,
                       dead_zone: float = DIRECTION_DEAD_ZONE_G_PER_S) -> StrokeDirection:
    """Direction from the sign of the smoothed a_y derivative at onset + offset.

    Positive derivative means up stroke, negative means down; magnitudes below
    the dead zone are Unknown rather than guessed from noise.
    """
    t = onset_time_s + offset_s
    idx = int(round(t * trace.sample_rate))
    if not 0 <= idx < len(trace):
        raise ValueError(f"time {t:.3f}s outside trace span")
    deriv = differentiate_smoothed(trace, smooth_window_s)[idx]
    if deriv > dead_zone:
        return StrokeDirection.UP
    if deriv < -dead_zone:
        return StrokeDirection.DOWN
    return StrokeDirection.UNKNOWN


def estimate_motion_offset(odf: OnsetCurve, trace: MotionTrace,
                           max_lag_s: float = 2.0) -> tuple[float, float]:
    """Offset aligning the motion trace to the audio's onset curve.

    Correlates the ODF with |smoothed a_y derivative| resampled to the ODF
    frame clock over +/- max_lag_s. The returned offset is the value to add
    to an audio time when looking up the trace (compare ``t0_s``); scores
    below ~0.2 mean the alignment is unreliable.
    """
    if len(odf.values) == 0 or len(trace) == 0:
        raise ValueError("both inputs must be non-empty")
    deriv = np.abs(differentiate_smoothed(trace))
    n_frames = len(odf.values)
    frame_times = np.arange(n_frames) * odf.frame_hop_s
    trace_times = np.arange(len(trace)) / trace.sample_rate

    x = odf.values - odf.values.mean()
    max_shift = int(round(max_lag_s / odf.frame_hop_s))
    best_offset, best_score = 0.0, -np.inf
    for shift in range(-max_shift, max_shift + 1):
        offset = shift * odf.frame_hop_s
        y = np.interp(frame_times + offset, trace_times, deriv, left=0.0, right=0.0)
        y = y - y.mean()
        norm = np.sqrt((x ** 2).sum() * (y ** 2).sum())
        score = (x @ y) / norm if norm > 0 else 0.0
        if score > best_score:
            best_offset, best_score = offset, score
    return best_offset, float(np.clip(best_score, 0.0, 1.0))


MOTION_CSV_HEADER = ["t_s", "a_x_g", "a_y_g"]


def motion_from_csv(text: str, target_rate: float | None = None) -> MotionTrace:
    """Parse a motion CSV (header t_s,a_x_g,a_y_g) into a uniform-rate trace.

    Irregular timestamps are resampled by linear interpolation; the default
    target rate is the median sampling rate of the file, floored at 50 Hz.
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != MOTION_CSV_HEADER:
        raise ValueError(f"unexpected motion CSV header: {header}")
    rows = [(float(r[0]), float(r[1]), float(r[2])) for r in reader if r]
    if len(rows) < 2:
        raise ValueError("motion CSV needs at least 2 samples")
    t = np.array([r[0] for r in rows])
    if np.any(np.diff(t) <= 0):
        raise ValueError("timestamps must be strictly increasing")
    if target_rate is None:
        target_rate = max(50.0, 1.0 / float(np.median(np.diff(t))))
    if target_rate < 50:
        raise ValueError("rate must be >= 50 Hz")
    uniform_t = np.arange(t[0], t[-1], 1.0 / target_rate)
    a_x = np.interp(uniform_t, t, [r[1] for r in rows])
    a_y = np.interp(uniform_t, t, [r[2] for r in rows])
    return MotionTrace(target_rate, a_x, a_y, t0_s=float(t[0]))


def load_motion_csv(path: str | Path, target_rate: float | None = None) -> MotionTrace:
    return motion_from_csv(Path(path).read_text(), target_rate)
