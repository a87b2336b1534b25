"""Configuration records for targets, network shape, and training."""

from __future__ import annotations

from dataclasses import dataclass, field

from strumkit import dsp


@dataclass(frozen=True)
class TargetSpec:
    """Shape of the regression targets.

    J controls the half-width of the triangular onset targets (J frames on
    each side, 50 ms with the defaults); delta_s is the frame hop.
    """

    J: int = 5
    delta_s: float = dsp.FRAME_HOP_S
    K: int = 2  # action classes: down, up
    C: int = 24  # chord classes
    T: int = 1001  # frames per 10 s clip

    def __post_init__(self):
        if self.J < 1 or self.delta_s <= 0:
            raise ValueError("J must be >= 1 and delta_s > 0")
        if self.K != 2 or self.C != 24:
            raise ValueError("K must be 2 and C 24")

    @property
    def clip_length_s(self) -> float:
        return (self.T - 1) * self.delta_s


@dataclass(frozen=True)
class NetworkConfig:
    """CRNN shape: conv blocks with frequency-only pooling, then biGRU heads.

    Each block holds two 3x3 convolutions and halves the frequency axis, so
    229 mel bins become 229 // 2**len(conv_channels) after the stack; the time
    axis is never pooled.
    """

    conv_channels: tuple[int, ...] = (16, 32, 64, 128)
    fc_width: int = 512
    gru_units: int = 256
    merge_gru_units: int = 256
    n_mels: int = dsp.N_MELS

    def __post_init__(self):
        if not self.conv_channels:
            raise ValueError("need at least one conv block")

    @property
    def n_freq_out(self) -> int:
        f = self.n_mels
        for _ in self.conv_channels:
            f //= 2
        return f


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-4
    steps: int = 20000
    batch_size: int = 6
    max_pitch_shift: int = 6
    clip_length_s: float = 10.0
    clip_hop_s: float = 1.0
    seed: int = 0
    log_every: int = 50

    def __post_init__(self):
        if self.learning_rate <= 0 or self.steps <= 0 or self.batch_size <= 0:
            raise ValueError("learning rate, steps and batch size must be positive")
        if self.max_pitch_shift not in (0, 3, 6, 12):
            raise ValueError("max_pitch_shift must be one of 0, 3, 6, 12")
