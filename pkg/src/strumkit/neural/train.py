"""Training loop, checkpointing, and a finite-difference gradient oracle."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable

import numpy as np
import torch

from strumkit import dsp
from strumkit.audio import AudioClip, pitch_shift
from strumkit.events import StrumEvent
from strumkit.neural.config import NetworkConfig, TargetSpec, TrainConfig
from strumkit.neural.features import ClipExample, clip_example
from strumkit.neural.model import StrumTranscriber, joint_loss

CHECKPOINT_FORMAT_VERSION = 1


@dataclass(frozen=True)
class Recording:
    """A labeled training recording at the analysis sample rate."""

    audio: AudioClip
    events: tuple[StrumEvent, ...]

    def __post_init__(self):
        if self.audio.sample_rate != dsp.SAMPLE_RATE:
            raise ValueError(f"expected {dsp.SAMPLE_RATE} Hz audio")
        object.__setattr__(self, "events", tuple(self.events))


def _shifted_recording(rec: Recording, semitones: int) -> Recording:
    """Pitch-shift a recording and keep its labels consistent.

    Event times scale with the resampled duration and chords transpose by the
    same number of semitones.
    """
    if semitones == 0:
        return rec
    audio, time_scale = pitch_shift(rec.audio, semitones)
    events = tuple(
        StrumEvent(e.time_s * time_scale, e.direction,
                   e.chord.transposed(semitones))
        for e in rec.events)
    return Recording(audio, events)


def _sample_clip(rec: Recording, rng: np.random.Generator,
                 spec: TargetSpec, cfg: TrainConfig) -> ClipExample:
    shift = int(rng.integers(-cfg.max_pitch_shift, cfg.max_pitch_shift + 1))
    shifted = _shifted_recording(rec, shift)
    n_starts = max(1, 1 + math.floor(
        (shifted.audio.duration_s - spec.clip_length_s) / cfg.clip_hop_s + 1e-9))
    start_s = cfg.clip_hop_s * int(rng.integers(n_starts))
    return clip_example(shifted.audio, list(shifted.events), start_s, spec)


def train(recordings: list[Recording], net_cfg: NetworkConfig,
          spec: TargetSpec, cfg: TrainConfig,
          log: Callable[[str], None] | None = None
          ) -> tuple[StrumTranscriber, list[dict]]:
    """Train a transcriber on randomly sampled, pitch-shift augmented clips.

    Each step draws batch_size (recording, shift, clip start) triples, builds
    their targets, and takes one AdamW step on the summed cross-entropy loss.
    Fully deterministic for a fixed seed. Returns the model and a history of
    per-step loss records.
    """
    if not recordings:
        raise ValueError("need at least one recording")
    torch.manual_seed(cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    model = StrumTranscriber(net_cfg)
    opt = torch.optim.AdamW(model.parameters(), lr=cfg.learning_rate)

    history: list[dict] = []
    model.train()
    for step in range(cfg.steps):
        clips = []
        for _ in range(cfg.batch_size):
            rec = recordings[int(rng.integers(len(recordings)))]
            clips.append(_sample_clip(rec, rng, spec, cfg))
        mel = torch.tensor(np.stack([c.mel for c in clips]), dtype=torch.float32)
        g_action = torch.tensor(np.stack([c.g_action for c in clips]),
                                dtype=torch.float32)
        g_chord = torch.tensor(np.stack([c.g_chord for c in clips]),
                               dtype=torch.float32)

        opt.zero_grad()
        r_action, p_chord = model(mel)
        total, l_action, l_chord = joint_loss(r_action, p_chord, g_action, g_chord)
        total.backward()
        opt.step()

        record = {"step": step, "loss": float(total.detach()),
                  "l_action": float(l_action.detach()),
                  "l_chord": float(l_chord.detach())}
        history.append(record)
        if log is not None and (step % cfg.log_every == 0 or step == cfg.steps - 1):
            log(f"step {step} loss {record['loss']:.3f} "
                f"action {record['l_action']:.3f} chord {record['l_chord']:.3f}")
    model.eval()
    return model, history


def gradient_check(model: StrumTranscriber, example: ClipExample,
                   fd_step: float = 1e-5) -> float:
    """Compare backpropagated gradients against central finite differences.

    Perturbs every parameter element by +/- fd_step in float64 and returns
    the maximum disagreement |g_bp - g_fd| / (|g_bp| + |g_fd| + 1e-3) over
    all parameters. The absolute floor in the denominator keeps roundoff
    noise on near-zero gradients from dominating the score.
    """
    model = model.double().eval()
    mel = torch.tensor(example.mel, dtype=torch.float64).unsqueeze(0)
    g_action = torch.tensor(example.g_action, dtype=torch.float64).unsqueeze(0)
    g_chord = torch.tensor(example.g_chord, dtype=torch.float64).unsqueeze(0)

    def loss_value() -> float:
        with torch.no_grad():
            r, p = model(mel)
            total, _, _ = joint_loss(r, p, g_action, g_chord)
        return float(total)

    model.zero_grad()
    r, p = model(mel)
    total, _, _ = joint_loss(r, p, g_action, g_chord)
    total.backward()

    worst = 0.0
    for param in model.parameters():
        grad = param.grad
        analytic = (torch.zeros_like(param) if grad is None else grad).reshape(-1)
        flat = param.data.reshape(-1)
        for i in range(flat.numel()):
            orig = float(flat[i])
            flat[i] = orig + fd_step
            up = loss_value()
            flat[i] = orig - fd_step
            down = loss_value()
            flat[i] = orig
            fd = (up - down) / (2.0 * fd_step)
            bp = float(analytic[i])
            rel = abs(bp - fd) / (abs(bp) + abs(fd) + 1e-3)
            worst = max(worst, rel)
    return worst


def save_checkpoint(path: str | Path, model: StrumTranscriber,
                    spec: TargetSpec) -> None:
    torch.save({
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "network_config": asdict(model.cfg),
        "target_spec": asdict(spec),
        "state_dict": model.state_dict(),
    }, str(path))


def load_checkpoint(path: str | Path) -> tuple[StrumTranscriber, TargetSpec]:
    payload = torch.load(str(path), map_location="cpu", weights_only=False)
    if payload.get("format_version") != CHECKPOINT_FORMAT_VERSION:
        raise ValueError(f"unsupported checkpoint version: "
                         f"{payload.get('format_version')}")
    net_kwargs = dict(payload["network_config"])
    net_kwargs["conv_channels"] = tuple(net_kwargs["conv_channels"])
    model = StrumTranscriber(NetworkConfig(**net_kwargs))
    model.load_state_dict(payload["state_dict"])
    model.eval()
    spec = TargetSpec(**payload["target_spec"])
    return model, spec
