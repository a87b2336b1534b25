"""Joint strumming-action regression and chord classification CRNN.

Two parallel branches process the log-Mel input: a conv stack (two 3x3
convolutions per block, frequency-only average pooling) feeding a linear
layer and a biGRU. The action branch emits per-frame down/up regression
values through a logistic head; its outputs are concatenated with the chord
branch's recurrent features, passed through a second biGRU, and projected to
per-frame chord probabilities.
"""

from __future__ import annotations

import torch
import torch.nn as nn

from strumkit.neural.config import NetworkConfig

BCE_EPS = 1e-7


class ConvStack(nn.Module):
    """Conv blocks that halve the frequency axis and never touch time."""

    def __init__(self, channels: tuple[int, ...]):
        super().__init__()
        layers: list[nn.Module] = []
        prev = 1
        for ch in channels:
            layers += [
                nn.Conv2d(prev, ch, 3, padding=1),
                nn.BatchNorm2d(ch),
                nn.ReLU(),
                nn.Conv2d(ch, ch, 3, padding=1),
                nn.BatchNorm2d(ch),
                nn.ReLU(),
                nn.AvgPool2d((1, 2)),
            ]
            prev = ch
        self.stack = nn.Sequential(*layers)

    def forward(self, mel: torch.Tensor) -> torch.Tensor:
        # mel: (B, T, F) -> features (B, T, C * F_out)
        x = self.stack(mel.unsqueeze(1))
        b, c, t, f = x.shape
        return x.permute(0, 2, 1, 3).reshape(b, t, c * f)


class Branch(nn.Module):
    def __init__(self, cfg: NetworkConfig):
        super().__init__()
        self.conv = ConvStack(cfg.conv_channels)
        self.fc = nn.Linear(cfg.conv_channels[-1] * cfg.n_freq_out, cfg.fc_width)
        self.gru = nn.GRU(cfg.fc_width, cfg.gru_units,
                          batch_first=True, bidirectional=True)

    def forward(self, mel: torch.Tensor) -> torch.Tensor:
        x = torch.relu(self.fc(self.conv(mel)))
        out, _ = self.gru(x)
        return out


class StrumTranscriber(nn.Module):
    def __init__(self, cfg: NetworkConfig):
        super().__init__()
        self.cfg = cfg
        self.action_branch = Branch(cfg)
        self.chord_branch = Branch(cfg)
        self.action_head = nn.Linear(2 * cfg.gru_units, 2)
        self.merge_gru = nn.GRU(2 * cfg.gru_units + 2, cfg.merge_gru_units,
                                batch_first=True, bidirectional=True)
        self.chord_head = nn.Linear(2 * cfg.merge_gru_units, 24)

    def forward(self, mel: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        """mel: (B, T, n_mels) -> action (B, T, 2), chord (B, T, 24), both in (0, 1)."""
        if mel.dim() != 3 or mel.shape[-1] != self.cfg.n_mels:
            raise ValueError(f"expected (B, T, {self.cfg.n_mels}) input, got {tuple(mel.shape)}")
        action_features = self.action_branch(mel)
        r_action = torch.sigmoid(self.action_head(action_features))
        chord_features = self.chord_branch(mel)
        merged = torch.cat([chord_features, r_action], dim=-1)
        merged, _ = self.merge_gru(merged)
        p_chord = torch.sigmoid(self.chord_head(merged))
        return r_action, p_chord


def bce_sum(pred: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    pred = pred.clamp(BCE_EPS, 1.0 - BCE_EPS)
    return -(target * torch.log(pred) + (1 - target) * torch.log1p(-pred)).sum()


def joint_loss(r_action: torch.Tensor, p_chord: torch.Tensor,
               g_action: torch.Tensor, g_chord: torch.Tensor
               ) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """Summed binary cross-entropy over frames and classes for both heads.

    Returns (total, action term, chord term); the total is their plain sum.
    """
    if r_action.shape != g_action.shape or p_chord.shape != g_chord.shape:
        raise ValueError("prediction and target shapes must match")
    if not (torch.isfinite(r_action).all() and torch.isfinite(p_chord).all()):
        raise ValueError("non-finite predictions")
    l_action = bce_sum(r_action, g_action)
    l_chord = bce_sum(p_chord, g_chord)
    return l_action + l_chord, l_action, l_chord
