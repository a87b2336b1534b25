from strumkit.neural.config import TargetSpec, NetworkConfig, TrainConfig
from strumkit.neural.features import (ClipExample, segment_recording,
                                      build_targets, clip_example)
from strumkit.neural.model import StrumTranscriber, joint_loss
from strumkit.neural.train import (train, gradient_check, save_checkpoint,
                                   load_checkpoint, Recording)
from strumkit.neural.decode import decode_events, transcribe

__all__ = [
    "TargetSpec",
    "NetworkConfig",
    "TrainConfig",
    "ClipExample",
    "segment_recording",
    "build_targets",
    "clip_example",
    "StrumTranscriber",
    "joint_loss",
    "train",
    "gradient_check",
    "save_checkpoint",
    "load_checkpoint",
    "Recording",
    "decode_events",
    "transcribe",
]
