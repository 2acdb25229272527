"""Training and architecture configuration dataclasses."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

DEFAULT_LOGREG_LR = 0.01
DEFAULT_NEURAL_LR = 0.001

DIVERGENCE_FACTOR = 10.0
DIVERGENCE_EPOCHS = 2


class TrainingDivergedError(RuntimeError):
    """Raised when the loss blows up or becomes NaN/Inf."""


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    dev_accuracy: Optional[float]


@dataclass
class TrainConfig:
    learning_rate: float = DEFAULT_LOGREG_LR
    l2: float = 1e-4
    batch_size: int = 64
    max_epochs: int = 5
    patience: int = 1
    seed: int = 0

    def validate(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.l2 < 0:
            raise ValueError("l2 must be non-negative")
        if self.batch_size < 1 or self.max_epochs < 1:
            raise ValueError("batch_size and max_epochs must be positive")
        if self.patience < 0:
            raise ValueError("patience must be non-negative (0 disables early stopping)")


def neural_train_config(**overrides) -> TrainConfig:
    config = TrainConfig(learning_rate=DEFAULT_NEURAL_LR)
    for key, value in overrides.items():
        setattr(config, key, value)
    return config


@dataclass
class EncoderConfig:
    dim: int = 64
    hidden: int = 128
    truncate: int = 64
    pair_order: str = "top_down"
    share_encoder: bool = True
    max_positions: int = 8
    min_count: int = 2

    def validate(self) -> None:
        if self.dim < 1 or self.hidden < 1 or self.truncate < 1:
            raise ValueError("dim, hidden and truncate must be positive")
        if self.pair_order not in ("top_down", "bottom_up"):
            raise ValueError(f"pair_order must be top_down or bottom_up, got {self.pair_order!r}")
        if self.max_positions < 1:
            raise ValueError("max_positions must be positive")
