"""Causal-aware tabular WGAN-GP: per-node generators, critic, structural reward and trainer."""

from .checkpoint import (
    FORMAT_VERSION,
    Checkpoint,
    checkpoint_dict,
    load_checkpoint,
    save_checkpoint,
)
from .config import TrainConfig
from .losses import (
    CriticLoss,
    RewardResult,
    adversarial_loss,
    causal_surrogate_loss,
    discriminator_loss,
    gradient_penalty,
    structural_reward,
    worst_reward,
)
from .model import (
    CaganModel,
    Discriminator,
    StochasticSample,
    SubGenerator,
    build,
    forward_fake,
    sample,
    sample_stochastic,
)
from .train import (
    EpochLog,
    TrainingAborted,
    TrainResult,
    generate,
    reference_graph,
    train,
    training_log_frame,
    write_training_log,
)

__all__ = [
    "FORMAT_VERSION",
    "CaganModel",
    "Checkpoint",
    "CriticLoss",
    "Discriminator",
    "EpochLog",
    "RewardResult",
    "StochasticSample",
    "SubGenerator",
    "TrainConfig",
    "TrainResult",
    "TrainingAborted",
    "adversarial_loss",
    "build",
    "causal_surrogate_loss",
    "checkpoint_dict",
    "discriminator_loss",
    "forward_fake",
    "generate",
    "gradient_penalty",
    "load_checkpoint",
    "reference_graph",
    "sample",
    "sample_stochastic",
    "save_checkpoint",
    "structural_reward",
    "train",
    "training_log_frame",
    "write_training_log",
    "worst_reward",
]
