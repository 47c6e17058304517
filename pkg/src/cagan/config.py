from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, Mapping, Optional

from autodiff import AdamConfig
from discovery import PcConfig


@dataclass(frozen=True)
class TrainConfig:
    """Training hyper-parameters.

    ``steps_per_epoch=None`` means one generator step per B training rows (at least one).
    ``reward_stride`` computes the structural reward on every n-th generator step; steps in
    between reuse no reward and carry no causal term.
    """

    batch_size: int = 500
    epochs: int = 300
    critic_steps: int = 3
    lam: float = 0.01
    tau: float = 0.5
    gp_weight: float = 10.0
    reward_depth: int = 2
    reward_alpha: float = 0.05
    lr: float = 2e-4
    beta1: float = 0.5
    beta2: float = 0.9
    noise_dim: int = 16
    policy_std: float = 1.0
    bn_momentum: float = 0.8
    steps_per_epoch: Optional[int] = None
    reward_stride: int = 1
    reward_baseline: bool = False
    baseline_decay: float = 0.9
    async_reward: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if self.batch_size < 2:
            raise ValueError(f"batch_size must be >= 2, got {self.batch_size}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.critic_steps < 1:
            raise ValueError(f"critic_steps must be >= 1, got {self.critic_steps}")
        if not math.isfinite(self.lam) or self.lam < 0:
            raise ValueError(f"lam must be finite and >= 0, got {self.lam}")
        if not self.tau > 0:
            raise ValueError(f"tau must be > 0, got {self.tau}")
        if self.gp_weight < 0:
            raise ValueError(f"gp_weight must be >= 0, got {self.gp_weight}")
        if self.reward_depth < 0:
            raise ValueError(f"reward_depth must be >= 0, got {self.reward_depth}")
        if not self.policy_std > 0:
            raise ValueError(f"policy_std must be > 0, got {self.policy_std}")
        if self.noise_dim < 1:
            raise ValueError(f"noise_dim must be >= 1, got {self.noise_dim}")
        if self.steps_per_epoch is not None and self.steps_per_epoch < 1:
            raise ValueError(f"steps_per_epoch must be >= 1, got {self.steps_per_epoch}")
        if self.reward_stride < 1:
            raise ValueError(f"reward_stride must be >= 1, got {self.reward_stride}")
        if not 0.0 <= self.baseline_decay < 1.0:
            raise ValueError(f"baseline_decay must be in [0, 1), got {self.baseline_decay}")
        # range checks on lr/betas and alpha live in the configs built from these fields
        self.adam()
        self.reward_pc()

    def adam(self) -> AdamConfig:
        return AdamConfig(lr=self.lr, beta1=self.beta1, beta2=self.beta2)

    def reward_pc(self) -> PcConfig:
        return PcConfig(alpha=self.reward_alpha, max_depth=self.reward_depth)

    def steps_for(self, n_rows: int) -> int:
        if self.steps_per_epoch is not None:
            return self.steps_per_epoch
        return max(1, n_rows // self.batch_size)

    def with_overrides(self, **kwargs: Any) -> TrainConfig:
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_mapping(cls, raw: Optional[Mapping[str, Any]]) -> TrainConfig:
        raw = dict(raw or {})
        known = set(cls.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown training settings: {sorted(unknown)}")
        base = cls()
        values: Dict[str, Any] = {}
        for name, value in raw.items():
            default = getattr(base, name)
            if value is None:
                values[name] = None
            elif isinstance(default, bool):
                if not isinstance(value, bool):
                    raise ValueError(f"{name} must be true/false, got {value!r}")
                values[name] = value
            elif isinstance(default, int) or name == "steps_per_epoch":
                try:
                    values[name] = int(value)
                except (TypeError, ValueError) as exc:
                    raise ValueError(f"{name} must be an integer, got {value!r}") from exc
            else:
                try:
                    values[name] = float(value)
                except (TypeError, ValueError) as exc:
                    raise ValueError(f"{name} must be a number, got {value!r}") from exc
        return cls(**values)
