from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np

from .tensor import Tensor


@dataclass(frozen=True)
class AdamConfig:
    lr: float = 2e-4
    beta1: float = 0.5
    beta2: float = 0.9
    eps: float = 1e-8

    def __post_init__(self) -> None:
        if not self.lr > 0:
            raise ValueError(f"lr must be > 0, got {self.lr}")
        for name in ("beta1", "beta2"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise ValueError(f"{name} must be in [0, 1), got {v}")
        if not self.eps > 0:
            raise ValueError(f"eps must be > 0, got {self.eps}")


@dataclass
class AdamState:
    """First/second moment estimates for one parameter."""

    m: np.ndarray
    v: np.ndarray
    step: int = 0

    @classmethod
    def zeros_like(cls, values: np.ndarray) -> AdamState:
        return cls(m=np.zeros_like(values), v=np.zeros_like(values), step=0)


def _label(param: Tensor, index: int) -> str:
    return param.name if param.name else f"param[{index}]"


def adam_step(
    params: Sequence[Tensor],
    grads: Sequence[Tensor | np.ndarray],
    states: Sequence[AdamState],
    config: AdamConfig,
) -> List[AdamState]:
    """Apply one bias-corrected Adam update in place and return the advanced states.

    Every gradient is validated before any parameter moves, so a non-finite gradient leaves
    all parameters untouched.
    """
    if not (len(params) == len(grads) == len(states)):
        raise ValueError(
            f"params/grads/states length mismatch: {len(params)}/{len(grads)}/{len(states)}"
        )

    arrays: List[np.ndarray] = []
    for i, (p, g, s) in enumerate(zip(params, grads, states)):
        ga = g.values if isinstance(g, Tensor) else np.asarray(g, dtype=np.float64)
        if ga.shape != p.values.shape or s.m.shape != p.values.shape or s.v.shape != p.values.shape:
            raise ValueError(
                f"{_label(p, i)}: shape mismatch param={p.values.shape} "
                f"grad={ga.shape} moment={s.m.shape}"
            )
        if not np.all(np.isfinite(ga)):
            raise ValueError(f"{_label(p, i)}: non-finite gradient")
        arrays.append(ga)

    out: List[AdamState] = []
    b1, b2 = config.beta1, config.beta2
    for p, ga, s in zip(params, arrays, states):
        step = s.step + 1
        m = b1 * s.m + (1.0 - b1) * ga
        v = b2 * s.v + (1.0 - b2) * ga * ga
        m_hat = m / (1.0 - b1**step)
        v_hat = v / (1.0 - b2**step)
        p.values -= config.lr * m_hat / (np.sqrt(v_hat) + config.eps)
        out.append(AdamState(m=m, v=v, step=step))
    return out


@dataclass
class Adam:
    """Adam over a fixed parameter list, owning one AdamState per parameter."""

    params: List[Tensor]
    config: AdamConfig = field(default_factory=AdamConfig)
    states: List[AdamState] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.states:
            self.states = [AdamState.zeros_like(p.values) for p in self.params]

    def step(self, grads: Sequence[Tensor | np.ndarray]) -> None:
        self.states = adam_step(self.params, grads, self.states, self.config)

    @property
    def step_count(self) -> int:
        return self.states[0].step if self.states else 0

    def state_dict(self) -> Dict[str, object]:
        return {
            "step": self.step_count,
            "m": [s.m.tolist() for s in self.states],
            "v": [s.v.tolist() for s in self.states],
        }

    def load_state_dict(self, data: Dict[str, object]) -> None:
        ms = data["m"]
        vs = data["v"]
        step = int(data["step"])  # type: ignore[call-overload]
        if len(ms) != len(self.params) or len(vs) != len(self.params):  # type: ignore[arg-type]
            raise ValueError("optimizer state does not match parameter count")
        self.states = [
            AdamState(
                m=np.array(m, dtype=np.float64).reshape(p.values.shape),
                v=np.array(v, dtype=np.float64).reshape(p.values.shape),
                step=step,
            )
            for p, m, v in zip(self.params, ms, vs)  # type: ignore[call-overload]
        ]
