"""Behavioral cloning: supervised policy fitting on demonstrated pairs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..demos import DemoFile
from ..nn import AdamHyper, adam_step, backward, forward
from ..rl.policy import PolicyNets


@dataclass(frozen=True)
class BCConfig:
    lr: float = 3e-4
    batch_size: int = 128
    epochs: int = 10
    # Auxiliary-mode schedule: strength(step) = initial * 0.5 ** (step // decay_steps)
    aux_initial_strength: float = 0.5
    aux_decay_steps: int = 20_000
    aux_rounds_per_update: int = 8  # demo minibatches pulled per optimizer round

    def __post_init__(self) -> None:
        if not 0.0 <= self.aux_initial_strength <= 1.0:
            raise ValueError("aux strength must be in [0,1]")
        if self.aux_decay_steps < 1:
            raise ValueError("decay steps must be >= 1")
        if self.batch_size < 1 or self.epochs < 1:
            raise ValueError("batch_size and epochs must be >= 1")

    def aux_strength(self, step: int) -> float:
        return self.aux_initial_strength * 0.5 ** (step // self.aux_decay_steps)


@dataclass
class BCStats:
    loss: float  # summed per-branch cross-entropy, mean over the batch
    accuracy: float  # both branches argmax-correct


def demo_arrays(demos: list[DemoFile]) -> tuple[np.ndarray, np.ndarray]:
    """Stack (observations, actions) from demo files; observations required."""
    obs_list: list[np.ndarray] = []
    act_list: list[np.ndarray] = []
    for demo in demos:
        for rec in demo.records:
            if rec.observation is None:
                raise ValueError(
                    "demo lacks observations; load with regenerate_observations=True"
                )
            obs_list.append(rec.observation)
            act_list.append(np.asarray(rec.action, dtype=np.int64))
    if not obs_list:
        raise ValueError("no demonstration records")
    return np.stack(obs_list).astype(np.float32), np.stack(act_list)


def bc_update(
    nets: PolicyNets,
    demo_obs: np.ndarray,
    demo_actions: np.ndarray,
    cfg: BCConfig,
    strength: float = 1.0,
) -> BCStats:
    """One gradient step of summed per-branch cross-entropy on a demo batch."""
    m = demo_obs.shape[0]
    if m == 0:
        raise ValueError("empty demo batch")
    branch_sizes = nets.spec.branch_sizes()
    for b, size in enumerate(branch_sizes):
        col = demo_actions[:, b]
        if col.min() < 0 or col.max() >= size:
            raise ValueError(
                f"demo action branch {b} outside [0,{size}): found {int(col.min())}..{int(col.max())}"
            )

    out = forward(nets.params, nets.spec, demo_obs, want_cache=True)
    rows = np.arange(m)
    loss = 0.0
    correct = np.ones(m, dtype=bool)
    head_grads: list[np.ndarray | None] = []
    bi = 0
    for head in nets.spec.heads:
        if head.kind != "branch":
            head_grads.append(None)
            continue
        probs = out.branches[bi]
        picked = np.maximum(probs[rows, demo_actions[:, bi]], 1e-38)
        loss += float(-np.log(picked).mean())
        correct &= probs.argmax(axis=1) == demo_actions[:, bi]
        onehot = np.zeros_like(probs)
        onehot[rows, demo_actions[:, bi]] = 1.0
        head_grads.append((strength / m) * (probs - onehot))
        bi += 1

    grads = backward(nets.params, nets.spec, out, head_grads)
    nets.params, nets.adam = adam_step(nets.params, grads, nets.adam, AdamHyper(lr=cfg.lr))
    return BCStats(loss=loss, accuracy=float(correct.mean()))
