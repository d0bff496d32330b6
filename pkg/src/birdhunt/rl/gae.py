"""Generalized advantage estimation."""

from __future__ import annotations

import numpy as np


def compute_gae(
    rewards: np.ndarray,
    values: np.ndarray,
    dones: np.ndarray,
    gamma: float,
    lam: float,
    last_value: float = 0.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Exponentially weighted sums of TD residuals, plus value targets.

    `last_value` bootstraps the tail when the final transition is not done.
    Advantages are returned raw; batch normalization is the policy loss's job.
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    dones = np.asarray(dones, dtype=bool)
    t_len = rewards.shape[0]
    if t_len == 0:
        raise ValueError("empty trajectory")
    if not (values.shape[0] == dones.shape[0] == t_len):
        raise ValueError("rewards, values, dones must be aligned")

    next_values = np.append(values[1:], last_value)
    next_values[dones] = 0.0
    deltas = rewards + gamma * next_values - values

    advantages = np.empty(t_len, dtype=np.float64)
    acc = 0.0
    for t in range(t_len - 1, -1, -1):
        if dones[t]:
            acc = 0.0
        acc = deltas[t] + gamma * lam * acc
        advantages[t] = acc
    returns = advantages + values
    return advantages, returns
