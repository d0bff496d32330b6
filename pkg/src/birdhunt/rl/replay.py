"""Uniform experience replay with oldest-first eviction."""

from __future__ import annotations

import numpy as np


class ReplayBuffer:
    def __init__(self, capacity: int, obs_dim: int, seed: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.obs = np.zeros((capacity, obs_dim), dtype=np.float32)
        self.next_obs = np.zeros((capacity, obs_dim), dtype=np.float32)
        self.actions = np.zeros((capacity, 2), dtype=np.int64)
        self.rewards = np.zeros(capacity, dtype=np.float64)
        self.dones = np.zeros(capacity, dtype=bool)
        self.seq = np.full(capacity, -1, dtype=np.int64)
        self._next_seq = 0
        self._rng = np.random.default_rng(seed)

    def __len__(self) -> int:
        return min(self._next_seq, self.capacity)

    def add(self, obs, action, reward, next_obs, done) -> int:
        """Insert one transition; returns its sequence number."""
        idx = self._next_seq % self.capacity
        self.obs[idx] = obs
        self.actions[idx] = action
        self.rewards[idx] = reward
        self.next_obs[idx] = next_obs
        self.dones[idx] = done
        self.seq[idx] = self._next_seq
        self._next_seq += 1
        return self._next_seq - 1

    def sample(self, batch_size: int) -> dict[str, np.ndarray]:
        size = len(self)
        if size == 0:
            raise ValueError("cannot sample from an empty buffer")
        idx = self._rng.integers(0, size, batch_size)
        return {
            "obs": self.obs[idx],
            "actions": self.actions[idx],
            "rewards": self.rewards[idx],
            "next_obs": self.next_obs[idx],
            "dones": self.dones[idx],
            "seq": self.seq[idx],
        }
