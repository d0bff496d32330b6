"""Scripted demonstrator standing in for a human player.

An accurate shot aims at the center of the most valuable non-bomb bird.
Distraction compounds: the per-step aim probability is (1-epsilon)**8.4, so
epsilon=0 plays perfectly, epsilon=1 never lands a shot, and epsilon=0.3
yields demo quality around 0.81 mean episodic reward (the 0.70-0.90 band the
demo-quality checks expect). Distracted shots land on a uniformly random
non-bird pixel, so they always miss.
"""

from __future__ import annotations

import numpy as np

from .config import EnvConfig, Species
from .core import EnvState

# Exponent calibrated so mid-range epsilon produces mean demo reward in the
# 0.7-0.9 band instead of collapsing toward 1.0 (a single Bernoulli draw per
# step would make misses far too rare to matter at -0.01 apiece).
MISS_COMPOUNDING = 8.4

_TARGET_PRIORITY = {Species.RED: 0, Species.YELLOW: 1}


def _target_bird(state: EnvState):
    candidates = [b for b in state.birds if b.species is not Species.BLACK]
    if not candidates:
        return None
    return min(candidates, key=lambda b: _TARGET_PRIORITY[b.species])


def oracle_policy(
    state: EnvState,
    epsilon: float,
    config: EnvConfig,
    rng: np.random.Generator,
) -> tuple[int, int]:
    """One aim decision. Deterministic given the generator state."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must be in [0,1], got {epsilon}")
    target = _target_bird(state)
    aim_prob = (1.0 - epsilon) ** MISS_COMPOUNDING
    if target is not None and rng.random() < aim_prob:
        return int(round(target.x)), int(round(target.y))
    # Distracted: uniformly random pixel outside every hitbox.
    for _ in range(1000):
        x = int(rng.integers(0, config.width))
        y = int(rng.integers(0, config.height))
        if not any(b.contains(x, y) for b in state.birds):
            return x, y
    raise RuntimeError("no non-bird pixel found; hitboxes cover the board")


class OraclePolicy:
    """Stateful wrapper owning its own RNG stream (separate from the env's)."""

    def __init__(self, epsilon: float, seed: int, config: EnvConfig):
        self.epsilon = epsilon
        self.config = config
        self.rng = np.random.default_rng(seed)

    def act(self, state: EnvState) -> tuple[int, int]:
        return oracle_policy(state, self.epsilon, self.config, self.rng)
