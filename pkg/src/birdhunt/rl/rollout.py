"""Experience collection over a pool of environments."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..env import BirdHuntEnv


@dataclass
class Trajectory:
    """Buffers are laid out env-contiguously: env e owns rows
    [e*steps_per_env, (e+1)*steps_per_env), so per-env slices are valid
    time-ordered streams for advantage estimation."""

    obs: np.ndarray  # (T, D)
    actions: np.ndarray  # (T, 2)
    rewards: np.ndarray  # (T,) environment rewards
    dones: np.ndarray  # (T,)
    logp: np.ndarray
    entropy: np.ndarray
    value: np.ndarray | None
    last_values: np.ndarray  # (pool,) bootstrap values, 0 when policy has none
    steps_per_env: int
    episodes: list[tuple[float, int]] = field(default_factory=list)  # (return, length)

    def __len__(self) -> int:
        return self.obs.shape[0]

    def env_slice(self, e: int) -> slice:
        return slice(e * self.steps_per_env, (e + 1) * self.steps_per_env)


def run_rollouts(
    envs: list[BirdHuntEnv],
    current_obs: list[np.ndarray],
    policy: Callable[[np.ndarray], dict[str, np.ndarray]],
    n_steps: int,
    episode_accumulators: list[list[float]] | None = None,
    on_transition: Callable | None = None,
) -> Trajectory:
    """Collect n_steps transitions across the pool, batching policy queries.

    `current_obs` is updated in place so collection resumes seamlessly;
    episodes finishing mid-rollout restart via begin_episode (run-global
    counters persist). `episode_accumulators` carries partial (return, length)
    pairs across rollout boundaries, one [ret, len] list per env.
    """
    pool = len(envs)
    if pool == 0:
        raise ValueError("empty env pool")
    if n_steps % pool != 0:
        raise ValueError(f"n_steps={n_steps} not divisible by pool size {pool}")
    steps_per_env = n_steps // pool
    if episode_accumulators is None:
        episode_accumulators = [[0.0, 0] for _ in envs]

    obs_dim = envs[0].config.observation_size
    obs_buf = np.empty((n_steps, obs_dim), dtype=np.float32)
    act_buf = np.empty((n_steps, 2), dtype=np.int64)
    rew_buf = np.empty(n_steps, dtype=np.float64)
    done_buf = np.empty(n_steps, dtype=bool)
    logp_buf = np.empty(n_steps, dtype=np.float64)
    ent_buf = np.empty(n_steps, dtype=np.float64)
    val_buf = np.empty(n_steps, dtype=np.float64)
    have_values = False
    episodes: list[tuple[float, int]] = []

    for s in range(steps_per_env):
        batch = np.stack(current_obs)
        decision = policy(batch)
        actions = decision["actions"]
        have_values = "value" in decision
        for e, env in enumerate(envs):
            idx = e * steps_per_env + s
            action = (int(actions[e, 0]), int(actions[e, 1]))
            res = env.step(action)
            obs_buf[idx] = batch[e]
            act_buf[idx] = actions[e]
            rew_buf[idx] = res.reward
            done_buf[idx] = res.done
            logp_buf[idx] = decision["logp"][e]
            ent_buf[idx] = decision["entropy"][e]
            if have_values:
                val_buf[idx] = decision["value"][e]
            acc = episode_accumulators[e]
            acc[0] += res.reward
            acc[1] += 1
            if on_transition is not None:
                on_transition(batch[e], action, res)
            if res.done:
                episodes.append((acc[0], acc[1]))
                acc[0], acc[1] = 0.0, 0
                current_obs[e] = env.begin_episode()
            else:
                current_obs[e] = res.observation

    last_values = np.zeros(pool, dtype=np.float64)
    if n_steps > 0 and have_values:
        tail = policy(np.stack(current_obs))
        if "value" in tail:
            last_values = np.asarray(tail["value"], dtype=np.float64)

    return Trajectory(
        obs=obs_buf,
        actions=act_buf,
        rewards=rew_buf,
        dones=done_buf,
        logp=logp_buf,
        entropy=ent_buf,
        value=val_buf if have_values else None,
        last_values=last_values,
        steps_per_env=steps_per_env,
        episodes=episodes,
    )
