"""Adversarial imitation: discriminator training and intrinsic rewards.

The discriminator sees a flattened observation concatenated with one-hot
encodings of both action branches and emits one sigmoid output: 1 for
demonstrations, 0 for agent samples. The intrinsic reward is
-ln(1 - D(s,a)) = softplus(logit), clamped to [0, 10]; the reward handed to
the optimizer is lambda_ext * r_env + lambda_int * intrinsic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..nn import (
    AdamHyper,
    Dense,
    Flatten,
    Head,
    NetSpec,
    Relu,
    adam_step,
    backward,
    forward,
    gradient_penalty,
)
from ..rl.policy import PolicyNets

INTRINSIC_CLAMP = 10.0


def default_discriminator_spec(obs_dim: int, width: int, height: int) -> NetSpec:
    """Same default trunk as the desk-scale policy, one sigmoid head."""
    return NetSpec(
        input_width=obs_dim + width + height,
        input_height=1,
        input_channels=1,
        layers=(Flatten(), Dense(128), Relu(), Dense(128), Relu()),
        heads=(Head(1, "scalar"),),
    )


@dataclass(frozen=True)
class GAILConfig:
    disc_spec: NetSpec | None = None
    disc_lr: float = 3e-4
    lambda_int: float = 1.0
    lambda_ext: float = 0.0
    gradient_penalty_coef: float = 1.0
    demo_batch_size: int = 128
    disc_updates_per_round: int = 2
    # Per-step offset the trainers subtract from the intrinsic term. Episodes
    # here end on success, so a strictly positive intrinsic reward pays the
    # policy to stall; zero-centering at the indifference point D=0.5
    # (intrinsic ln 2) restores the hurry-up incentive while leaving the
    # intrinsic-reward definition itself untouched.
    survival_offset: float = float(np.log(2.0))

    def __post_init__(self) -> None:
        if self.lambda_int < 0 or self.lambda_ext < 0:
            raise ValueError("reward strengths must be non-negative")
        if self.lambda_int == 0 and self.lambda_ext == 0:
            raise ValueError("at least one of lambda_int/lambda_ext must be positive")


@dataclass
class GAILStats:
    loss: float
    accuracy: float
    d_demo: float
    d_agent: float
    penalty: float


def disc_inputs(
    obs: np.ndarray, actions: np.ndarray, width: int, height: int
) -> np.ndarray:
    """Concatenate flat observations with one-hot x and y branches."""
    obs = np.asarray(obs, dtype=np.float32)
    if obs.ndim == 1:
        obs = obs[None, :]
    n = obs.shape[0]
    actions = np.asarray(actions).reshape(n, 2)
    one_x = np.zeros((n, width), dtype=np.float32)
    one_x[np.arange(n), actions[:, 0]] = 1.0
    one_y = np.zeros((n, height), dtype=np.float32)
    one_y[np.arange(n), actions[:, 1]] = 1.0
    return np.concatenate([obs, one_x, one_y], axis=1)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _softplus(z: np.ndarray) -> np.ndarray:
    return np.log1p(np.exp(-np.abs(z))) + np.maximum(z, 0.0)


def gail_discriminator_update(
    disc: PolicyNets,
    agent_obs: np.ndarray,
    agent_actions: np.ndarray,
    demo_obs: np.ndarray,
    demo_actions: np.ndarray,
    cfg: GAILConfig,
    width: int,
    height: int,
    rng: np.random.Generator,
) -> GAILStats:
    """One BCE step (demos=1, agent=0) plus gradient penalty on mixed samples."""
    if agent_obs.shape[0] == 0 or demo_obs.shape[0] == 0:
        raise ValueError("agent and demo batches must be non-empty")
    x_agent = disc_inputs(agent_obs, agent_actions, width, height)
    x_demo = disc_inputs(demo_obs, demo_actions, width, height)
    if x_agent.shape[1] != x_demo.shape[1]:
        raise ValueError(
            f"agent and demo feature sizes differ: {x_agent.shape[1]} vs {x_demo.shape[1]}"
        )

    out_demo = forward(disc.params, disc.spec, x_demo, want_cache=True)
    out_agent = forward(disc.params, disc.spec, x_agent, want_cache=True)
    z_demo = out_demo.scalars[0].astype(np.float64)
    z_agent = out_agent.scalars[0].astype(np.float64)
    d_demo = _sigmoid(z_demo)
    d_agent = _sigmoid(z_agent)
    # BCE over the combined batch, classes weighted equally: for identical
    # demo/agent distributions the optimum is D=0.5 at loss ln 2.
    loss = float(0.5 * (_softplus(-z_demo).mean() + _softplus(z_agent).mean()))
    if not np.isfinite(loss):
        raise FloatingPointError(f"non-finite discriminator loss {loss}")

    g_demo = backward(
        disc.params,
        disc.spec,
        out_demo,
        [((d_demo - 1.0) / (2.0 * z_demo.size)).astype(np.float32)],
    )
    g_agent = backward(
        disc.params,
        disc.spec,
        out_agent,
        [(d_agent / (2.0 * z_agent.size)).astype(np.float32)],
    )
    grads = g_demo + g_agent

    penalty_value = 0.0
    if cfg.gradient_penalty_coef > 0:
        m = min(x_demo.shape[0], x_agent.shape[0])
        u = rng.random((m, 1), dtype=np.float64).astype(np.float32)
        mixed = u * x_demo[:m] + (1.0 - u) * x_agent[:m]
        penalty_value, gp_grads = gradient_penalty(disc.params, disc.spec, mixed)
        grads = grads + cfg.gradient_penalty_coef * gp_grads

    disc.params, disc.adam = adam_step(disc.params, grads, disc.adam, AdamHyper(lr=cfg.disc_lr))
    # Exact 0.5 outputs count as a coin flip for either class.
    acc_demo = np.where(d_demo > 0.5, 1.0, np.where(d_demo == 0.5, 0.5, 0.0)).mean()
    acc_agent = np.where(d_agent < 0.5, 1.0, np.where(d_agent == 0.5, 0.5, 0.0)).mean()
    accuracy = 0.5 * (float(acc_demo) + float(acc_agent))
    return GAILStats(
        loss=loss,
        accuracy=accuracy,
        d_demo=float(d_demo.mean()),
        d_agent=float(d_agent.mean()),
        penalty=float(penalty_value),
    )


def intrinsic_reward(
    disc: PolicyNets, obs: np.ndarray, actions: np.ndarray, width: int, height: int
) -> np.ndarray:
    """-ln(1 - D(s,a)), clamped to [0, 10]."""
    x = disc_inputs(obs, actions, width, height)
    z = forward(disc.params, disc.spec, x).scalars[0].astype(np.float64)
    return np.minimum(_softplus(z), INTRINSIC_CLAMP)


def gail_reward(
    disc: PolicyNets,
    obs: np.ndarray,
    actions: np.ndarray,
    env_rewards: np.ndarray,
    cfg: GAILConfig,
    width: int,
    height: int,
) -> np.ndarray:
    """Per-step reward handed to the RL optimizer."""
    mixed = cfg.lambda_ext * np.asarray(env_rewards, dtype=np.float64)
    if cfg.lambda_int > 0:
        mixed = mixed + cfg.lambda_int * intrinsic_reward(disc, obs, actions, width, height)
    return mixed


@dataclass
class GAILRewardMixer:
    """Reward pipe attached to a trainer; counts calls for wiring checks."""

    disc: PolicyNets
    cfg: GAILConfig
    width: int
    height: int
    calls: int = 0
    env_reward_weight_seen: float = field(init=False, default=0.0)

    def __call__(
        self, obs: np.ndarray, actions: np.ndarray, env_rewards: np.ndarray
    ) -> np.ndarray:
        self.calls += 1
        self.env_reward_weight_seen = self.cfg.lambda_ext
        mixed = gail_reward(
            self.disc, obs, actions, env_rewards, self.cfg, self.width, self.height
        )
        return mixed - self.cfg.lambda_int * self.cfg.survival_offset
