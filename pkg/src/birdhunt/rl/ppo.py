"""Clipped-surrogate policy optimization over branched discrete actions.

The probability ratio is the product of the per-branch ratios (equivalently,
exp of the summed per-branch log-prob difference). One net carries both
branch heads and the value head.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..nn import AdamHyper, NetSpec, adam_step, backward, forward, log_prob
from .policy import PolicyNets


@dataclass(frozen=True)
class PPOConfig:
    clip_epsilon: float = 0.2
    gamma: float = 0.99
    gae_lambda: float = 0.95
    epochs: int = 4
    minibatch_size: int = 128
    horizon: int = 1024
    value_coef: float = 0.5
    entropy_coef: float = 0.01
    lr: float = 3e-4

    def __post_init__(self) -> None:
        if not 0.0 < self.clip_epsilon < 1.0:
            raise ValueError("clip_epsilon must be in (0,1)")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must be in (0,1]")
        if not 0.0 <= self.gae_lambda <= 1.0:
            raise ValueError("gae_lambda must be in [0,1]")
        if self.epochs < 1 or self.minibatch_size < 1 or self.horizon < 1:
            raise ValueError("epochs, minibatch_size, horizon must be >= 1")


@dataclass
class PPOStats:
    policy_loss: float
    value_loss: float
    entropy: float
    clip_fraction: float


def per_sample_surrogate(
    logp_new: np.ndarray, logp_old: np.ndarray, advantages: np.ndarray, clip_epsilon: float
) -> np.ndarray:
    """min(rho*A, clip(rho)*A) per sample; the quantity PPO maximizes."""
    rho = np.exp(logp_new - logp_old)
    clipped = np.clip(rho, 1.0 - clip_epsilon, 1.0 + clip_epsilon)
    return np.minimum(rho * advantages, clipped * advantages)


def _entropy_logit_grad(probs: np.ndarray) -> np.ndarray:
    """d(-entropy)/d(logits): gradient that *decreases* entropy; negate to raise it."""
    logp = np.log(np.maximum(probs, 1e-38))
    ent = -(probs * logp).sum(axis=1, keepdims=True)
    return probs * (logp + ent)


def ppo_update(
    nets: PolicyNets,
    batch: dict[str, np.ndarray],
    cfg: PPOConfig,
    rng: np.random.Generator,
) -> PPOStats:
    """Epochs of shuffled minibatch updates on one on-policy rollout batch."""
    obs = batch["obs"]
    actions = batch["actions"]
    logp_old = np.asarray(batch["logp"], dtype=np.float64)
    advantages = np.asarray(batch["advantages"], dtype=np.float64)
    returns = np.asarray(batch["returns"], dtype=np.float64)
    n = obs.shape[0]
    if n == 0:
        raise ValueError("empty batch")

    # Batch-normalized advantages feed the policy loss.
    adv_std = advantages.std()
    norm_adv = (advantages - advantages.mean()) / (adv_std + 1e-8)

    spec: NetSpec = nets.spec
    hyper = AdamHyper(lr=cfg.lr)
    stats = PPOStats(0.0, 0.0, 0.0, 0.0)
    n_updates = 0

    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.minibatch_size):
            mb = order[start : start + cfg.minibatch_size]
            m = mb.size
            out = forward(nets.params, spec, obs[mb], want_cache=True)
            lp_new = log_prob(out.branch_logits, actions[mb])
            rho = np.exp(lp_new - logp_old[mb])
            adv = norm_adv[mb]
            clipped = np.clip(rho, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon)
            surr_raw = rho * adv
            surr_clip = clipped * adv
            policy_loss = -np.minimum(surr_raw, surr_clip).mean()

            value = out.scalars[0].astype(np.float64)
            verr = value - returns[mb]
            value_loss = cfg.value_coef * float(np.mean(verr**2))

            entropies = np.zeros(m)
            for probs in out.branches:
                lp = np.log(np.maximum(probs, 1e-38))
                entropies += -(probs * lp).sum(axis=1)
            entropy_mean = float(entropies.mean())

            total = policy_loss + value_loss - cfg.entropy_coef * entropy_mean
            if not np.isfinite(total):
                raise FloatingPointError(
                    f"non-finite PPO loss (policy={policy_loss}, value={value_loss})"
                )

            # d(policy_loss)/d(logp_new): zero where the clip saturates in the
            # improving direction, -rho*A/m elsewhere.
            use_raw = surr_raw <= surr_clip
            dlogp = np.where(use_raw, -rho * adv, 0.0) / m

            head_grads = []
            bi = 0
            for head in spec.heads:
                if head.kind == "branch":
                    probs = out.branches[bi]
                    onehot = np.zeros_like(probs)
                    onehot[np.arange(m), actions[mb][:, bi]] = 1.0
                    g = dlogp[:, None] * (onehot - probs)
                    g += (cfg.entropy_coef / m) * _entropy_logit_grad(probs)
                    head_grads.append(g.astype(nets.params.dtype))
                    bi += 1
                else:
                    head_grads.append(
                        (2.0 * cfg.value_coef / m * verr).astype(nets.params.dtype)
                    )

            grads = backward(nets.params, spec, out, head_grads)
            nets.params, nets.adam = adam_step(nets.params, grads, nets.adam, hyper)

            stats.policy_loss += float(policy_loss)
            stats.value_loss += float(value_loss)
            stats.entropy += entropy_mean
            stats.clip_fraction += float(np.mean(np.abs(rho - 1.0) > cfg.clip_epsilon))
            n_updates += 1

    stats.policy_loss /= n_updates
    stats.value_loss /= n_updates
    stats.entropy /= n_updates
    stats.clip_fraction /= n_updates
    return stats
