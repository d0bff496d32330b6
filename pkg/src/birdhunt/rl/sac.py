"""Discrete soft actor-critic with twin factorized Q networks.

Action space is two categorical branches; a Q net carries one head per branch
plus a scalar baseline, scoring the joint action as Qx[ax] + Qy[ay] - b(s).
Policy and temperature objectives use exact categorical expectations (no
action sampling); the soft target uses the elementwise minimum of the twin
target nets over the full joint grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..nn import AdamHyper, NetSpec, adam_step, backward, forward, init_params
from .policy import PolicyNets


@dataclass(frozen=True)
class SACConfig:
    gamma: float = 0.97
    replay_capacity: int = 50_000
    batch_size: int = 96
    tau: float = 0.005
    alpha: float = 0.05
    auto_alpha: bool = True
    # Episodes here end on success, so discounted entropy bonuses reward
    # stalling; a low target keeps the soft value of a hit above the value of
    # wandering while auto-alpha still sustains exploration early on.
    target_entropy_scale: float = 0.1  # target = scale * max joint entropy
    lr: float = 3e-4
    alpha_lr: float = 3e-3
    update_to_data: float = 0.5  # gradient updates per environment step
    warmup_steps: int = 2_000

    def __post_init__(self) -> None:
        if self.replay_capacity < self.batch_size:
            raise ValueError("replay capacity must be >= batch size")
        if not 0.0 < self.tau <= 1.0:
            raise ValueError("tau must be in (0,1]")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must be in (0,1]")
        if self.update_to_data <= 0:
            raise ValueError("update_to_data must be positive")


@dataclass
class SACNets:
    policy: PolicyNets
    q1: PolicyNets
    q2: PolicyNets
    q1_target: np.ndarray
    q2_target: np.ndarray
    log_alpha: float

    @classmethod
    def create(cls, policy_spec: NetSpec, q_spec: NetSpec, seed: int, alpha: float) -> "SACNets":
        q1 = PolicyNets(q_spec, init_params(q_spec, seed + 1))
        q2 = PolicyNets(q_spec, init_params(q_spec, seed + 2))
        return cls(
            policy=PolicyNets(policy_spec, init_params(policy_spec, seed)),
            q1=q1,
            q2=q2,
            q1_target=q1.params.copy(),
            q2_target=q2.params.copy(),
            log_alpha=float(np.log(alpha)),
        )

    @property
    def alpha(self) -> float:
        return float(np.exp(self.log_alpha))


@dataclass
class SACStats:
    q_loss: float
    policy_loss: float
    alpha: float
    entropy: float
    q_values: float = 0.0


def _joint_q(out) -> np.ndarray:
    """(N, W, H) joint values from branch heads minus the baseline."""
    qx, qy = out.branch_logits[0], out.branch_logits[1]
    baseline = out.scalars[0]
    return qx[:, :, None] + qy[:, None, :] - baseline[:, None, None]


def _branch_entropies(probs: np.ndarray) -> np.ndarray:
    lp = np.log(np.maximum(probs, 1e-38))
    return -(probs * lp).sum(axis=1)


def sac_update(
    nets: SACNets,
    batch: dict[str, np.ndarray],
    cfg: SACConfig,
    max_entropy: float,
) -> SACStats:
    """One gradient step on twins, policy, and (optionally) temperature."""
    obs = batch["obs"]
    actions = batch["actions"]
    rewards = np.asarray(batch["rewards"], dtype=np.float64)
    next_obs = batch["next_obs"]
    dones = np.asarray(batch["dones"], dtype=bool)
    n = obs.shape[0]
    alpha = nets.alpha
    hyper = AdamHyper(lr=cfg.lr)

    # -- soft target from the twin target nets ------------------------------
    pol_next = forward(nets.policy.params, nets.policy.spec, next_obs)
    pxn, pyn = pol_next.branches
    t1 = _joint_q(forward(nets.q1_target, nets.q1.spec, next_obs))
    t2 = _joint_q(forward(nets.q2_target, nets.q2.spec, next_obs))
    tmin = np.minimum(t1, t2).astype(np.float64)
    ev = np.einsum("ia,iab,ib->i", pxn.astype(np.float64), tmin, pyn.astype(np.float64))
    h_next = _branch_entropies(pxn) + _branch_entropies(pyn)
    target = rewards + cfg.gamma * (~dones) * (ev + alpha * h_next)

    # -- twin Q regression on the taken actions -----------------------------
    rows = np.arange(n)
    q_loss_total = 0.0
    q_pred_mean = 0.0
    for qnets in (nets.q1, nets.q2):
        out = forward(qnets.params, qnets.spec, obs, want_cache=True)
        qx, qy = out.branch_logits
        baseline = out.scalars[0]
        q_pred = (
            qx[rows, actions[:, 0]].astype(np.float64)
            + qy[rows, actions[:, 1]].astype(np.float64)
            - baseline.astype(np.float64)
        )
        err = q_pred - target
        q_loss = float(np.mean(err**2))
        if not np.isfinite(q_loss):
            raise FloatingPointError(f"non-finite Q loss {q_loss}")
        d = (2.0 / n) * err
        gx = np.zeros_like(qx)
        gx[rows, actions[:, 0]] = d
        gy = np.zeros_like(qy)
        gy[rows, actions[:, 1]] = d
        grads = backward(
            qnets.params,
            qnets.spec,
            out,
            [gx.astype(np.float32), gy.astype(np.float32), (-d).astype(np.float32)],
        )
        qnets.params, qnets.adam = adam_step(qnets.params, grads, qnets.adam, hyper)
        q_loss_total += q_loss
        q_pred_mean += float(q_pred.mean())

    # -- policy step: exact expectation of alpha*log pi - min Q -------------
    pol = forward(nets.policy.params, nets.policy.spec, obs, want_cache=True)
    px, py = pol.branches
    o1 = _joint_q(forward(nets.q1.params, nets.q1.spec, obs))
    o2 = _joint_q(forward(nets.q2.params, nets.q2.spec, obs))
    omin = np.minimum(o1, o2).astype(np.float64)
    lpx = np.log(np.maximum(px, 1e-38))
    lpy = np.log(np.maximum(py, 1e-38))
    hx = _branch_entropies(px)
    hy = _branch_entropies(py)
    # c[i,k] = E_{ay~py}[ alpha*(log px[k] + log py[ay]) - Qmin[k,ay] ]
    cx = alpha * lpx - alpha * hy[:, None] - np.einsum("iab,ib->ia", omin, py.astype(np.float64))
    cy = alpha * lpy - alpha * hx[:, None] - np.einsum("iab,ia->ib", omin, px.astype(np.float64))
    j_per = (px.astype(np.float64) * cx).sum(axis=1)
    policy_loss = float(j_per.mean())
    if not np.isfinite(policy_loss):
        raise FloatingPointError(f"non-finite policy loss {policy_loss}")
    gx = (px.astype(np.float64) * (cx - j_per[:, None])) / n
    gy = (py.astype(np.float64) * (cy - j_per[:, None])) / n
    grads = backward(
        nets.policy.params,
        nets.policy.spec,
        pol,
        [gx.astype(np.float32), gy.astype(np.float32)],
    )
    nets.policy.params, nets.policy.adam = adam_step(
        nets.policy.params, grads, nets.policy.adam, hyper
    )

    # -- temperature ---------------------------------------------------------
    h_cur = float((hx + hy).mean())
    if cfg.auto_alpha:
        target_h = cfg.target_entropy_scale * max_entropy
        nets.log_alpha -= cfg.alpha_lr * (h_cur - target_h)

    # -- polyak targets ------------------------------------------------------
    nets.q1_target = (1.0 - cfg.tau) * nets.q1_target + cfg.tau * nets.q1.params
    nets.q2_target = (1.0 - cfg.tau) * nets.q2_target + cfg.tau * nets.q2.params

    return SACStats(
        q_loss=q_loss_total / 2.0,
        policy_loss=policy_loss,
        alpha=nets.alpha,
        entropy=h_cur,
        q_values=q_pred_mean / 2.0,
    )


def sac_policy_loss_value(
    nets: SACNets, obs: np.ndarray, alpha: float
) -> float:
    """Exact-expectation policy objective on a batch (no update); test hook."""
    pol = forward(nets.policy.params, nets.policy.spec, obs)
    px, py = pol.branches
    o1 = _joint_q(forward(nets.q1.params, nets.q1.spec, obs))
    o2 = _joint_q(forward(nets.q2.params, nets.q2.spec, obs))
    omin = np.minimum(o1, o2).astype(np.float64)
    lpx = np.log(np.maximum(px, 1e-38))
    lpy = np.log(np.maximum(py, 1e-38))
    joint_lp = lpx[:, :, None] + lpy[:, None, :]
    pjoint = px.astype(np.float64)[:, :, None] * py.astype(np.float64)[:, None, :]
    return float((pjoint * (alpha * joint_lp - omin)).sum(axis=(1, 2)).mean())
