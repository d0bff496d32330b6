"""Trainer assembly: RL-only, BC-only, GAIL-driven, and combined modes.

Every trainer exposes `train(total_steps, window_size, emit)` feeding one
MetricsPoint per summary window (environment reward, episode length, acting
entropy), and `save_checkpoint(path)`. Reward mixing (GAIL) and auxiliary
supervised pulls (BC) attach to the base optimizer as plugins, so RL_ONLY is
literally the plain trainer.
"""

from __future__ import annotations

import enum
from typing import Callable

import numpy as np

from ..demos import DemoFile
from ..env import BirdHuntEnv, EnvConfig
from ..metrics import MetricsPoint, MetricsSeries, WindowAggregator
from ..nn import Head, NetSpec, default_trunk, save_checkpoint
from ..rl import (
    CategoricalPolicy,
    PPOConfig,
    PolicyNets,
    ReplayBuffer,
    SACConfig,
    SACNets,
    Trajectory,
    compute_gae,
    ppo_update,
    run_rollouts,
    sac_update,
)
from .bc import BCConfig, bc_update, demo_arrays
from .gail import (
    GAILConfig,
    GAILRewardMixer,
    default_discriminator_spec,
    gail_discriminator_update,
)


class TrainerMode(str, enum.Enum):
    RL_ONLY = "RL_ONLY"
    BC_ONLY = "BC_ONLY"
    GAIL_ONLY = "GAIL_ONLY"
    BC_AND_GAIL = "BC_AND_GAIL"


def policy_net_spec(cfg: EnvConfig, with_value_head: bool) -> NetSpec:
    heads = [Head(cfg.width, "branch"), Head(cfg.height, "branch")]
    if with_value_head:
        heads.append(Head(1, "scalar"))
    return NetSpec(
        input_width=cfg.width,
        input_height=cfg.height,
        input_channels=cfg.channels,
        layers=default_trunk(cfg.width, cfg.height, cfg.channels),
        heads=tuple(heads),
    )


def q_net_spec(cfg: EnvConfig) -> NetSpec:
    return NetSpec(
        input_width=cfg.width,
        input_height=cfg.height,
        input_channels=cfg.channels,
        layers=default_trunk(cfg.width, cfg.height, cfg.channels),
        heads=(Head(cfg.width, "branch"), Head(cfg.height, "branch"), Head(1, "scalar")),
    )


def _spawn_seeds(seed: int, n: int) -> list[int]:
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(n)]


class GAILPlugin:
    """Discriminator upkeep, reward mixing, and the optional BC auxiliary."""

    def __init__(
        self,
        env_cfg: EnvConfig,
        gail_cfg: GAILConfig,
        demos: list[DemoFile],
        seed: int,
        bc_cfg: BCConfig | None = None,
    ):
        if not demos:
            raise ValueError("GAIL modes need at least one demo file")
        self.env_cfg = env_cfg
        self.cfg = gail_cfg
        self.demo_obs, self.demo_actions = demo_arrays(demos)
        spec = gail_cfg.disc_spec or default_discriminator_spec(
            env_cfg.observation_size, env_cfg.width, env_cfg.height
        )
        init_seed, demo_seed, agent_seed, gp_seed, bc_seed = _spawn_seeds(seed, 5)
        self.disc = PolicyNets.create(spec, init_seed)
        self.mixer = GAILRewardMixer(self.disc, gail_cfg, env_cfg.width, env_cfg.height)
        self._demo_rng = np.random.default_rng(demo_seed)
        self._agent_rng = np.random.default_rng(agent_seed)
        self._gp_rng = np.random.default_rng(gp_seed)
        self._bc_rng = np.random.default_rng(bc_seed)
        self.bc_cfg = bc_cfg
        self.last_stats: dict[str, float] = {}

    def _demo_minibatch(self) -> tuple[np.ndarray, np.ndarray]:
        idx = self._demo_rng.integers(
            0, self.demo_obs.shape[0], self.cfg.demo_batch_size
        )
        return self.demo_obs[idx], self.demo_actions[idx]

    def update_discriminator(self, agent_obs: np.ndarray, agent_actions: np.ndarray) -> None:
        for _ in range(self.cfg.disc_updates_per_round):
            d_obs, d_act = self._demo_minibatch()
            a_idx = self._agent_rng.integers(0, agent_obs.shape[0], self.cfg.demo_batch_size)
            stats = gail_discriminator_update(
                self.disc,
                agent_obs[a_idx],
                agent_actions[a_idx],
                d_obs,
                d_act,
                self.cfg,
                self.env_cfg.width,
                self.env_cfg.height,
                self._gp_rng,
            )
        self.last_stats.update(
            disc_loss=stats.loss, disc_acc=stats.accuracy, d_demo=stats.d_demo
        )

    def bc_pull(self, nets: PolicyNets, global_step: int) -> None:
        if self.bc_cfg is None:
            return
        rounds = self.bc_cfg.aux_rounds_per_update
        strength = self.bc_cfg.aux_strength(global_step)
        self.last_stats["bc_strength"] = strength
        if strength <= 0.0:
            return
        for _ in range(rounds):
            idx = self._bc_rng.integers(0, self.demo_obs.shape[0], self.bc_cfg.batch_size)
            stats = bc_update(
                nets, self.demo_obs[idx], self.demo_actions[idx], self.bc_cfg, strength
            )
        self.last_stats["bc_loss"] = stats.loss


class _FeedCounters:
    """Attributes episode completions to their completing step for windows."""

    def __init__(self, pool: int):
        self.acc = [[0.0, 0] for _ in range(pool)]

    def feed(self, agg: WindowAggregator, traj: Trajectory) -> None:
        pool = len(self.acc)
        for s in range(traj.steps_per_env):
            for e in range(pool):
                idx = e * traj.steps_per_env + s
                self.acc[e][0] += traj.rewards[idx]
                self.acc[e][1] += 1
                episode = None
                if traj.dones[idx]:
                    episode = (self.acc[e][0], self.acc[e][1])
                    self.acc[e] = [0.0, 0]
                agg.add_step(float(traj.entropy[idx]), episode)


class PPOTrainer:
    def __init__(
        self,
        env_cfg: EnvConfig,
        cfg: PPOConfig,
        seed: int,
        plugin: GAILPlugin | None = None,
    ):
        self.env_cfg = env_cfg
        self.cfg = cfg
        self.seed = seed
        self.plugin = plugin
        env_seed, init_seed, act_seed, shuffle_seed = _spawn_seeds(seed, 4)
        self.env = BirdHuntEnv(env_cfg)
        self._obs = [self.env.reset(seed=env_seed)]
        self.nets = PolicyNets.create(policy_net_spec(env_cfg, with_value_head=True), init_seed)
        self._act_rng = np.random.default_rng(act_seed)
        self._shuffle_rng = np.random.default_rng(shuffle_seed)
        self._rollout_acc = [[0.0, 0]]

    def train(
        self,
        total_steps: int,
        window_size: int,
        emit: Callable[[MetricsPoint], None],
    ) -> MetricsSeries:
        series = MetricsSeries()

        def sink(point: MetricsPoint) -> None:
            series.points.append(point)
            emit(point)

        agg = WindowAggregator(window_size, total_steps, sink)
        counters = _FeedCounters(1)
        while agg.step < total_steps:
            policy = CategoricalPolicy(self.nets.spec, self.nets.params, self._act_rng)
            traj = run_rollouts(
                [self.env], self._obs, policy, self.cfg.horizon, self._rollout_acc
            )
            if self.plugin is not None:
                self.plugin.update_discriminator(traj.obs, traj.actions)
                train_rewards = self.plugin.mixer(traj.obs, traj.actions, traj.rewards)
            else:
                train_rewards = traj.rewards
            advantages, returns = compute_gae(
                train_rewards,
                traj.value,
                traj.dones,
                self.cfg.gamma,
                self.cfg.gae_lambda,
                float(traj.last_values[0]),
            )
            stats = ppo_update(
                self.nets,
                {
                    "obs": traj.obs,
                    "actions": traj.actions,
                    "logp": traj.logp,
                    "advantages": advantages,
                    "returns": returns,
                },
                self.cfg,
                self._shuffle_rng,
            )
            if self.plugin is not None:
                self.plugin.bc_pull(self.nets, agg.step)
                agg.set_extras(**self.plugin.last_stats)
            agg.set_extras(
                policy_loss=stats.policy_loss,
                value_loss=stats.value_loss,
                clip_fraction=stats.clip_fraction,
            )
            counters.feed(agg, traj)
        return series

    def save_checkpoint(self, path: str) -> None:
        save_checkpoint(
            path,
            self.nets.spec,
            self.nets.params,
            meta={"trainer": "ppo", "env": self.env_cfg.to_json()},
        )


class SACTrainer:
    def __init__(
        self,
        env_cfg: EnvConfig,
        cfg: SACConfig,
        seed: int,
        plugin: GAILPlugin | None = None,
        disc_interval: int = 512,
    ):
        self.env_cfg = env_cfg
        self.cfg = cfg
        self.seed = seed
        self.plugin = plugin
        self.disc_interval = disc_interval
        env_seed, init_seed, act_seed, warm_seed, replay_seed = _spawn_seeds(seed, 5)
        self.env = BirdHuntEnv(env_cfg)
        self._obs = self.env.reset(seed=env_seed)
        self.nets = SACNets.create(
            policy_net_spec(env_cfg, with_value_head=False),
            q_net_spec(env_cfg),
            init_seed,
            cfg.alpha,
        )
        self.replay = ReplayBuffer(cfg.replay_capacity, env_cfg.observation_size, replay_seed)
        self._act_rng = np.random.default_rng(act_seed)
        self._warm_rng = np.random.default_rng(warm_seed)
        self._max_entropy = float(np.log(env_cfg.width) + np.log(env_cfg.height))

    def train(
        self,
        total_steps: int,
        window_size: int,
        emit: Callable[[MetricsPoint], None],
    ) -> MetricsSeries:
        series = MetricsSeries()

        def sink(point: MetricsPoint) -> None:
            series.points.append(point)
            emit(point)

        agg = WindowAggregator(window_size, total_steps, sink)
        cfg = self.cfg
        env_cfg = self.env_cfg
        ep_return, ep_len = 0.0, 0
        credit = 0.0
        policy = CategoricalPolicy(self.nets.policy.spec, self.nets.policy.params, self._act_rng)

        for step in range(1, total_steps + 1):
            if step <= cfg.warmup_steps:
                action = (
                    int(self._warm_rng.integers(0, env_cfg.width)),
                    int(self._warm_rng.integers(0, env_cfg.height)),
                )
                acting_entropy = self._max_entropy
            else:
                policy.params = self.nets.policy.params
                decision = policy(self._obs[None, :])
                action = (int(decision["actions"][0, 0]), int(decision["actions"][0, 1]))
                acting_entropy = float(decision["entropy"][0])

            res = self.env.step(action)
            self.replay.add(self._obs, action, res.reward, res.observation, res.done)
            ep_return += res.reward
            ep_len += 1
            episode = None
            if res.done:
                episode = (ep_return, ep_len)
                ep_return, ep_len = 0.0, 0
                self._obs = self.env.begin_episode()
            else:
                self._obs = res.observation
            agg.add_step(acting_entropy, episode)

            if step > cfg.warmup_steps:
                credit += cfg.update_to_data
                while credit >= 1.0:
                    credit -= 1.0
                    batch = self.replay.sample(cfg.batch_size)
                    if self.plugin is not None:
                        batch = dict(batch)
                        batch["rewards"] = self.plugin.mixer(
                            batch["obs"], batch["actions"], batch["rewards"]
                        )
                    stats = sac_update(self.nets, batch, cfg, self._max_entropy)
                    agg.set_extras(
                        q_loss=stats.q_loss,
                        policy_loss=stats.policy_loss,
                        alpha=stats.alpha,
                    )
                if self.plugin is not None and step % self.disc_interval == 0:
                    sample = self.replay.sample(
                        min(len(self.replay), 4 * self.plugin.cfg.demo_batch_size)
                    )
                    self.plugin.update_discriminator(sample["obs"], sample["actions"])
                    self.plugin.bc_pull(self.nets.policy, step)
                    agg.set_extras(**self.plugin.last_stats)
        return series

    def save_checkpoint(self, path: str) -> None:
        save_checkpoint(
            path,
            self.nets.policy.spec,
            self.nets.policy.params,
            meta={"trainer": "sac", "env": self.env_cfg.to_json()},
        )


class BCTrainer:
    """Pure supervised updates; env interaction exists only to measure metrics."""

    def __init__(
        self,
        env_cfg: EnvConfig,
        cfg: BCConfig,
        demos: list[DemoFile],
        seed: int,
        eval_chunk: int = 256,
    ):
        if not demos:
            raise ValueError("BC_ONLY needs at least one demo file")
        self.env_cfg = env_cfg
        self.cfg = cfg
        self.seed = seed
        self.eval_chunk = eval_chunk
        self.demo_obs, self.demo_actions = demo_arrays(demos)
        env_seed, init_seed, act_seed, shuffle_seed = _spawn_seeds(seed, 4)
        self.env = BirdHuntEnv(env_cfg)
        self._obs = [self.env.reset(seed=env_seed)]
        self.nets = PolicyNets.create(policy_net_spec(env_cfg, with_value_head=False), init_seed)
        self._act_rng = np.random.default_rng(act_seed)
        self._shuffle_rng = np.random.default_rng(shuffle_seed)
        self._rollout_acc = [[0.0, 0]]

    def train(
        self,
        total_steps: int,
        window_size: int,
        emit: Callable[[MetricsPoint], None],
    ) -> MetricsSeries:
        series = MetricsSeries()

        def sink(point: MetricsPoint) -> None:
            series.points.append(point)
            emit(point)

        agg = WindowAggregator(window_size, total_steps, sink)
        counters = _FeedCounters(1)
        n_demo = self.demo_obs.shape[0]
        while agg.step < total_steps:
            policy = CategoricalPolicy(self.nets.spec, self.nets.params, self._act_rng)
            chunk = min(self.eval_chunk, total_steps - agg.step)
            traj = run_rollouts([self.env], self._obs, policy, chunk, self._rollout_acc)
            counters.feed(agg, traj)
            for _ in range(self.cfg.epochs):
                order = self._shuffle_rng.permutation(n_demo)
                for start in range(0, n_demo, self.cfg.batch_size):
                    idx = order[start : start + self.cfg.batch_size]
                    stats = bc_update(
                        self.nets, self.demo_obs[idx], self.demo_actions[idx], self.cfg
                    )
            agg.set_extras(bc_loss=stats.loss, bc_accuracy=stats.accuracy)
        return series

    def save_checkpoint(self, path: str) -> None:
        save_checkpoint(
            path,
            self.nets.spec,
            self.nets.params,
            meta={"trainer": "bc", "env": self.env_cfg.to_json()},
        )


Trainer = PPOTrainer | SACTrainer | BCTrainer


def compose_trainer(
    mode: TrainerMode | str,
    base: str,
    env_cfg: EnvConfig,
    seed: int,
    ppo_cfg: PPOConfig | None = None,
    sac_cfg: SACConfig | None = None,
    bc_cfg: BCConfig | None = None,
    gail_cfg: GAILConfig | None = None,
    demos: list[DemoFile] | None = None,
) -> Trainer:
    """Wire a trainer for one of the four comparison modes.

    `base` chooses the RL optimizer ("ppo" or "sac") for every mode except
    BC_ONLY. Modes touching demonstrations reject a missing/empty demo list.
    """
    mode = TrainerMode(mode)
    if base not in ("ppo", "sac"):
        raise ValueError(f"unknown base optimizer {base!r}")
    demos = demos or []
    if mode in (TrainerMode.BC_ONLY, TrainerMode.GAIL_ONLY, TrainerMode.BC_AND_GAIL) and not demos:
        raise ValueError(f"{mode.value} requires demonstrations")

    if mode is TrainerMode.BC_ONLY:
        return BCTrainer(env_cfg, bc_cfg or BCConfig(), demos, seed)

    plugin = None
    if mode in (TrainerMode.GAIL_ONLY, TrainerMode.BC_AND_GAIL):
        plugin_seed = _spawn_seeds(seed ^ 0x5EED, 1)[0]
        plugin = GAILPlugin(
            env_cfg,
            gail_cfg or GAILConfig(),
            demos,
            plugin_seed,
            bc_cfg=(bc_cfg or BCConfig()) if mode is TrainerMode.BC_AND_GAIL else None,
        )

    if base == "ppo":
        return PPOTrainer(env_cfg, ppo_cfg or PPOConfig(), seed, plugin)
    return SACTrainer(env_cfg, sac_cfg or SACConfig(), seed, plugin)
