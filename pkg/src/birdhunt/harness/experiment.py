"""Experiment orchestration: seeded runs, outputs, greedy evaluation.

An experiment directory is self-contained: the config copy, one metrics CSV
and checkpoint per seed, and the comparison report reproduce the run.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..demos import DemoFile, load_demo, validate_demo
from ..env import BirdHuntEnv, EnvConfig
from ..il import BCConfig, GAILConfig, TrainerMode, compose_trainer
from ..metrics import MetricsPoint, MetricsSeries
from ..nn import NetSpec, entropy, forward, greedy_actions, load_checkpoint, sample_actions
from ..rl import PPOConfig, SACConfig
from .compare import compare


class ExperimentError(ValueError):
    """Configuration or compatibility failure before/while running."""


def _config_to_doc(cfg: Any) -> dict[str, Any]:
    doc = {}
    for f in dataclasses.fields(cfg):
        v = getattr(cfg, f.name)
        if isinstance(v, NetSpec):
            v = v.to_json()
        doc[f.name] = v
    return doc


def _config_from_doc(cls: type, doc: dict[str, Any]) -> Any:
    names = {f.name for f in dataclasses.fields(cls)}
    kwargs = {k: v for k, v in doc.items() if k in names}
    if cls is GAILConfig and kwargs.get("disc_spec") is not None:
        kwargs["disc_spec"] = NetSpec.from_json(kwargs["disc_spec"])
    return cls(**kwargs)


@dataclass
class ExperimentConfig:
    experiment_id: str
    env: EnvConfig
    mode: TrainerMode = TrainerMode.RL_ONLY
    base: str = "sac"
    total_steps: int = 100_000
    summary_window: int = 5_000
    seeds: tuple[int, ...] = (1,)
    demo_paths: tuple[str, ...] = ()
    out_dir: str = "runs"
    ppo: PPOConfig = field(default_factory=PPOConfig)
    sac: SACConfig = field(default_factory=SACConfig)
    bc: BCConfig = field(default_factory=BCConfig)
    gail: GAILConfig = field(default_factory=GAILConfig)
    threshold: float = 0.9
    sustained_windows: int = 3

    def __post_init__(self) -> None:
        self.mode = TrainerMode(self.mode)
        if not self.seeds:
            raise ExperimentError("seeds list must be non-empty")
        if self.total_steps < self.summary_window:
            raise ExperimentError("budget must cover at least one summary window")

    def to_json(self) -> dict[str, Any]:
        return {
            "experiment_id": self.experiment_id,
            "env": self.env.to_json(),
            "trainer": {
                "mode": self.mode.value,
                "base": self.base,
                "ppo": _config_to_doc(self.ppo),
                "sac": _config_to_doc(self.sac),
                "bc": _config_to_doc(self.bc),
                "gail": _config_to_doc(self.gail),
            },
            "total_steps": self.total_steps,
            "summary_window": self.summary_window,
            "seeds": list(self.seeds),
            "demo_paths": list(self.demo_paths),
            "out_dir": self.out_dir,
            "threshold": self.threshold,
            "sustained_windows": self.sustained_windows,
        }

    @classmethod
    def from_json(cls, doc: dict[str, Any]) -> "ExperimentConfig":
        trainer = doc.get("trainer", {})
        return cls(
            experiment_id=doc["experiment_id"],
            env=EnvConfig.from_json(doc["env"]),
            mode=TrainerMode(trainer.get("mode", "RL_ONLY")),
            base=trainer.get("base", "sac"),
            total_steps=int(doc["total_steps"]),
            summary_window=int(doc.get("summary_window", 5000)),
            seeds=tuple(int(s) for s in doc.get("seeds", [1])),
            demo_paths=tuple(doc.get("demo_paths", [])),
            out_dir=doc.get("out_dir", "runs"),
            ppo=_config_from_doc(PPOConfig, trainer.get("ppo", {})),
            sac=_config_from_doc(SACConfig, trainer.get("sac", {})),
            bc=_config_from_doc(BCConfig, trainer.get("bc", {})),
            gail=_config_from_doc(GAILConfig, trainer.get("gail", {})),
            threshold=float(doc.get("threshold", 0.9)),
            sustained_windows=int(doc.get("sustained_windows", 3)),
        )

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path: str) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def _load_demos(cfg: ExperimentConfig) -> list[DemoFile]:
    demos = []
    for path in cfg.demo_paths:
        demo = load_demo(path, regenerate_observations=True)
        problems = validate_demo(demo, cfg.env)
        if problems:
            raise ExperimentError(
                f"demo {path!r} incompatible with experiment env: {problems[0]}"
            )
        demos.append(demo)
    return demos


def run_experiment(
    cfg: ExperimentConfig,
    quiet: bool = True,
    metrics_hook=None,
) -> dict[int, MetricsSeries]:
    """Train every seed to budget; write config copy, CSVs, checkpoints, report."""
    demos = _load_demos(cfg)
    os.makedirs(cfg.out_dir, exist_ok=True)
    cfg.save(os.path.join(cfg.out_dir, "config.json"))

    results: dict[int, MetricsSeries] = {}
    aborted: dict[int, str] = {}
    for seed in cfg.seeds:
        trainer = compose_trainer(
            cfg.mode,
            cfg.base,
            cfg.env,
            seed=seed,
            ppo_cfg=cfg.ppo,
            sac_cfg=cfg.sac,
            bc_cfg=cfg.bc,
            gail_cfg=cfg.gail,
            demos=demos,
        )

        def emit(point: MetricsPoint, seed=seed) -> None:
            if not quiet:
                print(
                    f"[{cfg.experiment_id} seed={seed}] step={point.step} "
                    f"reward={point.reward:.3f} len={point.episode_length:.1f} "
                    f"entropy={point.entropy:.3f}"
                )
            if metrics_hook is not None:
                metrics_hook(cfg.experiment_id, seed, point)

        try:
            series = trainer.train(cfg.total_steps, cfg.summary_window, emit)
        except FloatingPointError as exc:
            aborted[seed] = str(exc)
            series = MetricsSeries()
        results[seed] = series
        if len(series):
            series.save_csv(os.path.join(cfg.out_dir, f"metrics-seed{seed}.csv"))
            trainer.save_checkpoint(os.path.join(cfg.out_dir, f"checkpoint-seed{seed}.bhnc"))

    report_doc: dict[str, Any] = {
        "experiment_id": cfg.experiment_id,
        "threshold": cfg.threshold,
        "sustained_windows": cfg.sustained_windows,
        "aborted": {str(s): msg for s, msg in aborted.items()},
    }
    healthy = {f"seed{s}": series for s, series in results.items() if len(series)}
    if healthy:
        report = compare(healthy, cfg.threshold, cfg.sustained_windows)
        report_doc["table_csv"] = report.to_csv()
        with open(os.path.join(cfg.out_dir, "report.txt"), "w", encoding="utf-8") as fh:
            fh.write(report.to_text())
    with open(os.path.join(cfg.out_dir, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(report_doc, fh, indent=2, sort_keys=True)
    return results


@dataclass
class EvalResult:
    mean_reward: float
    mean_episode_length: float
    mean_entropy: float
    episodes: int


def evaluate(
    checkpoint_path: str,
    env_cfg: EnvConfig,
    n_episodes: int,
    seed: int = 0,
    mode: str = "greedy",
) -> EvalResult:
    """Greedy-action (argmax per branch, seeded tie-break) policy evaluation."""
    if n_episodes < 1:
        raise ExperimentError("n_episodes must be >= 1")
    spec, params, _meta = load_checkpoint(checkpoint_path)
    return evaluate_params(spec, params, env_cfg, n_episodes, seed, mode)


def evaluate_params(
    spec: NetSpec,
    params: np.ndarray,
    env_cfg: EnvConfig,
    n_episodes: int,
    seed: int = 0,
    mode: str = "greedy",
) -> EvalResult:
    if n_episodes < 1:
        raise ExperimentError("n_episodes must be >= 1")
    expected = env_cfg.observation_size
    got = spec.input_width * spec.input_height * spec.input_channels
    if got != expected:
        raise ExperimentError(
            f"checkpoint expects {got} inputs but env produces {expected}"
        )
    env_seed, tie_seed = (
        int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(2)
    )
    env = BirdHuntEnv(env_cfg)
    obs = env.reset(seed=env_seed)
    rng = np.random.default_rng(tie_seed)

    returns: list[float] = []
    lengths: list[int] = []
    entropies: list[float] = []
    for _ in range(n_episodes):
        total, length, done = 0.0, 0, False
        while not done:
            out = forward(params, spec, obs[None, :])
            entropies.append(float(np.atleast_1d(entropy(out.branches))[0]))
            if mode == "greedy":
                action = greedy_actions(out.branches, rng)[0]
            else:
                action = sample_actions(out.branches, rng)[0]
            res = env.step((int(action[0]), int(action[1])))
            total += res.reward
            length += 1
            done = res.done
            obs = env.begin_episode() if done else res.observation
        returns.append(total)
        lengths.append(length)
    return EvalResult(
        mean_reward=float(np.mean(returns)),
        mean_episode_length=float(np.mean(lengths)),
        mean_entropy=float(np.mean(entropies)),
        episodes=n_episodes,
    )
