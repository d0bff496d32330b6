"""Demonstration files: capture, storage, validation, replay.

Format: JSON Lines, schema version "1". Line 1 is the header (env config
snapshot, recorder tag, seed, timestamps, episode/step counts, body checksum);
every following line is one step record. Observation payloads are base64 of
the raw little-endian float32 buffer and may be omitted ("actions-only"
files), in which case replaying the stored actions through a fresh env with
the stored seed regenerates them losslessly.
"""

from __future__ import annotations

import base64
import hashlib
import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from ..env import BirdHuntEnv, EnvConfig, OraclePolicy

FORMAT_VERSION = "1"


class DemoError(ValueError):
    """Raised on malformed, corrupted, or misused demo files."""


@dataclass
class DemoRecord:
    step: int
    action: tuple[int, int]
    reward: float
    done: bool
    observation: np.ndarray | None

    def to_json(self, include_observation: bool) -> dict:
        doc = {
            "step": self.step,
            "action": [int(self.action[0]), int(self.action[1])],
            "reward": self.reward,
            "done": self.done,
        }
        if include_observation:
            if self.observation is None:
                raise DemoError("record has no observation to serialize")
            doc["obs"] = base64.b64encode(
                np.ascontiguousarray(self.observation, dtype="<f4").tobytes()
            ).decode("ascii")
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "DemoRecord":
        obs = None
        if "obs" in doc:
            obs = np.frombuffer(base64.b64decode(doc["obs"]), dtype="<f4").astype(np.float32)
        return cls(
            step=int(doc["step"]),
            action=(int(doc["action"][0]), int(doc["action"][1])),
            reward=float(doc["reward"]),
            done=bool(doc["done"]),
            observation=obs,
        )


@dataclass
class DemoSummary:
    mean_episodic_reward: float
    episode_count: int
    miss_count: int
    hit_counts: dict[str, int]


@dataclass
class DemoFile:
    env_config: EnvConfig
    recorder: str
    seed: int
    created: str
    records: list[DemoRecord]
    observations_included: bool

    @property
    def episode_count(self) -> int:
        return sum(1 for r in self.records if r.done)

    def summarize(self) -> DemoSummary:
        returns: list[float] = []
        current = 0.0
        misses = 0
        hits = {"YELLOW": 0, "RED": 0, "BLACK": 0}
        for rec in self.records:
            current += rec.reward
            if rec.reward == -0.01:
                misses += 1
            elif rec.reward == 1.0:
                hits["YELLOW"] += 1
            elif rec.reward == 2.0:
                hits["RED"] += 1
            elif rec.reward == -0.5:
                hits["BLACK"] += 1
            if rec.done:
                returns.append(current)
                current = 0.0
        mean = float(np.mean(returns)) if returns else 0.0
        return DemoSummary(mean, len(returns), misses, hits)

    def save(self, path: str) -> None:
        body_lines = [
            json.dumps(rec.to_json(self.observations_included), sort_keys=True)
            for rec in self.records
        ]
        body = "".join(line + "\n" for line in body_lines)
        header = {
            "format_version": FORMAT_VERSION,
            "env_config": self.env_config.to_json(),
            "recorder": self.recorder,
            "seed": self.seed,
            "created": self.created,
            "episodes": self.episode_count,
            "steps": len(self.records),
            "observations_included": self.observations_included,
            "checksum": hashlib.sha256(body.encode("utf-8")).hexdigest(),
        }
        tmp = path + ".partial"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(header, sort_keys=True) + "\n")
            fh.write(body)
        os.replace(tmp, path)


def load_demo(path: str, regenerate_observations: bool = False) -> DemoFile:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    if not lines:
        raise DemoError("empty demo file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise DemoError(f"unreadable header: {exc}") from exc
    if header.get("format_version") != FORMAT_VERSION:
        raise DemoError(f"unsupported format version {header.get('format_version')!r}")
    body = "".join(lines[1:])
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    if digest != header["checksum"]:
        raise DemoError("checksum mismatch: demo body is corrupted")
    records = [DemoRecord.from_json(json.loads(line)) for line in lines[1:]]
    if len(records) != int(header["steps"]):
        raise DemoError(f"header declares {header['steps']} steps, found {len(records)}")
    demo = DemoFile(
        env_config=EnvConfig.from_json(header["env_config"]),
        recorder=str(header["recorder"]),
        seed=int(header["seed"]),
        created=str(header["created"]),
        records=records,
        observations_included=bool(header["observations_included"]),
    )
    if regenerate_observations and not demo.observations_included:
        _regenerate(demo)
    return demo


class DemoRecorder:
    """Append-only capture tied to one env config; finalize writes the file.

    A trailing unfinished episode is dropped at finalize so every stored
    episode is done-terminated.
    """

    def __init__(
        self,
        config: EnvConfig,
        seed: int,
        recorder_tag: str,
        include_observations: bool = True,
    ):
        self.config = config
        self.seed = seed
        self.recorder_tag = recorder_tag
        self.include_observations = include_observations
        self._records: list[DemoRecord] = []
        self._finalized = False

    def on_step(
        self,
        observation: np.ndarray,
        action: tuple[int, int],
        reward: float,
        done: bool,
    ) -> None:
        if self._finalized:
            raise DemoError("recorder already finalized")
        obs = np.asarray(observation, dtype=np.float32)
        if obs.size != self.config.observation_size:
            raise DemoError(
                f"observation has {obs.size} values; recorder's config wants "
                f"{self.config.observation_size} (configs cannot change mid-stream)"
            )
        self._records.append(
            DemoRecord(
                step=len(self._records),
                action=(int(action[0]), int(action[1])),
                reward=float(reward),
                done=bool(done),
                observation=obs if self.include_observations else None,
            )
        )

    def finalize(self, path: str) -> DemoFile:
        self._finalized = True
        records = list(self._records)
        while records and not records[-1].done:
            records.pop()
        demo = DemoFile(
            env_config=self.config,
            recorder=self.recorder_tag,
            seed=self.seed,
            created=datetime.now(timezone.utc).isoformat(),
            records=records,
            observations_included=self.include_observations,
        )
        demo.save(path)
        return demo


def validate_demo(demo: DemoFile, config: EnvConfig, max_diagnostics: int = 10) -> list[str]:
    """Compatibility and integrity diagnostics; empty list means ok."""
    problems: list[str] = []

    def add(msg: str) -> bool:
        problems.append(msg)
        return len(problems) >= max_diagnostics

    hdr = demo.env_config
    if (hdr.width, hdr.height) != (config.width, config.height):
        if add(
            f"incompatible dimensions: demo recorded at {hdr.width}x{hdr.height}, "
            f"config is {config.width}x{config.height}"
        ):
            return problems
    if hdr.tier != config.tier:
        if add(f"tier mismatch: demo {hdr.tier.value}, config {config.tier.value}"):
            return problems
    if hdr.channels != config.channels:
        if add(f"channel mismatch: demo {hdr.channels}, config {config.channels}"):
            return problems

    legal = set(hdr.legal_rewards())
    open_episode = False
    for rec in demo.records:
        x, y = rec.action
        if not (0 <= x < hdr.width and 0 <= y < hdr.height):
            if add(f"record {rec.step}: action ({x},{y}) out of range"):
                return problems
        if rec.reward not in legal:
            if add(f"record {rec.step}: reward {rec.reward} not in tier's reward set"):
                return problems
        if rec.observation is not None and rec.observation.size != hdr.observation_size:
            if add(f"record {rec.step}: observation length {rec.observation.size}"):
                return problems
        open_episode = not rec.done
    if open_episode:
        add("trailing episode is not done-terminated")
    return problems


def replay_check(demo: DemoFile) -> list[str]:
    """Replay stored actions on a fresh env; report reward mismatches."""
    problems = []
    env = BirdHuntEnv(demo.env_config)
    env.reset(seed=demo.seed)
    for rec in demo.records:
        res = env.step(rec.action)
        if res.reward != rec.reward:
            problems.append(
                f"record {rec.step}: stored reward {rec.reward!r}, replay got {res.reward!r}"
            )
            if len(problems) >= 10:
                return problems
        if res.done != rec.done:
            problems.append(f"record {rec.step}: stored done {rec.done}, replay got {res.done}")
            if len(problems) >= 10:
                return problems
        if res.done:
            env.begin_episode()
    return problems


def _regenerate(demo: DemoFile) -> None:
    env = BirdHuntEnv(demo.env_config)
    obs = env.reset(seed=demo.seed)
    for rec in demo.records:
        rec.observation = obs
        res = env.step(rec.action)
        obs = env.begin_episode() if res.done else res.observation
    demo.observations_included = True


def record_oracle(
    config: EnvConfig,
    seed: int,
    epsilon: float,
    episodes: int,
    path: str,
    recorder_tag: str | None = None,
    include_observations: bool = True,
) -> DemoFile:
    """Roll the scripted demonstrator and store the session."""
    tag = recorder_tag or f"oracle-eps{epsilon:g}"
    env_seed, oracle_seed = (
        int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(2)
    )
    env = BirdHuntEnv(config)
    obs = env.reset(seed=env_seed)
    policy = OraclePolicy(epsilon, seed=oracle_seed, config=config)
    recorder = DemoRecorder(config, env_seed, tag, include_observations)
    for _ in range(episodes):
        done = False
        while not done:
            action = policy.act(env.state)
            res = env.step(action)
            recorder.on_step(obs, action, res.reward, res.done)
            done = res.done
            obs = env.begin_episode() if done else res.observation
    return recorder.finalize(path)
