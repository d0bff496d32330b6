"""Simulation core: birds, episode state machine, ammunition schedule.

One step = move the crosshair to the commanded pixel, fire if ammunition
allows, score the shot against the bird hitboxes, then drift the birds.
Episodes end on any hit or at the step cap. All randomness flows through the
per-instance generator so a (config, seed, action sequence) triple replays
bit-identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import (
    REWARD_HIT_BLACK,
    REWARD_HIT_RED,
    REWARD_HIT_YELLOW,
    REWARD_MISS,
    REWARD_RELOADING,
    EnvConfig,
    Species,
    Tier,
)
from .render import render_observation

HIT_REWARDS = {
    Species.YELLOW: REWARD_HIT_YELLOW,
    Species.RED: REWARD_HIT_RED,
    Species.BLACK: REWARD_HIT_BLACK,
}

OUTCOME_MISS = "MISS"
OUTCOME_RELOADING = "RELOADING"


def reward_set(config: EnvConfig) -> tuple[float, ...]:
    return config.legal_rewards()


def ammo_transition(ammo_prev: int, t: int, clip_size: int, t_reload: int) -> int:
    """Ammunition after global step t, given ammo before the step.

    Decrements while rounds remain (the shooter fires whenever it can),
    refills to a full clip when t lands on a reload boundary, and is empty
    otherwise. Pure function; t is the run-global step counter.
    """
    if not 0 <= ammo_prev <= clip_size:
        raise ValueError(f"ammo_prev={ammo_prev} outside [0, {clip_size}]")
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    if ammo_prev > 0:
        return ammo_prev - 1
    if t % (clip_size + t_reload) == 0:
        return clip_size
    return 0


@dataclass
class Bird:
    species: Species
    x: float
    y: float
    dx: float
    dy: float
    extent: float

    def contains(self, px: int, py: int) -> bool:
        return abs(px - self.x) <= self.extent and abs(py - self.y) <= self.extent


@dataclass
class StepInfo:
    outcome: str  # species name, "MISS", or "RELOADING"
    ammo_after: int | None


@dataclass
class StepResult:
    observation: np.ndarray
    reward: float
    done: bool
    info: StepInfo


@dataclass
class EnvState:
    birds: list[Bird]
    crosshair_x: int
    crosshair_y: int
    ammo: int
    t: int
    yellow_hits_total: int
    episode_step: int
    rng: np.random.Generator = field(repr=False, default=None)


class BirdHuntEnv:
    """Deterministic, seedable bird-hunter game in three complexity tiers."""

    def __init__(self, config: EnvConfig):
        self.config = config
        self.state: EnvState | None = None

    # -- lifecycle ---------------------------------------------------------

    def reset(self, seed: int | None = None) -> np.ndarray:
        """Start a fresh run: new RNG stream, t=0, full clip, first episode."""
        if seed is None:
            seed = self.config.spawn_seed
        self.state = EnvState(
            birds=[],
            crosshair_x=self.config.width // 2,
            crosshair_y=self.config.height // 2,
            ammo=self.config.clip_size if self.config.tier is Tier.HIGH else 0,
            t=0,
            yellow_hits_total=0,
            episode_step=0,
            rng=np.random.default_rng(seed),
        )
        self._spawn_episode_birds()
        return self.observe()

    def begin_episode(self) -> np.ndarray:
        """Start the next episode of the current run.

        The global step counter, ammunition chain, yellow-hit counter, and RNG
        stream all continue; only the per-episode state is re-drawn.
        """
        state = self._require_state()
        state.episode_step = 0
        state.crosshair_x = self.config.width // 2
        state.crosshair_y = self.config.height // 2
        self._spawn_episode_birds()
        return self.observe()

    def observe(self) -> np.ndarray:
        return render_observation(self._require_state(), self.config)

    # -- stepping ----------------------------------------------------------

    def step(self, action: tuple[int, int]) -> StepResult:
        state = self._require_state()
        cfg = self.config
        ax, ay = int(action[0]), int(action[1])
        if not (0 <= ax < cfg.width and 0 <= ay < cfg.height):
            raise ValueError(
                f"action ({ax},{ay}) outside [0,{cfg.width})x[0,{cfg.height})"
            )

        state.t += 1
        state.episode_step += 1
        state.crosshair_x = ax
        state.crosshair_y = ay

        if cfg.tier is Tier.HIGH:
            fires = state.ammo > 0
            state.ammo = ammo_transition(state.ammo, state.t, cfg.clip_size, cfg.t_reload)
            ammo_after: int | None = state.ammo
        else:
            fires = True
            ammo_after = None

        done = False
        if fires:
            hit = self._hit_bird(ax, ay)
            if hit is not None:
                reward = HIT_REWARDS[hit.species]
                outcome = hit.species.value
                if hit.species is Species.YELLOW:
                    state.yellow_hits_total += 1
                state.birds.remove(hit)
                done = True
            else:
                reward = REWARD_MISS
                outcome = OUTCOME_MISS
        else:
            reward = REWARD_RELOADING
            outcome = OUTCOME_RELOADING

        if state.episode_step >= cfg.max_episode_steps:
            done = True

        self._drift_birds()
        return StepResult(self.observe(), reward, done, StepInfo(outcome, ammo_after))

    # -- internals ---------------------------------------------------------

    def _require_state(self) -> EnvState:
        if self.state is None:
            raise RuntimeError("environment not reset")
        return self.state

    def _hit_bird(self, px: int, py: int) -> Bird | None:
        """Bird containing the shot pixel; nearest center wins on overlap."""
        state = self._require_state()
        best: Bird | None = None
        best_d2 = float("inf")
        for bird in state.birds:
            if bird.contains(px, py):
                d2 = (px - bird.x) ** 2 + (py - bird.y) ** 2
                if d2 < best_d2:
                    best, best_d2 = bird, d2
        return best

    def _episode_species(self) -> list[Species]:
        cfg = self.config
        state = self._require_state()
        if cfg.tier is not Tier.HIGH:
            return [Species.YELLOW]
        species = [Species.YELLOW, Species.BLACK]
        # Bonus bird: in the spawn set while the yellow-hit total is a
        # positive even number (i.e. right after every second yellow hit).
        if state.yellow_hits_total >= 2 and state.yellow_hits_total % 2 == 0:
            species.insert(1, Species.RED)
        return species

    def _spawn_episode_birds(self) -> None:
        state = self._require_state()
        state.birds = [self._spawn_bird(s) for s in self._episode_species()]

    def _spawn_bird(self, species: Species) -> Bird:
        cfg = self.config
        state = self._require_state()
        spec = cfg.spawns[species]
        margin = cfg.bird_extent + 0.5
        lo_x, hi_x = margin, cfg.width - 1 - margin
        lo_y, hi_y = margin, cfg.height - 1 - margin
        x = state.rng.normal(spec.mean_x * cfg.width, spec.std_x * cfg.width)
        y = state.rng.normal(spec.mean_y * cfg.height, spec.std_y * cfg.height)
        x = float(np.clip(x, lo_x, hi_x))
        y = float(np.clip(y, lo_y, hi_y))
        angle = state.rng.uniform(0.0, 2.0 * np.pi)
        return Bird(
            species=species,
            x=x,
            y=y,
            dx=cfg.bird_speed * float(np.cos(angle)),
            dy=cfg.bird_speed * float(np.sin(angle)),
            extent=cfg.bird_extent,
        )

    def _drift_birds(self) -> None:
        """Constant-velocity drift; velocity reflects so hitboxes stay on-screen."""
        cfg = self.config
        state = self._require_state()
        margin = cfg.bird_extent + 0.5
        for bird in state.birds:
            bird.x += bird.dx
            bird.y += bird.dy
            if bird.x < margin:
                bird.x = 2 * margin - bird.x
                bird.dx = -bird.dx
            elif bird.x > cfg.width - 1 - margin:
                bird.x = 2 * (cfg.width - 1 - margin) - bird.x
                bird.dx = -bird.dx
            if bird.y < margin:
                bird.y = 2 * margin - bird.y
                bird.dy = -bird.dy
            elif bird.y > cfg.height - 1 - margin:
                bird.y = 2 * (cfg.height - 1 - margin) - bird.y
                bird.dy = -bird.dy
