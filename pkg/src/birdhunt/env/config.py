"""Environment configuration: tiers, geometry, spawn distributions, serialization.

A config document is self-describing: it carries the species color table and
spawn parameters so demo files recorded against it can be replayed anywhere.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace
from typing import Any


class Tier(str, enum.Enum):
    LOW = "LOW"
    MEDIUM = "MEDIUM"
    HIGH = "HIGH"


class Species(str, enum.Enum):
    YELLOW = "YELLOW"
    RED = "RED"
    BLACK = "BLACK"


# Nominal RGB fill colors. BLACK birds additionally get a 0.1-gray outline so
# they stay visible on dark backdrop pixels.
SPECIES_COLORS: dict[Species, tuple[float, float, float]] = {
    Species.YELLOW: (1.0, 1.0, 0.0),
    Species.RED: (1.0, 0.0, 0.0),
    Species.BLACK: (0.0, 0.0, 0.0),
}

BLACK_OUTLINE_GRAY = 0.1

# Rewards per outcome (LOW/MEDIUM use only the YELLOW and MISS entries).
REWARD_HIT_YELLOW = 1.0
REWARD_HIT_RED = 2.0
REWARD_HIT_BLACK = -0.5
REWARD_MISS = -0.01
REWARD_RELOADING = 0.0


class EnvConfigError(ValueError):
    """Raised when an environment config violates its invariants."""


@dataclass(frozen=True)
class SpawnSpec:
    """Gaussian spawn location for one species, as fractions of (width, height)."""

    mean_x: float
    mean_y: float
    std_x: float
    std_y: float

    def to_json(self) -> dict[str, float]:
        return {
            "mean_x": self.mean_x,
            "mean_y": self.mean_y,
            "std_x": self.std_x,
            "std_y": self.std_y,
        }

    @classmethod
    def from_json(cls, doc: dict[str, float]) -> "SpawnSpec":
        return cls(doc["mean_x"], doc["mean_y"], doc["std_x"], doc["std_y"])


def _default_spawns(tier: Tier) -> dict[Species, SpawnSpec]:
    if tier is Tier.HIGH:
        # Concentrated per-species spots: this is what lets a policy camp
        # "average spawn locations" instead of tracking birds.
        return {
            Species.YELLOW: SpawnSpec(0.35, 0.40, 0.10, 0.10),
            Species.RED: SpawnSpec(0.68, 0.32, 0.08, 0.08),
            Species.BLACK: SpawnSpec(0.50, 0.72, 0.10, 0.10),
        }
    return {Species.YELLOW: SpawnSpec(0.50, 0.45, 0.22, 0.22)}


@dataclass(frozen=True)
class EnvConfig:
    """Full environment description for one tier of the bird-hunter game."""

    tier: Tier = Tier.LOW
    width: int = 50
    height: int = 50
    channels: int = 0  # 0 = derive from tier (LOW -> 1, MEDIUM/HIGH -> 3)
    clip_size: int = 3
    t_reload: int = 2
    max_episode_steps: int = 200
    spawn_seed: int = 0
    bird_speed: float = -1.0  # <0 = derive: 0.0075 * min(width, height)
    bird_extent: float = -1.0  # <0 = derive: 2.0 * min(width, height) / 50
    show_crosshair: bool = True
    spawns: dict[Species, SpawnSpec] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "tier", Tier(self.tier))
        if self.channels == 0:
            object.__setattr__(self, "channels", 1 if self.tier is Tier.LOW else 3)
        if self.bird_speed < 0:
            object.__setattr__(self, "bird_speed", 0.0075 * min(self.width, self.height))
        if self.bird_extent < 0:
            object.__setattr__(self, "bird_extent", 2.0 * min(self.width, self.height) / 50.0)
        if not self.spawns:
            object.__setattr__(self, "spawns", _default_spawns(self.tier))
        else:
            object.__setattr__(
                self, "spawns", {Species(k): v for k, v in self.spawns.items()}
            )
        self.validate()

    def validate(self) -> None:
        if self.width < 4 or self.height < 4:
            raise EnvConfigError(
                f"board must be at least 4x4, got {self.width}x{self.height}"
            )
        if self.channels not in (1, 3):
            raise EnvConfigError(f"channels must be 1 or 3, got {self.channels}")
        if self.tier is Tier.LOW and self.channels != 1:
            raise EnvConfigError("LOW tier is grayscale: channels must be 1")
        if self.tier in (Tier.MEDIUM, Tier.HIGH) and self.channels != 3:
            raise EnvConfigError(f"{self.tier.value} tier requires channels=3")
        if self.tier is Tier.HIGH:
            if self.clip_size < 1:
                raise EnvConfigError(f"clip_size must be >= 1, got {self.clip_size}")
            if self.t_reload < 1:
                raise EnvConfigError(f"t_reload must be >= 1, got {self.t_reload}")
        if self.max_episode_steps < 1:
            raise EnvConfigError("max_episode_steps must be >= 1")
        if self.bird_extent <= 0:
            raise EnvConfigError("bird_extent must be positive")
        if self.bird_extent >= min(self.width, self.height) / 2 - 0.5:
            raise EnvConfigError("bird_extent too large for the board")
        for species in self.species_set():
            if species not in self.spawns:
                raise EnvConfigError(f"missing spawn spec for {species.value}")
        if self.tier is not Tier.HIGH:
            extra = set(self.spawns) - {Species.YELLOW}
            if extra:
                raise EnvConfigError(
                    f"only YELLOW birds exist in {self.tier.value} tier, got {sorted(s.value for s in extra)}"
                )

    def species_set(self) -> tuple[Species, ...]:
        """Species that can appear in this tier (RED is schedule-gated in HIGH)."""
        if self.tier is Tier.HIGH:
            return (Species.YELLOW, Species.RED, Species.BLACK)
        return (Species.YELLOW,)

    @property
    def observation_size(self) -> int:
        return self.width * self.height * self.channels

    def legal_rewards(self) -> tuple[float, ...]:
        if self.tier is Tier.HIGH:
            return (
                REWARD_HIT_YELLOW,
                REWARD_HIT_RED,
                REWARD_MISS,
                REWARD_HIT_BLACK,
                REWARD_RELOADING,
            )
        return (REWARD_HIT_YELLOW, REWARD_MISS)

    def with_updates(self, **kwargs: Any) -> "EnvConfig":
        return replace(self, **kwargs)

    def to_json(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "tier": self.tier.value,
            "width": self.width,
            "height": self.height,
            "channels": self.channels,
            "max_episode_steps": self.max_episode_steps,
            "spawn_seed": self.spawn_seed,
            "bird_speed": self.bird_speed,
            "bird_extent": self.bird_extent,
            "show_crosshair": self.show_crosshair,
            "spawns": {s.value: spec.to_json() for s, spec in self.spawns.items()},
            "colors": {s.value: list(c) for s, c in SPECIES_COLORS.items()},
        }
        if self.tier is Tier.HIGH:
            doc["clip_size"] = self.clip_size
            doc["t_reload"] = self.t_reload
        return doc

    @classmethod
    def from_json(cls, doc: dict[str, Any]) -> "EnvConfig":
        try:
            spawns = {
                Species(name): SpawnSpec.from_json(spec)
                for name, spec in doc.get("spawns", {}).items()
            }
            return cls(
                tier=Tier(doc["tier"]),
                width=int(doc["width"]),
                height=int(doc["height"]),
                channels=int(doc.get("channels", 0)),
                clip_size=int(doc.get("clip_size", 3)),
                t_reload=int(doc.get("t_reload", 2)),
                max_episode_steps=int(doc.get("max_episode_steps", 200)),
                spawn_seed=int(doc.get("spawn_seed", 0)),
                bird_speed=float(doc.get("bird_speed", -1.0)),
                bird_extent=float(doc.get("bird_extent", -1.0)),
                show_crosshair=bool(doc.get("show_crosshair", True)),
                spawns=spawns,
            )
        except KeyError as exc:
            raise EnvConfigError(f"config document missing field: {exc}") from exc

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path: str) -> "EnvConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))
