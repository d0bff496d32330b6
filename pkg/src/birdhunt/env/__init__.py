from .config import EnvConfig, EnvConfigError, SpawnSpec, Species, Tier, SPECIES_COLORS
from .core import (
    Bird,
    BirdHuntEnv,
    EnvState,
    StepInfo,
    StepResult,
    ammo_transition,
    reward_set,
)
from .oracle import OraclePolicy, oracle_policy
from .render import render_observation

__all__ = [
    "Bird",
    "BirdHuntEnv",
    "EnvConfig",
    "EnvConfigError",
    "EnvState",
    "OraclePolicy",
    "SPECIES_COLORS",
    "SpawnSpec",
    "Species",
    "StepInfo",
    "StepResult",
    "Tier",
    "ammo_transition",
    "oracle_policy",
    "render_observation",
    "reward_set",
]
