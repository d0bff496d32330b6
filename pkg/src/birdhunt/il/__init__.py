from .bc import BCConfig, BCStats, bc_update, demo_arrays
from .compose import (
    BCTrainer,
    PPOTrainer,
    SACTrainer,
    TrainerMode,
    compose_trainer,
)
from .gail import (
    GAILConfig,
    GAILRewardMixer,
    GAILStats,
    default_discriminator_spec,
    disc_inputs,
    gail_discriminator_update,
    gail_reward,
    intrinsic_reward,
)

__all__ = [
    "BCConfig",
    "BCStats",
    "BCTrainer",
    "GAILConfig",
    "GAILRewardMixer",
    "GAILStats",
    "PPOTrainer",
    "SACTrainer",
    "TrainerMode",
    "bc_update",
    "compose_trainer",
    "default_discriminator_spec",
    "demo_arrays",
    "disc_inputs",
    "gail_discriminator_update",
    "gail_reward",
    "intrinsic_reward",
]
