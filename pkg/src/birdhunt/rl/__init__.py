from .gae import compute_gae
from .policy import CategoricalPolicy, PolicyNets
from .ppo import PPOConfig, PPOStats, per_sample_surrogate, ppo_update
from .replay import ReplayBuffer
from .rollout import Trajectory, run_rollouts
from .sac import SACConfig, SACNets, SACStats, sac_update

__all__ = [
    "CategoricalPolicy",
    "PPOConfig",
    "PPOStats",
    "PolicyNets",
    "ReplayBuffer",
    "SACConfig",
    "SACNets",
    "SACStats",
    "Trajectory",
    "compute_gae",
    "per_sample_surrogate",
    "ppo_update",
    "run_rollouts",
    "sac_update",
]
