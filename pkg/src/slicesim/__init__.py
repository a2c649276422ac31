"""System-level RBG slicing simulator with a discrete soft actor-critic controller."""

__version__ = "0.1.0"

from .config import EnvParams, default_config, env_params, load_config, sac_params
from .env import SliceEnv, StepOutcome
from .errors import (
    CheckpointError,
    ConfigError,
    InfeasibleLayoutError,
    SliceSimError,
)
from .reward import QosTargets, RewardBreakdown, clamp_reward, total_reward
from .sac import DiscreteSAC, SacParams

__all__ = [
    "CheckpointError",
    "ConfigError",
    "DiscreteSAC",
    "EnvParams",
    "InfeasibleLayoutError",
    "QosTargets",
    "RewardBreakdown",
    "SacParams",
    "SliceEnv",
    "SliceSimError",
    "StepOutcome",
    "clamp_reward",
    "default_config",
    "env_params",
    "load_config",
    "sac_params",
    "total_reward",
    "__version__",
]
