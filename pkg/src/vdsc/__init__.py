"""Exploration timing from value discrepancy and hashed state counts."""

from .agent import QTable
from .config import ConfigError, ExperimentConfig, load_config
from .envs import DeepSea, GridWorld, RiverSwim, make_env
from .harness import aggregate, run_ablation, run_experiment, run_seed, run_trace
from .hashing import HashCountTable, SimHash
from .homeostasis import Homeostat
from .strategies import DecaySchedule, StrategyContext, Vdsc
from .vpd import VpdTracker

__all__ = [
    "ConfigError",
    "DecaySchedule",
    "DeepSea",
    "ExperimentConfig",
    "GridWorld",
    "HashCountTable",
    "Homeostat",
    "QTable",
    "RiverSwim",
    "SimHash",
    "StrategyContext",
    "Vdsc",
    "VpdTracker",
    "aggregate",
    "load_config",
    "make_env",
    "run_ablation",
    "run_experiment",
    "run_seed",
    "run_trace",
]
