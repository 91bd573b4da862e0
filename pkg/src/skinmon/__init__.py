"""Distributed skin-wound monitoring over a simulated body-area sensor network."""

from .engine import MetricsSeries, RoundMetrics, SimState, build_topology, init_state, run, step_round
from .types import ConfigError, Location, Scheme, SimConfig

__all__ = [
    "ConfigError",
    "Location",
    "MetricsSeries",
    "RoundMetrics",
    "Scheme",
    "SimConfig",
    "SimState",
    "build_topology",
    "init_state",
    "run",
    "step_round",
]

__version__ = "0.1.0"
