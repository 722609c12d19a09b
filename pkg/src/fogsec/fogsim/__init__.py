"""Discrete-event simulation of the four-layer fog architecture."""
from .core import (LAYERS, AuthError, ByteLedger, Entity, LayerViolation, Message, ScenarioAssertionError,
                   SimulationError, Simulator, TopologyError, allow_all)
from .protocols import PROTOCOLS, secret_leaks
from .scenario import (Scenario, ScenarioResult, UnknownScenarioError, build_topology, builtin_names,
                       load_scenario, run_scenario)

__all__ = [
    "LAYERS", "AuthError", "ByteLedger", "Entity", "LayerViolation", "Message", "ScenarioAssertionError",
    "SimulationError", "Simulator", "TopologyError", "allow_all", "PROTOCOLS", "secret_leaks", "Scenario",
    "ScenarioResult", "UnknownScenarioError", "build_topology", "builtin_names", "load_scenario",
    "run_scenario",
]
