"""Room-world benchmark with an exact optimal-exploitation oracle.

The oracle re-solves a small orienteering problem over the agent's
accumulated knowledge after every interaction, which splits the return gap
into an exploration part and an exploitation part.
"""

from .episode import (
    History,
    Observation,
    Trajectory,
    legal_actions,
    reset,
    run_episode,
    step,
)
from .harness import RunConfig, replay, report, run_experiment
from .kernels import BACKEND
from .metrics import GapReport, decompose, summarize_run
from .oracle import ExploitSolution, KnowledgeGraph, build_graph, exploit_series, solve
from .worldgen import (
    Ball,
    Door,
    ObjectRef,
    WorldSpec,
    generate_maze,
    generate_treasure_rooms,
    load_world,
    save_world,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Ball",
    "Door",
    "ExploitSolution",
    "GapReport",
    "History",
    "KnowledgeGraph",
    "ObjectRef",
    "Observation",
    "RunConfig",
    "Trajectory",
    "WorldSpec",
    "build_graph",
    "decompose",
    "exploit_series",
    "generate_maze",
    "generate_treasure_rooms",
    "legal_actions",
    "load_world",
    "replay",
    "report",
    "reset",
    "run_episode",
    "run_experiment",
    "save_world",
    "solve",
    "step",
    "summarize_run",
    "__version__",
]
