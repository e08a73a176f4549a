"""Exact optimal-exploitation oracle.

Builds the knowledge graph from an agent's history and solves the budgeted
prize-collecting (orienteering) instance over it: pick an ordered set of at
most three known balls whose shortest-path travel cost over traversed doors
stays within the door budget, maximizing collected reward.
"""

from dataclasses import dataclass
from typing import Dict, List, Set, Tuple

import numpy as np

from . import kernels
from .worldgen import Ball, Door, WorldSpec, adjacency

UNREACHABLE = -1


class HistoryError(ValueError):
    pass


@dataclass
class KnowledgeGraph:
    start: str
    visited_rooms: Set[str]
    traversed_doors: Set[Door]
    observed_balls: Set[Ball]
    version: int = 0  # bumped on every actual change; lets callers cache

    @classmethod
    def empty(cls, world: WorldSpec) -> "KnowledgeGraph":
        return cls(world.start_room, {world.start_room}, set(), set())

    def copy(self) -> "KnowledgeGraph":
        return KnowledgeGraph(
            self.start,
            set(self.visited_rooms),
            set(self.traversed_doors),
            set(self.observed_balls),
            self.version,
        )

    def add_room(self, rid: str) -> None:
        if rid not in self.visited_rooms:
            self.visited_rooms.add(rid)
            self.version += 1

    def add_door(self, door: Door) -> None:
        if door not in self.traversed_doors:
            self.traversed_doors.add(door)
            self.version += 1

    def add_ball(self, ball: Ball) -> None:
        if ball not in self.observed_balls:
            self.observed_balls.add(ball)
            self.version += 1

    def observe(self, world: WorldSpec, observation) -> None:
        """Fold one observation into the graph."""
        if observation.room not in world.rooms:
            raise HistoryError(f"unknown room {observation.room}")
        self.add_room(observation.room)
        for ref in observation.visible:
            if ref.kind == "ball":
                self.add_ball(world.ball_by_color(ref.color))

    def record_action(self, world: WorldSpec, action) -> None:
        if action.kind == "door":
            self.add_door(world.door_by_color(action.color))


@dataclass(frozen=True)
class OrienteeringInstance:
    colors: Tuple[str, ...]  # ball colors, node i+1 <-> colors[i]
    prizes: Tuple[int, ...]
    costs: Tuple[int, ...]  # row-major (n+1)^2, UNREACHABLE if no path
    budget: int
    cap: int = 3


@dataclass(frozen=True)
class ExploitSolution:
    value: int
    path: Tuple[str, ...]  # ball colors in collection order
    cost_used: int


def build_graph(history, world: WorldSpec) -> KnowledgeGraph:
    graph = KnowledgeGraph.empty(world)
    for traj in history.trajectories:
        for obs, action, _reward in traj.events:
            graph.observe(world, obs)
            graph.record_action(world, action)
        graph.observe(world, traj.final_observation)
    return graph


def shortest_costs(graph: KnowledgeGraph, world: WorldSpec) -> OrienteeringInstance:
    """All-pairs door-traversal costs over {start} + observed balls."""
    balls = sorted(graph.observed_balls, key=lambda b: b.color)
    rooms = sorted(graph.visited_rooms)
    index = {r: i for i, r in enumerate(rooms)}

    # CSR adjacency over traversed doors only.
    adj = adjacency(rooms, [d for d in graph.traversed_doors])
    offsets = [0]
    neighbors = []
    for r in rooms:
        neighbors.extend(index[nb] for _, nb in adj[r])
        offsets.append(len(neighbors))
    offsets = np.asarray(offsets, dtype=np.int64)
    neighbors = np.asarray(neighbors, dtype=np.int64)

    node_rooms = [graph.start] + [b.room for b in balls]
    n = len(node_rooms)
    dist_rows: Dict[str, List[int]] = {}
    for room in set(node_rooms):
        dist_rows[room] = kernels.bfs_from(len(rooms), offsets, neighbors, index[room])

    costs = [0] * (n * n)
    for i, a in enumerate(node_rooms):
        row = dist_rows[a]
        for j, b in enumerate(node_rooms):
            costs[i * n + j] = row[index[b]]
    return OrienteeringInstance(
        colors=tuple(b.color for b in balls),
        prizes=tuple(b.reward for b in balls),
        costs=tuple(costs),
        budget=world.door_budget,
        cap=world.max_balls_per_episode,
    )


def solve_orienteering(instance: OrienteeringInstance) -> ExploitSolution:
    n = len(instance.prizes)
    if n == 0:
        return ExploitSolution(0, (), 0)
    if n <= kernels.MAX_COMPILED_NODES:
        solver = kernels.best_orienteering
        costs = np.asarray(instance.costs, dtype=np.int64)
        prizes = np.asarray(instance.prizes, dtype=np.int64)
    else:
        solver = kernels.pure_best_orienteering
        costs, prizes = instance.costs, instance.prizes
    value, path, cost = solver(costs, prizes, instance.budget, instance.cap)
    return ExploitSolution(
        int(value), tuple(instance.colors[j - 1] for j in path), int(cost)
    )


def solve(graph: KnowledgeGraph, world: WorldSpec) -> ExploitSolution:
    return solve_orienteering(shortest_costs(graph, world))


def compute_r_max(world: WorldSpec) -> int:
    """Oracle value under full knowledge of the world."""
    graph = KnowledgeGraph(
        world.start_room, set(world.rooms), set(world.doors), set(world.balls)
    )
    return solve(graph, world).value


def exploit_series(history, world: WorldSpec, granularity="per_episode") -> List[int]:
    """Oracle value after each knowledge prefix; nondecreasing."""
    if granularity not in ("per_episode", "per_interaction"):
        raise ValueError(f"unknown granularity {granularity!r}")
    graph = KnowledgeGraph.empty(world)
    series = []
    cached_version = -1
    cached_value = 0
    for traj in history.trajectories:
        for t, (obs, action, _reward) in enumerate(traj.events):
            graph.observe(world, obs)
            graph.record_action(world, action)
            # Knowledge after an interaction includes the observation the
            # environment returned for it.
            if t + 1 < len(traj.events):
                graph.observe(world, traj.events[t + 1][0])
            else:
                graph.observe(world, traj.final_observation)
            if granularity == "per_interaction":
                if graph.version != cached_version:
                    cached_value = solve(graph, world).value
                    cached_version = graph.version
                series.append(cached_value)
        graph.observe(world, traj.final_observation)
        if granularity == "per_episode":
            if graph.version != cached_version:
                cached_value = solve(graph, world).value
                cached_version = graph.version
            series.append(cached_value)
    return series
