"""Gap decomposition and run statistics.

The total return gap splits exactly into an exploration part (information
never gathered) and an exploitation part (reward sacrificed relative to the
agent's own knowledge): total = explore + exploit.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from . import oracle
from .episode import History
from .worldgen import WorldSpec


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class GapReport:
    scope: str  # "last_episode" or "mean_over_episodes"
    total_gap: float
    exploit_gap: float
    explore_gap: float
    norm_total: float
    norm_exploit: float
    norm_explore: float


def decompose(r_max, r_exploit, r_agent, scope="last_episode") -> GapReport:
    if not r_max >= r_exploit >= 0 or r_agent > r_exploit:
        raise MetricError(
            f"ordering violated: r_max={r_max}, r_exploit={r_exploit}, "
            f"r_agent={r_agent} (oracle bug?)"
        )
    total = r_max - r_agent
    explore = r_max - r_exploit
    exploit = r_exploit - r_agent
    scale = r_max if r_max > 0 else 1
    return GapReport(
        scope=scope,
        total_gap=total,
        exploit_gap=exploit,
        explore_gap=explore,
        norm_total=total / scale,
        norm_exploit=exploit / scale,
        norm_explore=explore / scale,
    )


def mean_gap_report(per_episode: Sequence[GapReport]) -> GapReport:
    """Arithmetic mean of per-episode reports (not gaps of mean returns)."""
    n = len(per_episode)
    if n == 0:
        raise MetricError("no episode reports")

    def avg(attr):
        return sum(getattr(g, attr) for g in per_episode) / n

    return GapReport(
        scope="mean_over_episodes",
        total_gap=avg("total_gap"),
        exploit_gap=avg("exploit_gap"),
        explore_gap=avg("explore_gap"),
        norm_total=avg("norm_total"),
        norm_exploit=avg("norm_exploit"),
        norm_explore=avg("norm_explore"),
    )


def coverage(history: History, world: WorldSpec) -> float:
    """Percent of rooms ever visited; the start room always counts."""
    graph = oracle.build_graph(history, world)
    return 100.0 * len(graph.visited_rooms) / len(world.rooms)


def redundancy(history: History) -> float:
    """Fraction of repeated (state, action) pairs across the whole history.

    The state is the room the agent acts from; which objects happened to be
    visible is an observation detail, not part of the state.
    """
    pairs = []
    for traj in history.trajectories:
        for obs, action, _reward in traj.events:
            pairs.append((obs.room, action))
    if not pairs:
        raise MetricError("history has no interactions")
    return 1.0 - len(set(pairs)) / len(pairs)


def sample_efficiency(series: Sequence[float]) -> int:
    """First 1-based interaction index reaching 90% of the series maximum."""
    if not series:
        raise MetricError("empty exploitation series")
    threshold = 0.9 * max(series)
    for t, value in enumerate(series, start=1):
        if value >= threshold:
            return t
    raise MetricError("unreachable: max never attained")  # pragma: no cover


@dataclass
class RunSummary:
    model: str
    instruction: str
    env_kind: str
    dims: str
    seed: int
    r_max: int
    exploit_return_final: int
    agent_return_mean: float
    agent_return_final: int
    last: GapReport
    mean: GapReport
    coverage_pct: float
    redundancy: float
    sample_efficiency: int
    invalid_actions: int
    episodes: int
    interactions: int

    def to_row(self) -> Dict[str, object]:
        return {
            "model": self.model,
            "instruction": self.instruction,
            "env_kind": self.env_kind,
            "dims": self.dims,
            "seed": self.seed,
            "r_max": self.r_max,
            "exploit_return_final": self.exploit_return_final,
            "agent_return_mean": self.agent_return_mean,
            "agent_return_final": self.agent_return_final,
            "last_total_gap": self.last.norm_total,
            "last_exploit_gap": self.last.norm_exploit,
            "last_explore_gap": self.last.norm_explore,
            "mean_total_gap": self.mean.norm_total,
            "mean_exploit_gap": self.mean.norm_exploit,
            "mean_explore_gap": self.mean.norm_explore,
            "coverage_pct": self.coverage_pct,
            "redundancy": self.redundancy,
            "sample_efficiency": self.sample_efficiency,
            "invalid_actions": self.invalid_actions,
            "episodes": self.episodes,
            "interactions": self.interactions,
        }


SUMMARY_COLUMNS = [
    "model", "instruction", "env_kind", "dims", "seed", "r_max",
    "exploit_return_final", "agent_return_mean", "agent_return_final",
    "last_total_gap", "last_exploit_gap", "last_explore_gap",
    "mean_total_gap", "mean_exploit_gap", "mean_explore_gap",
    "coverage_pct", "redundancy", "sample_efficiency", "invalid_actions",
    "episodes", "interactions",
]


def summarize_run(
    history: History,
    world: WorldSpec,
    model: str,
    instruction: str,
    seed: int,
    invalid_actions: int = 0,
    interaction_series: Optional[List[int]] = None,
) -> RunSummary:
    per_episode_exploit = oracle.exploit_series(history, world, "per_episode")
    if interaction_series is None:
        interaction_series = oracle.exploit_series(history, world, "per_interaction")
    returns = [t.episode_return for t in history.trajectories]
    reports = [
        decompose(world.r_max, ex, ret)
        for ex, ret in zip(per_episode_exploit, returns)
    ]
    rows, cols = world.grid_dims
    return RunSummary(
        model=model,
        instruction=instruction,
        env_kind=world.kind,
        dims=f"{rows}x{cols}",
        seed=seed,
        r_max=world.r_max,
        exploit_return_final=per_episode_exploit[-1],
        agent_return_mean=sum(returns) / len(returns),
        agent_return_final=returns[-1],
        last=reports[-1],
        mean=mean_gap_report(reports),
        coverage_pct=coverage(history, world),
        redundancy=redundancy(history),
        sample_efficiency=sample_efficiency(interaction_series),
        invalid_actions=invalid_actions,
        episodes=len(history),
        interactions=len(interaction_series),
    )


def _mean_se(values: Sequence[float]):
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var) / math.sqrt(n)


AGGREGATE_FIELDS = [
    "r_max", "exploit_return_final", "agent_return_mean", "agent_return_final",
    "last_total_gap", "last_exploit_gap", "last_explore_gap",
    "mean_total_gap", "mean_exploit_gap", "mean_explore_gap",
    "coverage_pct", "redundancy", "sample_efficiency", "invalid_actions",
]


def aggregate(rows: Sequence[Dict[str, object]], group_keys: Sequence[str]):
    """Group rows and report mean plus standard error for every metric.

    Gap fractions (each gap's share of the total) are derived from the group
    means, mirroring the parenthetical table layout.
    """
    if not rows:
        raise MetricError("no rows to aggregate")
    groups: Dict[tuple, List[Dict[str, object]]] = {}
    for row in rows:
        key = tuple(row[k] for k in group_keys)
        groups.setdefault(key, []).append(row)

    out = []
    for key in sorted(groups, key=str):
        members = groups[key]
        entry: Dict[str, object] = dict(zip(group_keys, key))
        entry["n"] = len(members)
        for field_name in AGGREGATE_FIELDS:
            values = [float(m[field_name]) for m in members]
            mean, se = _mean_se(values)
            entry[field_name] = mean
            entry[f"{field_name}_se"] = se
        for scope in ("last", "mean"):
            total = entry[f"{scope}_total_gap"]
            if total > 0:
                entry[f"{scope}_exploit_frac"] = entry[f"{scope}_exploit_gap"] / total
                entry[f"{scope}_explore_frac"] = entry[f"{scope}_explore_gap"] / total
            else:
                entry[f"{scope}_exploit_frac"] = 0.0
                entry[f"{scope}_explore_frac"] = 0.0
        out.append(entry)
    return out
