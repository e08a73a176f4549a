"""Experiment orchestration: seeded runs, JSONL logs, reports, replay."""

import csv
import glob as globlib
import hashlib
import json
import os
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import agents, metrics, oracle, textio, worldgen
from .episode import History, Observation, Trajectory, append_history, run_episode
from .worldgen import ObjectRef, WorldSpec


class ConfigError(ValueError):
    pass


class ReplayMismatch(RuntimeError):
    pass


@dataclass
class RunConfig:
    world: dict
    agent: dict
    instruction: str = "task_oriented"
    episodes: int = 20
    run_seed: int = 0
    out_dir: str = "runs"

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        try:
            cfg = cls(
                world=dict(data["world"]),
                agent=dict(data["agent"]),
                instruction=data.get("instruction", "task_oriented"),
                episodes=int(data.get("episodes", 20)),
                run_seed=int(data.get("run_seed", 0)),
                out_dir=data.get("out_dir", "runs"),
            )
        except KeyError as exc:
            raise ConfigError(f"missing config key: {exc}") from exc
        if cfg.episodes < 1:
            raise ConfigError("episodes must be >= 1")
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path, encoding="utf-8") as f:
            return cls.from_dict(json.load(f))


def resolve_world(spec: dict) -> WorldSpec:
    if "path" in spec:
        return worldgen.load_world(spec["path"])
    kind = spec.get("kind")
    dims = tuple(spec.get("dims", ()))
    seed = int(spec.get("seed", 0))
    if kind in ("treasure", worldgen.TREASURE_ROOMS):
        return worldgen.generate_treasure_rooms(
            seed, dims, p_drop=float(spec.get("p_drop", 0.01)),
            p_ball=float(spec.get("p_ball", worldgen.DEFAULT_P_BALL)),
        )
    if kind == worldgen.MAZE:
        return worldgen.generate_maze(
            seed, dims, n_balls=int(spec.get("n_balls", worldgen.DEFAULT_MAZE_BALLS))
        )
    raise ConfigError(f"unknown world kind {kind!r}")


def build_policy(config: RunConfig, transport=None):
    kind = config.agent.get("kind")
    seed = config.run_seed
    if kind == "random_walk":
        return agents.RandomWalkPolicy(seed)
    if kind == "systematic_explorer":
        return agents.SystematicExplorerPolicy(seed)
    if kind == "greedy_exploiter":
        return agents.GreedyExploiterPolicy(seed)
    if kind == "llm":
        llm = agents.LlmConfig(**config.agent.get("llm", {}))
        if transport is None:
            if "replay_file" in config.agent:
                transport = agents.MockTransport.from_jsonl(config.agent["replay_file"])
            else:
                transport = agents.HttpTransport(llm)
        instruction = textio.get_instruction(config.instruction)
        return agents.LlmPolicy(
            llm, transport, instruction, episodes=config.episodes, seed=seed
        )
    raise ConfigError(f"unknown agent kind {kind!r}")


def world_hash(world: WorldSpec) -> str:
    canonical = json.dumps(worldgen.world_to_dict(world), sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def _obs_json(obs: Observation) -> List[str]:
    return [str(ref) for ref in obs.visible]


def _ref_from_str(text: str) -> ObjectRef:
    color, kind = text.rsplit(" ", 1)
    return ObjectRef(kind, color)


def run_id_for(config: RunConfig, world: WorldSpec) -> str:
    agent = config.agent.get("kind", "agent")
    model = config.agent.get("llm", {}).get("model_name") or agent
    model = model.replace("/", "_").replace(" ", "_")
    return f"{model}_{config.instruction}_{world.world_id}_run{config.run_seed}"


@dataclass
class RunLog:
    header: dict
    events: List[dict]
    episode_ends: List[dict]
    summary: Optional[dict] = None

    @classmethod
    def load(cls, path) -> "RunLog":
        header = None
        events: List[dict] = []
        ends: List[dict] = []
        summary = None
        with open(path, encoding="utf-8") as f:
            for line in f:
                if not line.strip():
                    continue
                rec = json.loads(line)
                rtype = rec.get("type")
                if rtype == "header":
                    header = rec
                elif rtype == "event":
                    events.append(rec)
                elif rtype == "episode_end":
                    ends.append(rec)
                elif rtype == "summary":
                    summary = rec
        if header is None:
            raise ConfigError(f"{path}: missing header record")
        return cls(header, events, ends, summary)


def run_experiment(
    config: RunConfig,
    transport=None,
    out_path=None,
    resume: bool = False,
) -> Tuple[History, metrics.RunSummary, str]:
    """Execute one full run, streaming a JSONL log to disk.

    The oracle's exploitation value is recomputed after every environment
    interaction and stored with the event. Returns the history, the run
    summary, and the log path.
    """
    world = resolve_world(config.world)
    if out_path is None:
        os.makedirs(config.out_dir, exist_ok=True)
        out_path = os.path.join(config.out_dir, run_id_for(config, world) + ".jsonl")

    if resume and os.path.exists(out_path) and config.agent.get("kind") == "llm":
        prior = RunLog.load(out_path)
        replies = [r for e in prior.events for r in e.get("raw_replies", [])]
        live = transport
        if live is None and "replay_file" in config.agent:
            live = agents.MockTransport.from_jsonl(config.agent["replay_file"])
        transport = _ReplayPrefixTransport(replies, live)

    policy = build_policy(config, transport=transport)
    instruction_id = config.instruction
    model = config.agent.get("llm", {}).get("model_name") or getattr(
        policy, "name", "agent"
    )

    graph = oracle.KnowledgeGraph.empty(world)
    interaction_series: List[int] = []
    cache = {"version": -1, "value": 0}

    def exploit_after(new_obs) -> int:
        graph.observe(world, new_obs)
        if graph.version != cache["version"]:
            cache["value"] = oracle.solve(graph, world).value
            cache["version"] = graph.version
        return cache["value"]

    history = History()
    with open(out_path, "w", encoding="utf-8") as log:
        def emit(record):
            log.write(json.dumps(record) + "\n")
            log.flush()

        emit(
            {
                "type": "header",
                "config": {
                    "world": config.world,
                    "agent": config.agent,
                    "instruction": instruction_id,
                    "episodes": config.episodes,
                    "run_seed": config.run_seed,
                },
                "world_hash": world_hash(world),
                "r_max": world.r_max,
                "started": time.strftime("%Y-%m-%dT%H:%M:%S"),
            }
        )

        for episode_idx in range(1, config.episodes + 1):
            step_counter = {"n": 0}

            def on_event(ctx, action, reward, new_obs, _ep=episode_idx, _sc=step_counter):
                _sc["n"] += 1
                graph.observe(world, ctx.observation)
                graph.record_action(world, action)
                value = exploit_after(new_obs)
                interaction_series.append(value)
                record = {
                    "type": "event",
                    "episode": _ep,
                    "step": _sc["n"],
                    "room": ctx.observation.room,
                    "observation": _obs_json(ctx.observation),
                    "action": str(action),
                    "reward": reward,
                    "doors_used": ctx.state.doors_used + (1 if action.kind == "door" else 0),
                    "balls_collected": ctx.state.balls_collected
                    + (1 if action.kind == "ball" else 0),
                    "exploit_return_after": value,
                }
                if getattr(policy, "diagnostics", None):
                    record["raw_replies"] = policy.diagnostics[-1]["raw_replies"]
                emit(record)

            trajectory = run_episode(world, policy, history, on_event=on_event)
            graph.observe(world, trajectory.final_observation)
            if graph.version != cache["version"]:
                cache["value"] = oracle.solve(graph, world).value
                cache["version"] = graph.version
            history = append_history(history, trajectory)
            emit(
                {
                    "type": "episode_end",
                    "episode": episode_idx,
                    "final_observation": _obs_json(trajectory.final_observation),
                    "final_room": trajectory.final_observation.room,
                    "return": trajectory.episode_return,
                    "exploit_return": cache["value"],
                    "coverage_pct": 100.0 * len(graph.visited_rooms) / len(world.rooms),
                }
            )

        summary = metrics.summarize_run(
            history,
            world,
            model=model,
            instruction=instruction_id,
            seed=config.run_seed,
            invalid_actions=getattr(policy, "invalid_count", 0),
            interaction_series=interaction_series,
        )
        footer = {"type": "summary", "finished": time.strftime("%Y-%m-%dT%H:%M:%S")}
        footer.update(summary.to_row())
        emit(footer)
    return history, summary, out_path


class _ReplayPrefixTransport:
    """Replays logged replies, then hands over to a live transport."""

    def __init__(self, replies, live):
        self.replies = list(replies)
        self.live = live
        self._pos = 0

    def send(self, messages):
        if self._pos < len(self.replies):
            reply = self.replies[self._pos]
            self._pos += 1
            return reply
        if self.live is None:
            raise agents.TransportError("no live transport to resume with")
        return self.live.send(messages)


def history_from_log(log: RunLog, world: WorldSpec) -> History:
    """Rebuild the history a log describes, verifying it against the engine."""
    from . import episode as eng

    history = History()
    events_by_ep: Dict[int, List[dict]] = {}
    for rec in log.events:
        events_by_ep.setdefault(rec["episode"], []).append(rec)
    for end in log.episode_ends:
        ep = end["episode"]
        state, obs = eng.reset(world)
        events = []
        for rec in sorted(events_by_ep.get(ep, []), key=lambda r: r["step"]):
            action = _ref_from_str(rec["action"])
            if _obs_json(obs) != rec["observation"] or obs.room != rec["room"]:
                raise ReplayMismatch(
                    f"episode {ep} step {rec['step']}: observation diverged"
                )
            state, new_obs, reward, _done = eng.step(state, world, action)
            if reward != rec["reward"]:
                raise ReplayMismatch(
                    f"episode {ep} step {rec['step']}: reward {reward} != logged "
                    f"{rec['reward']}"
                )
            events.append((obs, action, reward))
            obs = new_obs
        if _obs_json(obs) != end["final_observation"]:
            raise ReplayMismatch(f"episode {ep}: final observation diverged")
        history = append_history(
            history, Trajectory(ep, tuple(events), obs)
        )
    return history


def replay(log_path, world: WorldSpec) -> dict:
    """Re-execute a log's actions and verify rewards, termination, and the
    exploitation series. Returns a verdict dict."""
    log = RunLog.load(log_path)
    if log.header.get("world_hash") != world_hash(world):
        return {"ok": False, "error": "world hash mismatch"}
    try:
        history = history_from_log(log, world)
    except (ReplayMismatch, Exception) as exc:  # noqa: BLE001 - verdict, not crash
        return {"ok": False, "error": str(exc)}
    series = oracle.exploit_series(history, world, "per_interaction")
    logged = [rec["exploit_return_after"] for rec in log.events]
    if series != logged:
        first = next(i for i, (a, b) in enumerate(zip(series, logged)) if a != b)
        return {
            "ok": False,
            "error": f"exploit series diverges at interaction {first + 1}",
        }
    return {"ok": True, "episodes": len(history), "interactions": len(series)}


def _load_summaries(paths) -> List[dict]:
    rows = []
    for path in paths:
        log = RunLog.load(path)
        if log.summary is None:
            raise ConfigError(f"{path}: missing summary footer (incomplete run?)")
        rows.append({k: v for k, v in log.summary.items() if k not in ("type", "finished")})
    return rows


def _write_csv(path, fieldnames, rows):
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k) for k in fieldnames})


def report(log_paths, layout: str, out_path: str) -> List[dict]:
    """Aggregate run logs into a table layout; writes CSV and returns rows."""
    if not log_paths:
        raise ConfigError("no logs matched")
    if layout == "gaps_table":
        rows = metrics.aggregate(_load_summaries(log_paths), ["model", "instruction", "env_kind"])
        fields = [
            "model", "instruction", "env_kind", "n",
            "last_total_gap", "last_exploit_gap", "last_exploit_frac",
            "last_explore_gap", "last_explore_frac",
            "mean_total_gap", "mean_exploit_gap", "mean_exploit_frac",
            "mean_explore_gap", "mean_explore_frac",
        ]
        _write_csv(out_path, fields, rows)
        return rows
    if layout == "stats_table":
        rows = metrics.aggregate(_load_summaries(log_paths), ["model", "instruction", "env_kind"])
        fields = [
            "model", "instruction", "env_kind", "n",
            "exploit_return_final", "exploit_return_final_se",
            "agent_return_mean", "agent_return_mean_se",
            "coverage_pct", "coverage_pct_se",
            "redundancy", "redundancy_se",
            "sample_efficiency", "sample_efficiency_se",
        ]
        _write_csv(out_path, fields, rows)
        return rows
    if layout == "curves":
        rows = _curve_rows(log_paths)
        fields = [
            "model", "instruction", "env_kind", "dims", "episode", "n",
            "agent_return", "agent_return_se",
            "explore_gap", "explore_gap_se",
            "coverage_pct", "coverage_pct_se",
        ]
        _write_csv(out_path, fields, rows)
        return rows
    raise ConfigError(f"unknown layout {layout!r}")


def _curve_rows(log_paths) -> List[dict]:
    samples: Dict[tuple, Dict[str, List[float]]] = {}
    for path in log_paths:
        log = RunLog.load(path)
        summary = log.summary or {}
        r_max = log.header["r_max"]
        meta = (
            summary.get("model", "?"),
            summary.get("instruction", "?"),
            summary.get("env_kind", "?"),
            summary.get("dims", "?"),
        )
        for end in log.episode_ends:
            key = meta + (end["episode"],)
            bucket = samples.setdefault(
                key, {"agent_return": [], "explore_gap": [], "coverage_pct": []}
            )
            bucket["agent_return"].append(end["return"])
            scale = r_max if r_max else 1
            bucket["explore_gap"].append((r_max - end["exploit_return"]) / scale)
            bucket["coverage_pct"].append(end["coverage_pct"])
    rows = []
    for key in sorted(samples, key=str):
        model, instruction, env_kind, dims, ep = key
        row = {
            "model": model, "instruction": instruction,
            "env_kind": env_kind, "dims": dims, "episode": ep,
            "n": len(samples[key]["agent_return"]),
        }
        for name, values in samples[key].items():
            mean, se = metrics._mean_se(values)
            row[name] = mean
            row[f"{name}_se"] = se
        rows.append(row)
    return rows


def expand_globs(patterns) -> List[str]:
    paths: List[str] = []
    for pattern in patterns:
        paths.extend(sorted(globlib.glob(pattern)))
    return paths
