"""Agent policies: random walk, systematic explorer, greedy exploiter, and a
chat-completion backed agent with retry handling and a mock transport."""

import json
import os
import random
import threading
import time
from dataclasses import dataclass, field
from typing import List, Optional

import requests

from . import oracle, textio
from .episode import DecisionContext, History, run_episode
from .worldgen import ObjectRef, WorldSpec

API_KEY_ENV = "EXPLOREBENCH_API_KEY"


class TransportError(RuntimeError):
    pass


def knowledge_from_ctx(ctx: DecisionContext) -> oracle.KnowledgeGraph:
    """Knowledge graph over everything seen so far, current episode included."""
    graph = oracle.build_graph(ctx.history, ctx.world)
    for obs, action, _reward in ctx.current_events:
        graph.observe(ctx.world, obs)
        graph.record_action(ctx.world, action)
    graph.observe(ctx.world, ctx.observation)
    return graph


class RandomWalkPolicy:
    """Uniform choice over the legal actions of the current room."""

    name = "random_walk"

    def __init__(self, seed: int = 0):
        self.rng = random.Random(f"random_walk:{seed}")

    def decide(self, ctx: DecisionContext) -> ObjectRef:
        if not ctx.legal:
            raise ValueError("no legal actions")
        return self.rng.choice(ctx.legal)


class SystematicExplorerPolicy:
    """Deterministic door-sweep probe.

    Each step heads for the closest door it has never walked through (true
    shortest path; as a scripted probe it may consult the map) and traverses
    it if the round trip still fits the remaining budget. The grid is
    bipartite, so every door's nearer endpoint lies strictly inside the
    budget and the sweep eventually covers every door and room, driving the
    exploration gap to zero. Balls are only collected once no further door
    fits, because the third pickup would end the episode early.
    """

    name = "systematic_explorer"

    def __init__(self, seed: int = 0):
        self.rng = random.Random(f"systematic:{seed}")

    def decide(self, ctx: DecisionContext) -> ObjectRef:
        world = ctx.world
        graph = knowledge_from_ctx(ctx)
        remaining = world.door_budget - ctx.state.doors_used

        adj = {}
        for door in world.doors:
            a, b = door.rooms
            adj.setdefault(a, []).append((door.color, b))
            adj.setdefault(b, []).append((door.color, a))
        for nbs in adj.values():
            nbs.sort()
        dist, first_door = self._bfs(adj, ctx.state.current_room)

        # Nearest untraversed door whose traversal fits the budget.
        target = None
        for door in world.doors:
            if door in graph.traversed_doors:
                continue
            near = min(door.rooms, key=lambda r: (dist.get(r, 10**9), r))
            d = dist.get(near)
            if d is None or d + 1 > remaining:
                continue
            key = (d, door.color)
            if target is None or key < target[0]:
                target = (key, door, near)
        if target is not None:
            _, door, near = target
            if near == ctx.state.current_room:
                return ObjectRef("door", door.color)
            return ObjectRef("door", first_door[near])

        # Nothing left to explore this episode: collect what's here, then
        # burn the rest of the budget pacing a door.
        balls = sorted(r for r in ctx.legal if r.kind == "ball")
        if balls:
            return balls[0]
        doors = sorted(r for r in ctx.legal if r.kind == "door")
        if doors:
            return doors[0]
        return self.rng.choice(ctx.legal)

    @staticmethod
    def _bfs(adj, source):
        dist = {source: 0}
        first_door = {}
        frontier = [source]
        while frontier:
            nxt = []
            for room in frontier:
                for color, nb in adj.get(room, []):
                    if nb not in dist:
                        dist[nb] = dist[room] + 1
                        first_door[nb] = first_door.get(room, color)
                        nxt.append(nb)
            frontier = nxt
        return dist, first_door


class GreedyExploiterPolicy:
    """Follows the oracle's optimal exploitation path for its knowledge.

    Plans once per episode from the pre-episode history; after the plan is
    finished it paces a known door (never collecting unplanned balls) so the
    episode return equals the oracle value of the planning knowledge exactly.
    With no balls known it random-walks through doors only.
    """

    name = "greedy_exploiter"

    def __init__(self, seed: int = 0):
        self.rng = random.Random(f"greedy:{seed}")
        self._plan: List[ObjectRef] = []

    def decide(self, ctx: DecisionContext) -> ObjectRef:
        if not ctx.current_events:
            self._plan = self._make_plan(ctx)
        if self._plan:
            return self._plan.pop(0)
        # Plan finished (or empty): burn budget on doors without touching balls.
        graph = knowledge_from_ctx(ctx)
        known_here = sorted(
            r.color
            for r in ctx.legal
            if r.kind == "door" and ctx.world.door_by_color(r.color) in graph.traversed_doors
        )
        if known_here:
            return ObjectRef("door", known_here[0])
        doors = [r for r in ctx.legal if r.kind == "door"]
        return self.rng.choice(doors or ctx.legal)

    def _make_plan(self, ctx: DecisionContext) -> List[ObjectRef]:
        world = ctx.world
        graph = oracle.build_graph(ctx.history, world)
        solution = oracle.solve(graph, world)
        if not solution.path:
            return []
        adj = {}
        for door in graph.traversed_doors:
            a, b = door.rooms
            adj.setdefault(a, []).append((door.color, b))
            adj.setdefault(b, []).append((door.color, a))
        for nbs in adj.values():
            nbs.sort()
        plan: List[ObjectRef] = []
        room = world.start_room
        for color in solution.path:
            target = world.ball_by_color(color).room
            plan.extend(self._door_path(adj, room, target))
            plan.append(ObjectRef("ball", color))
            room = target
        return plan

    @staticmethod
    def _door_path(adj, src, dst) -> List[ObjectRef]:
        if src == dst:
            return []
        dist = {src: 0}
        back = {}
        frontier = [src]
        while frontier and dst not in dist:
            nxt = []
            for room in frontier:
                for color, nb in adj.get(room, []):
                    if nb not in dist:
                        dist[nb] = dist[room] + 1
                        back[nb] = (room, color)
                        nxt.append(nb)
            frontier = nxt
        if dst not in dist:
            raise ValueError(f"no known path from {src} to {dst}")
        colors = []
        room = dst
        while room != src:
            room, color = back[room]
            colors.append(color)
        return [ObjectRef("door", c) for c in reversed(colors)]


@dataclass
class LlmConfig:
    endpoint_url: str = ""
    model_name: str = ""
    temperature: float = 0.1
    max_retries: int = 3
    timeout: float = 60.0
    rate_limit: Optional[float] = None  # requests per minute
    http_retries: int = 3


class RateLimiter:
    """Token bucket over a per-minute request budget."""

    def __init__(self, per_minute: float):
        self.interval = 60.0 / per_minute
        self._next = 0.0
        self._lock = threading.Lock()

    def acquire(self):
        with self._lock:
            now = time.monotonic()
            wait = self._next - now
            self._next = max(now, self._next) + self.interval
        if wait > 0:
            time.sleep(wait)


class HttpTransport:
    """OpenAI-compatible chat-completion client."""

    def __init__(self, config: LlmConfig, session=None):
        self.config = config
        self.session = session or requests.Session()
        self.limiter = RateLimiter(config.rate_limit) if config.rate_limit else None

    def send(self, messages) -> str:
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(API_KEY_ENV)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        payload = {
            "model": self.config.model_name,
            "messages": messages,
            "temperature": self.config.temperature,
        }
        last_error = None
        for attempt in range(self.config.http_retries + 1):
            if self.limiter:
                self.limiter.acquire()
            try:
                resp = self.session.post(
                    self.config.endpoint_url,
                    json=payload,
                    headers=headers,
                    timeout=self.config.timeout,
                )
                resp.raise_for_status()
                return resp.json()["choices"][0]["message"]["content"]
            except (requests.RequestException, KeyError, ValueError) as exc:
                last_error = exc
                time.sleep(min(2**attempt, 30))
        raise TransportError(f"chat completion failed: {last_error}")


class MockTransport:
    """Replays canned replies; used for offline runs and tests."""

    def __init__(self, replies):
        self.replies = list(replies)
        self.requests: List[list] = []
        self._pos = 0

    @classmethod
    def from_jsonl(cls, path):
        with open(path, encoding="utf-8") as f:
            return cls(json.loads(line) for line in f if line.strip())

    def send(self, messages) -> str:
        self.requests.append(messages)
        if self._pos >= len(self.replies):
            raise TransportError("mock transport exhausted")
        reply = self.replies[self._pos]
        self._pos += 1
        return reply


_INVALID_NOTICE = "Invalid action. Reply with one object enclosed with < and >."


class LlmPolicy:
    """Chat-completion agent: prompt, parse, retry, random fallback."""

    name = "llm"

    def __init__(
        self,
        config: LlmConfig,
        transport,
        instruction: textio.Instruction,
        episodes: int = textio.DEFAULT_EPISODES,
        seed: int = 0,
    ):
        self.config = config
        self.transport = transport
        self.instruction = instruction
        self.episodes = episodes
        self.rng = random.Random(f"llm_fallback:{seed}")
        self.invalid_count = 0
        self.diagnostics: List[dict] = []

    def decide(self, ctx: DecisionContext) -> ObjectRef:
        bundle = textio.render_prompt(
            ctx.history,
            ctx.current_events,
            ctx.observation,
            self.instruction,
            ctx.world,
            ctx.legal,
            episodes=self.episodes,
        )
        prompt = bundle.full_text
        raw_replies = []
        started = time.monotonic()
        action = None
        for attempt in range(self.config.max_retries + 1):
            reply = self.transport.send([{"role": "user", "content": prompt}])
            raw_replies.append(reply)
            try:
                action = textio.parse_action(reply, ctx.legal)
                break
            except textio.ParseFailure:
                self.invalid_count += 1
                prompt = f"{prompt}\n{_INVALID_NOTICE}"
        fell_back = action is None
        if fell_back:
            action = self.rng.choice(ctx.legal)
        self.diagnostics.append(
            {
                "raw_replies": raw_replies,
                "retries": len(raw_replies) - 1,
                "invalid": len(raw_replies) if fell_back else len(raw_replies) - 1,
                "fallback": fell_back,
                "latency": time.monotonic() - started,
            }
        )
        return action


def llm_exploiter_eval(
    history: History,
    world: WorldSpec,
    config: LlmConfig,
    transport,
    seed: int = 0,
) -> int:
    """One extra exploit-only episode on a frozen history; returns its return."""
    if not history.trajectories:
        raise ValueError("history must be nonempty")
    policy = LlmPolicy(
        config, transport, textio.get_instruction("soft_lower"), seed=seed
    )
    trajectory = run_episode(world, policy, history)
    return trajectory.episode_return
