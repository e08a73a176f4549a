"""Text interface: renders the agent prompt and parses replies.

The prompt layout mirrors the in-context template the environments are
played through; instruction texts live in data/instructions.json so they
can be overridden without code changes.
"""

import json
import re
from dataclasses import dataclass
from importlib import resources
from typing import List, Optional, Tuple

from .episode import History, Observation, Trajectory
from .worldgen import ObjectRef, WorldSpec

DEFAULT_EPISODES = 20

_SPAN_RE = re.compile(r"<([^<>]*)>")


class ParseFailure(ValueError):
    def __init__(self, reason: str, raw: str):
        super().__init__(f"{reason}: {raw!r}")
        self.reason = reason
        self.raw = raw


@dataclass(frozen=True)
class Instruction:
    id: str
    text: str


@dataclass(frozen=True)
class PromptBundle:
    full_text: str
    legal: Tuple[ObjectRef, ...]
    attempt: int = 0


def load_instructions(path=None) -> dict:
    if path is None:
        text = resources.files("explorebench.data").joinpath("instructions.json").read_text()
    else:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    return json.loads(text)


def get_instruction(instruction_id: str, path=None) -> Instruction:
    table = load_instructions(path)
    if instruction_id not in table:
        raise KeyError(f"unknown instruction {instruction_id!r}")
    return Instruction(instruction_id, table[instruction_id])


def _object_list(observation: Observation) -> str:
    return ", ".join(str(ref) for ref in observation.visible)


def render_observation(
    observation: Observation, arrived_via_door: bool = False, first: bool = False
) -> str:
    """One observation line as the agent sees it.

    The opening observation of an episode puts the object list on its own
    line; later observations render inline, prefixed with the door-walk
    notice when the agent just moved.
    """
    objects = _object_list(observation)
    if first:
        return f"You see:\n{objects}"
    if arrived_via_door:
        return f"You walk through the door. You see: {objects}"
    return f"You see: {objects}"


def render_events(
    first_observation: Observation,
    events,
    final_observation: Optional[Observation] = None,
) -> List[str]:
    """Interaction lines: observation, '> action' echo, reward, repeated."""
    lines = [render_observation(first_observation, first=True)]
    for idx, (_obs, action, reward) in enumerate(events):
        lines.append(f"> {action}")
        lines.append(f"Reward: {reward}")
        if idx + 1 < len(events):
            result = events[idx + 1][0]
        else:
            result = final_observation
        if result is not None:
            lines.append(
                render_observation(result, arrived_via_door=action.kind == "door")
            )
    return lines


def render_trajectory(trajectory: Trajectory) -> List[str]:
    if not trajectory.events:
        return [render_observation(trajectory.final_observation, first=True)]
    first_obs = trajectory.events[0][0]
    return render_events(first_obs, trajectory.events, trajectory.final_observation)


def render_prompt(
    history: History,
    current_events,
    current_observation: Observation,
    instruction: Instruction,
    world: WorldSpec,
    legal,
    episodes: int = DEFAULT_EPISODES,
    attempt: int = 0,
) -> PromptBundle:
    lines: List[str] = ["Your past episodes:"]
    for traj in history.trajectories:
        lines.append(f"Episode {traj.episode_index}:")
        lines.extend(render_trajectory(traj))
    lines.append("")
    lines.append("You are controlling an agent in an unknown world.")
    lines.append(
        f"Over a total of {episodes} episodes, you can interact with objects in the environment."
    )
    lines.append(instruction.text)
    lines.append(
        f"You have {world.door_budget} door interactions per episode "
        "but can pick up three balls, keys, or boxes."
    )
    lines.append("")
    lines.append("Current episode:")
    if current_events:
        lines.extend(
            render_events(current_events[0][0], current_events, current_observation)
        )
    else:
        lines.append(render_observation(current_observation, first=True))
    lines.append("")
    lines.append("Which object do you want to interact with next?")
    lines.append("Reply with one object enclosed with < and >, e.g. <door>.")
    lines.append("")
    lines.append("What is your next action?")
    return PromptBundle("\n".join(lines), tuple(legal), attempt)


def _normalize(text: str) -> str:
    return " ".join(text.strip().lower().split())


def parse_action(reply: str, legal) -> ObjectRef:
    """Resolve the first <...> span of a reply against the legal objects.

    Exact "color kind" wins, then a unique color-only match, then a unique
    kind-only match. Anything else raises ParseFailure.
    """
    match = _SPAN_RE.search(reply)
    if match is None:
        raise ParseFailure("no <...> span in reply", reply)
    token = _normalize(match.group(1))
    if not token:
        raise ParseFailure("empty action span", reply)

    for ref in legal:
        if token == f"{ref.color} {ref.kind}":
            return ref
    color_hits = [ref for ref in legal if token == ref.color]
    if len(color_hits) == 1:
        return color_hits[0]
    kind_hits = [ref for ref in legal if token == ref.kind]
    if len(kind_hits) == 1:
        return kind_hits[0]
    if color_hits or kind_hits:
        raise ParseFailure(f"ambiguous action {token!r}", reply)
    raise ParseFailure(f"no legal object matches {token!r}", reply)
