"""Deterministic episodic engine for room worlds.

An episode ends when the agent has collected three balls or spent its door
budget. Ball pickups never consume door budget. States are values; step()
returns a new state and leaves its input untouched.
"""

from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

from .worldgen import ObjectRef, WorldSpec

__all__ = [
    "Observation",
    "ObjectRef",
    "EpisodeState",
    "Trajectory",
    "History",
    "EpisodeError",
    "IllegalActionError",
    "reset",
    "legal_actions",
    "step",
    "append_history",
    "run_episode",
]


class EpisodeError(ValueError):
    pass


class IllegalActionError(EpisodeError):
    pass


@dataclass(frozen=True)
class Observation:
    room: str
    visible: Tuple[ObjectRef, ...]


@dataclass(frozen=True)
class EpisodeState:
    world_id: str
    current_room: str
    doors_used: int = 0
    balls_collected: int = 0
    collected: frozenset = frozenset()  # ball colors taken this episode
    episode_return: int = 0
    done: bool = False


@dataclass(frozen=True)
class Trajectory:
    episode_index: int
    events: Tuple[Tuple[Observation, ObjectRef, int], ...]
    final_observation: Observation

    @property
    def episode_return(self) -> int:
        return sum(r for _, _, r in self.events)


@dataclass(frozen=True)
class History:
    trajectories: Tuple[Trajectory, ...] = ()

    def __len__(self):
        return len(self.trajectories)


def observe(world: WorldSpec, state: EpisodeState) -> Observation:
    visible = tuple(
        ref
        for ref in world.contents(state.current_room)
        if not (ref.kind == "ball" and ref.color in state.collected)
    )
    return Observation(state.current_room, visible)


def reset(world: WorldSpec) -> Tuple[EpisodeState, Observation]:
    state = EpisodeState(world_id=world.world_id, current_room=world.start_room)
    return state, observe(world, state)


def legal_actions(state: EpisodeState, world: WorldSpec) -> List[ObjectRef]:
    if state.done:
        raise EpisodeError("episode is already done")
    return list(observe(world, state).visible)


def step(
    state: EpisodeState, world: WorldSpec, action: ObjectRef
) -> Tuple[EpisodeState, Observation, int, bool]:
    if action not in legal_actions(state, world):
        raise IllegalActionError(f"{action} is not available in {state.current_room}")

    if action.kind == "door":
        if state.doors_used >= world.door_budget:
            # The run loop treats this attempt as the end of the episode.
            raise EpisodeError("door budget exhausted")
        door = world.door_by_color(action.color)
        new_state = replace(
            state,
            current_room=door.other(state.current_room),
            doors_used=state.doors_used + 1,
        )
        reward = 0
    else:
        ball = world.ball_by_color(action.color)
        reward = ball.reward
        new_state = replace(
            state,
            balls_collected=state.balls_collected + 1,
            collected=state.collected | {ball.color},
            episode_return=state.episode_return + reward,
        )

    new_obs = observe(world, new_state)
    # Balls in the room reached by the last affordable door traversal stay
    # collectible; an exhausted budget only ends the episode once no balls
    # remain (or the agent attempts another traversal, see run_episode).
    done = new_state.balls_collected >= world.max_balls_per_episode or (
        new_state.doors_used >= world.door_budget
        and not any(ref.kind == "ball" for ref in new_obs.visible)
    )
    new_state = replace(new_state, done=done)
    return new_state, new_obs, reward, done


def append_history(history: History, trajectory: Trajectory) -> History:
    if trajectory.episode_index != len(history) + 1:
        raise EpisodeError(
            f"episode index {trajectory.episode_index} does not follow "
            f"history of length {len(history)}"
        )
    return History(history.trajectories + (trajectory,))


@dataclass
class DecisionContext:
    """Everything a policy may look at when choosing an action."""

    world: WorldSpec
    state: EpisodeState
    observation: Observation
    legal: List[ObjectRef]
    history: History
    current_events: List[Tuple[Observation, ObjectRef, int]]


def run_episode(world: WorldSpec, policy, history: History, on_event=None) -> Trajectory:
    """Run one episode to termination and return its trajectory.

    `policy` needs a decide(ctx) method; begin_episode(obs) is called if
    present. `on_event` receives (ctx, action, reward, new_observation)
    after every step, before the next decision.
    """
    state, obs = reset(world)
    if hasattr(policy, "begin_episode"):
        policy.begin_episode(obs)
    events: List[Tuple[Observation, ObjectRef, int]] = []
    while not state.done:
        ctx = DecisionContext(world, state, obs, legal_actions(state, world), history, events)
        action = policy.decide(ctx)
        if action.kind == "door" and state.doors_used >= world.door_budget:
            # Attempting to exceed the traversal budget ends the episode.
            break
        state, new_obs, reward, _done = step(state, world, action)
        events.append((obs, action, reward))
        if on_event is not None:
            on_event(ctx, action, reward, new_obs)
        obs = new_obs
    return Trajectory(
        episode_index=len(history) + 1,
        events=tuple(events),
        final_observation=obs,
    )
