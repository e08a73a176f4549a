"""Shared fixtures: a hand-built 3x3 world whose rendered transcript is the
canonical two-episode scenario used by the text and oracle tests."""

import pytest

from explorebench.oracle import compute_r_max
from explorebench.worldgen import Ball, Door, ObjectRef, WorldSpec


def _ref(kind, color):
    return ObjectRef(kind, color)


@pytest.fixture(scope="session")
def scenario_world() -> WorldSpec:
    """3x3 grid, start in the middle of the left edge (r1_0).

    Door colors and ball placements are chosen so a scripted agent can walk
    the two reference episodes: east through dodger_blue/cerulean/teal
    collecting three balls, then north through tangerine for the big ball.
    """
    doors = (
        Door("dodger_blue", ("r1_0", "r1_1")),
        Door("tangerine", ("r0_0", "r1_0")),
        Door("apricot", ("r0_1", "r1_1")),
        Door("cerulean", ("r1_1", "r1_2")),
        Door("honeydew", ("r1_1", "r2_1")),
        Door("teal", ("r1_2", "r2_2")),
        Door("magenta", ("r2_1", "r2_2")),
        Door("sienna", ("r0_1", "r0_2")),
        Door("periwinkle", ("r2_0", "r2_1")),
    )
    balls = (
        Ball("rosewood", "r1_2", 3),
        Ball("turquoise", "r2_2", 2),
        Ball("khaki", "r2_2", 3),
        Ball("midnight_blue", "r0_0", 5),
    )
    rooms = tuple(f"r{r}_{c}" for r in range(3) for c in range(3))
    presentation = {
        "r1_0": (_ref("door", "dodger_blue"), _ref("door", "tangerine")),
        "r1_1": (
            _ref("door", "apricot"),
            _ref("door", "dodger_blue"),
            _ref("door", "cerulean"),
            _ref("door", "honeydew"),
        ),
        "r1_2": (
            _ref("ball", "rosewood"),
            _ref("door", "teal"),
            _ref("door", "cerulean"),
        ),
        "r2_2": (
            _ref("ball", "turquoise"),
            _ref("door", "magenta"),
            _ref("door", "teal"),
            _ref("ball", "khaki"),
        ),
        "r0_0": (_ref("ball", "midnight_blue"), _ref("door", "tangerine")),
    }
    base = WorldSpec(
        world_id="scenario_3x3",
        kind="treasure_rooms",
        grid_dims=(3, 3),
        rooms=rooms,
        doors=doors,
        balls=balls,
        start_room="r1_0",
        door_budget=8,
        r_max=0,
        seed=0,
        presentation=presentation,
    )
    return WorldSpec(
        world_id=base.world_id,
        kind=base.kind,
        grid_dims=base.grid_dims,
        rooms=rooms,
        doors=doors,
        balls=balls,
        start_room=base.start_room,
        door_budget=base.door_budget,
        r_max=compute_r_max(base),
        seed=0,
        presentation=presentation,
    )


EPISODE_1_ACTIONS = [
    _ref("door", "dodger_blue"),
    _ref("door", "cerulean"),
    _ref("ball", "rosewood"),
    _ref("door", "teal"),
    _ref("ball", "turquoise"),
    _ref("ball", "khaki"),
]

EPISODE_2_ACTIONS = [
    _ref("door", "tangerine"),
    _ref("ball", "midnight_blue"),
    _ref("door", "tangerine"),
]

EPISODE_1_LINES = [
    "You see:",
    "dodger_blue door, tangerine door",
    "> dodger_blue door",
    "Reward: 0",
    "You walk through the door. You see: apricot door, dodger_blue door, cerulean door, honeydew door",
    "> cerulean door",
    "Reward: 0",
    "You walk through the door. You see: rosewood ball, teal door, cerulean door",
    "> rosewood ball",
    "Reward: 3",
    "You see: teal door, cerulean door",
    "> teal door",
    "Reward: 0",
    "You walk through the door. You see: turquoise ball, magenta door, teal door, khaki ball",
    "> turquoise ball",
    "Reward: 2",
    "You see: magenta door, teal door, khaki ball",
    "> khaki ball",
    "Reward: 3",
    "You see: magenta door, teal door",
]

# The final line of episode two re-enters the start room; its object list is
# compared order-insensitively because the hand-written scenario lists this
# room's two doors in both orders while the engine keeps one canonical order
# per room.
EPISODE_2_LINES = [
    "You see:",
    "dodger_blue door, tangerine door",
    "> tangerine door",
    "Reward: 0",
    "You walk through the door. You see: midnight_blue ball, tangerine door",
    "> midnight_blue ball",
    "Reward: 5",
    "You see: tangerine door",
    "> tangerine door",
    "Reward: 0",
    "You walk through the door. You see: tangerine door, dodger_blue door",
]


class ScriptedPolicy:
    """Plays back a fixed action list, one episode's worth per begin_episode."""

    def __init__(self, episodes_of_actions):
        self.episodes = [list(a) for a in episodes_of_actions]
        self._current = []

    def begin_episode(self, _obs):
        self._current = self.episodes.pop(0) if self.episodes else []

    def decide(self, ctx):
        if not self._current:
            raise AssertionError("script exhausted mid-episode")
        return self._current.pop(0)


@pytest.fixture()
def scripted_policy_factory():
    return ScriptedPolicy
