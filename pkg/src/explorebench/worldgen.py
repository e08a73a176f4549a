"""Procedural generation of treasure-room grids and Kruskal mazes.

Worlds are immutable value objects. Generation is a pure function of
(seed, dims, params): the same inputs always produce a byte-identical
serialization.
"""

import json
import random
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Optional, Tuple

TREASURE_ROOMS = "treasure_rooms"
MAZE = "maze"

MAX_BALLS_PER_EPISODE = 3
MAZE_DOOR_BUDGET = 15
DEFAULT_P_BALL = 0.4
DEFAULT_MAZE_BALLS = 8


class WorldGenError(ValueError):
    pass


def room_id(row: int, col: int) -> str:
    return f"r{row}_{col}"


def room_coords(rid: str) -> Tuple[int, int]:
    row, col = rid[1:].split("_")
    return int(row), int(col)


@dataclass(frozen=True, order=True)
class ObjectRef:
    """A door or ball named by its globally unique color."""

    kind: str  # "door" or "ball"
    color: str

    def __str__(self):
        return f"{self.color} {self.kind}"


@dataclass(frozen=True)
class Door:
    color: str
    rooms: Tuple[str, str]  # unordered pair, stored sorted

    def other(self, rid: str) -> str:
        a, b = self.rooms
        return b if rid == a else a


@dataclass(frozen=True)
class Ball:
    color: str
    room: str
    reward: int


@dataclass(frozen=True)
class WorldSpec:
    world_id: str
    kind: str
    grid_dims: Tuple[int, int]
    rooms: Tuple[str, ...]
    doors: Tuple[Door, ...]
    balls: Tuple[Ball, ...]
    start_room: str
    door_budget: int
    r_max: int
    seed: int
    max_balls_per_episode: int = MAX_BALLS_PER_EPISODE
    discount: float = 1.0
    # Per-room presentation order shown to the agent; defaults to doors
    # in generation order followed by balls in generation order.
    presentation: Optional[Dict[str, Tuple[ObjectRef, ...]]] = field(
        default=None, compare=False
    )

    def door_by_color(self, color: str) -> Door:
        return self._doors_by_color[color]

    def ball_by_color(self, color: str) -> Ball:
        return self._balls_by_color[color]

    @property
    def _doors_by_color(self) -> Dict[str, Door]:
        cached = self.__dict__.get("_doors_cache")
        if cached is None:
            cached = {d.color: d for d in self.doors}
            self.__dict__["_doors_cache"] = cached
        return cached

    @property
    def _balls_by_color(self) -> Dict[str, Ball]:
        cached = self.__dict__.get("_balls_cache")
        if cached is None:
            cached = {b.color: b for b in self.balls}
            self.__dict__["_balls_cache"] = cached
        return cached

    def doors_in_room(self, rid: str) -> List[Door]:
        return [d for d in self.doors if rid in d.rooms]

    def balls_in_room(self, rid: str) -> List[Ball]:
        return [b for b in self.balls if b.room == rid]

    def contents(self, rid: str) -> Tuple[ObjectRef, ...]:
        """Objects of a room in presentation order."""
        if self.presentation is not None and rid in self.presentation:
            return self.presentation[rid]
        refs = [ObjectRef("door", d.color) for d in self.doors_in_room(rid)]
        refs += [ObjectRef("ball", b.color) for b in self.balls_in_room(rid)]
        return tuple(refs)


def load_palette(path=None) -> List[str]:
    if path is None:
        text = resources.files("explorebench.data").joinpath("colors.txt").read_text()
    else:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    names = [line.strip() for line in text.splitlines() if line.strip()]
    if len(names) != len(set(names)):
        raise WorldGenError("palette contains duplicate names")
    return names


def adjacency(rooms, doors) -> Dict[str, List[Tuple[str, str]]]:
    """room -> list of (door color, neighbor room)."""
    adj = {r: [] for r in rooms}
    for d in doors:
        a, b = d.rooms
        adj[a].append((d.color, b))
        adj[b].append((d.color, a))
    return adj


def bfs_distances(adj, source) -> Dict[str, int]:
    dist = {source: 0}
    frontier = [source]
    while frontier:
        nxt = []
        for r in frontier:
            for _, nb in adj[r]:
                if nb not in dist:
                    dist[nb] = dist[r] + 1
                    nxt.append(nb)
        frontier = nxt
    return dist


def is_connected(rooms, doors, start) -> bool:
    return len(bfs_distances(adjacency(rooms, doors), start)) == len(rooms)


def calibrate_budget(world: WorldSpec) -> int:
    """Door budget: start-room eccentricity for treasure rooms, 15 for mazes."""
    if world.kind == MAZE:
        return MAZE_DOOR_BUDGET
    dist = bfs_distances(adjacency(world.rooms, world.doors), world.start_room)
    if len(dist) != len(world.rooms):
        raise WorldGenError("room graph is disconnected")
    return max(dist.values())


def _grid_rooms(rows, cols):
    return tuple(room_id(r, c) for r in range(rows) for c in range(cols))


def _lattice_edges(rows, cols):
    """All orthogonally adjacent room pairs, row-major, right then down."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((room_id(r, c), room_id(r, c + 1)))
            if r + 1 < rows:
                edges.append((room_id(r, c), room_id(r + 1, c)))
    return edges


def assign_names(doors, balls, palette, seed):
    """Deterministically shuffle the palette and name doors then balls."""
    if len(palette) < len(doors) + len(balls):
        raise WorldGenError(
            f"palette exhausted: need {len(doors) + len(balls)} names, "
            f"have {len(palette)}"
        )
    names = list(palette)
    random.Random(f"names:{seed}").shuffle(names)
    it = iter(names)
    named_doors = tuple(Door(next(it), d.rooms) for d in doors)
    named_balls = tuple(Ball(next(it), b.room, b.reward) for b in balls)
    return named_doors, named_balls


def _finalize(world_id, kind, dims, rooms, doors, balls, start, budget, seed):
    from .oracle import compute_r_max  # deferred: oracle depends on these types

    spec = WorldSpec(
        world_id=world_id,
        kind=kind,
        grid_dims=dims,
        rooms=rooms,
        doors=doors,
        balls=balls,
        start_room=start,
        door_budget=budget,
        r_max=0,
        seed=seed,
    )
    return WorldSpec(
        world_id=world_id,
        kind=kind,
        grid_dims=dims,
        rooms=rooms,
        doors=doors,
        balls=balls,
        start_room=start,
        door_budget=budget,
        r_max=compute_r_max(spec),
        seed=seed,
    )


def generate_treasure_rooms(
    seed: int,
    dims: Tuple[int, int],
    p_drop: float = 0.01,
    p_ball: float = DEFAULT_P_BALL,
    palette=None,
) -> WorldSpec:
    rows, cols = dims
    if rows < 2 or cols < 2:
        raise WorldGenError(f"dims too small: {rows}x{cols}")
    if not 0 <= p_drop < 0.5:
        raise WorldGenError(f"p_drop out of range: {p_drop}")
    if palette is None:
        palette = load_palette()

    rooms = _grid_rooms(rows, cols)
    start = room_id(0, 0)
    attempt = 0
    while True:
        rng = random.Random(f"treasure:{seed}:{attempt}")
        doors = tuple(
            Door("", e) for e in _lattice_edges(rows, cols) if rng.random() >= p_drop
        )
        if is_connected(rooms, doors, start):
            break
        attempt += 1

    balls = []
    for r in rooms:
        if rng.random() < p_ball:
            balls.append(Ball("", r, rng.randint(1, 10)))
    doors, balls = assign_names(doors, tuple(balls), palette, seed)

    dist = bfs_distances(adjacency(rooms, doors), start)
    budget = max(dist.values())
    world_id = f"treasure_{rows}x{cols}_s{seed}"
    return _finalize(world_id, TREASURE_ROOMS, (rows, cols), rooms, doors, balls, start, budget, seed)


def generate_maze(
    seed: int,
    dims: Tuple[int, int],
    n_balls: int = DEFAULT_MAZE_BALLS,
    palette=None,
) -> WorldSpec:
    rows, cols = dims
    if rows < 3 or cols < 3 or rows % 2 == 0 or cols % 2 == 0:
        raise WorldGenError(f"maze dims must be odd and >= 3: {rows}x{cols}")
    if palette is None:
        palette = load_palette()

    rooms = _grid_rooms(rows, cols)
    start = room_id(rows // 2, cols // 2)
    rng = random.Random(f"maze:{seed}")

    # Randomized Kruskal: shuffle the lattice edges and keep spanning ones.
    edges = _lattice_edges(rows, cols)
    rng.shuffle(edges)
    parent = {r: r for r in rooms}

    def find(r):
        while parent[r] != r:
            parent[r] = parent[parent[r]]
            r = parent[r]
        return r

    doors = []
    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            doors.append(Door("", (a, b)))
    doors = tuple(doors)

    candidates = [r for r in rooms if r != start]
    ball_rooms = rng.sample(candidates, n_balls)
    balls = tuple(Ball("", r, rng.randint(1, 10)) for r in ball_rooms)
    doors, balls = assign_names(doors, balls, palette, seed)

    world_id = f"maze_{rows}x{cols}_s{seed}"
    return _finalize(world_id, MAZE, (rows, cols), rooms, doors, balls, start, MAZE_DOOR_BUDGET, seed)


def world_to_dict(world: WorldSpec) -> dict:
    return {
        "world_id": world.world_id,
        "kind": world.kind,
        "grid_dims": list(world.grid_dims),
        "rooms": list(world.rooms),
        "doors": [[d.color, d.rooms[0], d.rooms[1]] for d in world.doors],
        "balls": [[b.color, b.room, b.reward] for b in world.balls],
        "start_room": world.start_room,
        "door_budget": world.door_budget,
        "max_balls_per_episode": world.max_balls_per_episode,
        "r_max": world.r_max,
        "discount": world.discount,
        "seed": world.seed,
    }


def world_from_dict(data: dict) -> WorldSpec:
    return WorldSpec(
        world_id=data["world_id"],
        kind=data["kind"],
        grid_dims=tuple(data["grid_dims"]),
        rooms=tuple(data["rooms"]),
        doors=tuple(Door(c, (a, b)) for c, a, b in data["doors"]),
        balls=tuple(Ball(c, r, int(w)) for c, r, w in data["balls"]),
        start_room=data["start_room"],
        door_budget=data["door_budget"],
        r_max=data["r_max"],
        seed=data["seed"],
        max_balls_per_episode=data.get("max_balls_per_episode", MAX_BALLS_PER_EPISODE),
        discount=data.get("discount", 1.0),
    )


def save_world(world: WorldSpec, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(world_to_dict(world), f, indent=2)
        f.write("\n")


def load_world(path) -> WorldSpec:
    with open(path, encoding="utf-8") as f:
        return world_from_dict(json.load(f))
