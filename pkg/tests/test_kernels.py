import random

import numpy as np
import pytest

from explorebench import kernels


def csr_from_edges(n, edges):
    adj = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    offsets = [0]
    neighbors = []
    for nbs in adj:
        neighbors.extend(sorted(nbs))
        offsets.append(len(neighbors))
    return (
        np.asarray(offsets, dtype=np.int64),
        np.asarray(neighbors, dtype=np.int64),
    )


def test_backend_identifies_itself():
    assert kernels.BACKEND in ("compiled", "pure")


def test_bfs_line_graph():
    offsets, neighbors = csr_from_edges(4, [(0, 1), (1, 2), (2, 3)])
    assert list(kernels.pure_bfs_from(4, offsets, neighbors, 0)) == [0, 1, 2, 3]


def test_bfs_disconnected_marks_unreachable():
    offsets, neighbors = csr_from_edges(4, [(0, 1), (2, 3)])
    dist = list(kernels.pure_bfs_from(4, offsets, neighbors, 0))
    assert dist == [0, 1, -1, -1]


@pytest.mark.skipif(kernels.BACKEND != "compiled", reason="compiled kernel absent")
@pytest.mark.parametrize("seed", range(30))
def test_bfs_backends_agree(seed):
    rng = random.Random(f"bfs:{seed}")
    n = rng.randint(2, 40)
    edges = {(rng.randrange(n), rng.randrange(n)) for _ in range(n * 2)}
    edges = [(a, b) for a, b in edges if a != b]
    offsets, neighbors = csr_from_edges(n, edges)
    for src in range(min(n, 5)):
        assert list(kernels.bfs_from(n, offsets, neighbors, src)) == list(
            kernels.pure_bfs_from(n, offsets, neighbors, src)
        )


def random_orienteering(rng, n):
    width = n + 1
    costs = [0] * (width * width)
    for i in range(width):
        for j in range(i + 1, width):
            c = rng.choice([-1, rng.randint(0, 5)])
            costs[i * width + j] = costs[j * width + i] = c
    prizes = [rng.randint(1, 9) for _ in range(n)]
    return costs, prizes, rng.randint(0, 10)


@pytest.mark.skipif(kernels.BACKEND != "compiled", reason="compiled kernel absent")
@pytest.mark.parametrize("seed", range(50))
def test_orienteering_backends_agree(seed):
    rng = random.Random(f"ori:{seed}")
    costs, prizes, budget = random_orienteering(rng, rng.randint(1, 7))
    pure = kernels.pure_best_orienteering(tuple(costs), tuple(prizes), budget, 3)
    compiled = kernels.best_orienteering(
        np.asarray(costs, dtype=np.int64),
        np.asarray(prizes, dtype=np.int64),
        budget,
        3,
    )
    assert pure[0] == compiled[0]
    assert tuple(pure[1]) == tuple(compiled[1])
    assert pure[2] == compiled[2]


def test_orienteering_zero_budget_allows_colocated_prize():
    # Cost 0 between start and a ball means same room: collectible for free.
    costs = [0, 0, 0, 0]
    assert kernels.pure_best_orienteering(tuple(costs), (7,), 0, 3)[0] == 7


def test_orienteering_cap_limits_pickups():
    width = 4
    costs = [0] * (width * width)
    value, path, cost = kernels.pure_best_orienteering(
        tuple(costs), (5, 5, 5), 10, 2
    )
    assert value == 10
    assert len(path) == 2


def test_pure_env_override(monkeypatch):
    import importlib
    import subprocess
    import sys

    code = (
        "import os; os.environ['EXPLOREBENCH_PURE']='1'; "
        "from explorebench import kernels; print(kernels.BACKEND)"
    )
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == "pure"
