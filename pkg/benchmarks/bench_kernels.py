"""Compare the compiled kernels against the pure-Python fallback.

Times BFS shortest paths and the orienteering solver on randomly generated
knowledge graphs of growing size, printing a small table with speedups.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import random
import time

import numpy as np

from explorebench import kernels


def random_instance(rng, n_rooms, n_balls, budget):
    """A connected random room graph plus an orienteering instance over it."""
    edges = [(i - 1, i) for i in range(1, n_rooms)]
    extra = n_rooms // 2
    for _ in range(extra):
        a, b = rng.sample(range(n_rooms), 2)
        edges.append((min(a, b), max(a, b)))
    adj = [[] for _ in range(n_rooms)]
    for a, b in set(edges):
        adj[a].append(b)
        adj[b].append(a)
    offsets = [0]
    neighbors = []
    for nbs in adj:
        neighbors.extend(sorted(nbs))
        offsets.append(len(neighbors))
    offsets = np.asarray(offsets, dtype=np.int64)
    neighbors = np.asarray(neighbors, dtype=np.int64)

    ball_rooms = rng.sample(range(n_rooms), n_balls)
    nodes = [0] + ball_rooms
    n = len(nodes)
    costs = np.empty(n * n, dtype=np.int64)
    rows = {}
    for room in set(nodes):
        rows[room] = kernels.pure_bfs_from(n_rooms, offsets, neighbors, room)
    for i, a in enumerate(nodes):
        for j, b in enumerate(nodes):
            costs[i * n + j] = rows[a][b]
    prizes = np.asarray([rng.randint(1, 10) for _ in ball_rooms], dtype=np.int64)
    return offsets, neighbors, n_rooms, costs, prizes, budget


def time_fn(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if kernels.BACKEND != "compiled":
        print("compiled backend unavailable; timing the pure fallback only")

    print(f"{'case':<24}{'pure (ms)':>12}{'compiled (ms)':>15}{'speedup':>10}")
    rng = random.Random(12345)
    for n_rooms, n_balls in [(25, 8), (49, 12), (100, 16), (225, 20)]:
        offsets, neighbors, n, costs, prizes, budget = random_instance(
            rng, n_rooms, n_balls, budget=n_rooms // 3
        )

        def pure():
            kernels.pure_bfs_from(n, offsets, neighbors, 0)
            kernels.pure_best_orienteering(tuple(costs), tuple(prizes), budget, 3)

        t_pure = time_fn(pure, args.repeats) * 1e3
        label = f"{n_rooms} rooms / {n_balls} balls"
        if kernels.BACKEND == "compiled":

            def compiled():
                kernels.bfs_from(n, offsets, neighbors, 0)
                kernels.best_orienteering(costs, prizes, budget, 3)

            t_comp = time_fn(compiled, args.repeats) * 1e3
            print(f"{label:<24}{t_pure:>12.3f}{t_comp:>15.3f}{t_pure / t_comp:>9.1f}x")
        else:
            print(f"{label:<24}{t_pure:>12.3f}{'-':>15}{'-':>10}")


if __name__ == "__main__":
    main()
