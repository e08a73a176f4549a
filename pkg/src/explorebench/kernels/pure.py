"""Pure-Python kernels; same contract as the compiled _core module."""

BACKEND = "pure"

INF = float("inf")


def bfs_from(n_nodes, offsets, neighbors, source):
    """Shortest hop counts over a CSR adjacency; -1 for unreachable."""
    dist = [-1] * n_nodes
    dist[source] = 0
    frontier = [source]
    while frontier:
        nxt = []
        for u in frontier:
            for k in range(offsets[u], offsets[u + 1]):
                v = neighbors[k]
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return dist


def best_orienteering(costs, prizes, budget, cap):
    """Exact maximum-prize ordered subset of at most `cap` nodes.

    costs is a (n+1)x(n+1) row-major list/array of travel costs with node 0
    the start; negative entries mean unreachable. Returns (value, path,
    cost_used) where path holds 1-based node indices. Ties on value resolve
    to the lexicographically smallest index sequence.
    """
    n = len(prizes)
    size = n + 1
    best_value = 0
    best_path = ()
    best_cost = 0

    def consider(value, path, cost):
        nonlocal best_value, best_path, best_cost
        if value > best_value or (value == best_value and path < best_path):
            best_value, best_path, best_cost = value, path, cost

    def extend(last, used, value, cost, path):
        if len(path) == cap:
            return
        for j in range(1, size):
            if j in used:
                continue
            step = costs[last * size + j]
            if step < 0 or cost + step > budget:
                continue
            new_path = path + (j,)
            consider(value + prizes[j - 1], new_path, cost + step)
            extend(j, used | {j}, value + prizes[j - 1], cost + step, new_path)

    extend(0, frozenset(), 0, 0, ())
    return best_value, best_path, best_cost
