# cython: boundscheck=False, wraparound=False, language_level=3
"""Compiled kernels for the hot per-interaction oracle loop."""

from libc.stdlib cimport free, malloc

BACKEND = "compiled"


def bfs_from(int n_nodes, long[::1] offsets, long[::1] neighbors, int source):
    """Shortest hop counts over a CSR adjacency; -1 for unreachable."""
    cdef long *dist = <long *> malloc(n_nodes * sizeof(long))
    cdef long *queue = <long *> malloc(n_nodes * sizeof(long))
    cdef int head = 0, tail = 0
    cdef long u, v
    cdef long k
    cdef int i
    try:
        for i in range(n_nodes):
            dist[i] = -1
        dist[source] = 0
        queue[tail] = source
        tail += 1
        while head < tail:
            u = queue[head]
            head += 1
            for k in range(offsets[u], offsets[u + 1]):
                v = neighbors[k]
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue[tail] = v
                    tail += 1
        return [dist[i] for i in range(n_nodes)]
    finally:
        free(dist)
        free(queue)


cdef int _lex_less(long *a, int na, long *b, int nb) noexcept:
    cdef int i, m
    m = na if na < nb else nb
    for i in range(m):
        if a[i] != b[i]:
            return a[i] < b[i]
    return na < nb


def best_orienteering(long[::1] costs, long[::1] prizes, long budget, int cap):
    """Exact maximum-prize ordered subset of at most `cap` nodes.

    Same contract as the pure backend: costs row-major over (n+1) nodes with
    node 0 the start, negative entries unreachable; returns 1-based path.
    """
    cdef int n = prizes.shape[0]
    cdef int size = n + 1
    cdef long best_value = 0, best_cost = 0
    cdef long *best_path = <long *> malloc(cap * sizeof(long))
    cdef long *path = <long *> malloc(cap * sizeof(long))
    cdef long *cost_at = <long *> malloc((cap + 1) * sizeof(long))
    cdef long *value_at = <long *> malloc((cap + 1) * sizeof(long))
    cdef long *next_j = <long *> malloc((cap + 1) * sizeof(long))
    cdef int best_len = 0
    cdef int depth, i
    cdef long j, last, step, used_mask
    try:
        # Iterative DFS over ordered subsets; n is small (<= ~64).
        depth = 0
        cost_at[0] = 0
        value_at[0] = 0
        next_j[0] = 1
        used_mask = 0
        while depth >= 0:
            j = next_j[depth]
            if j > n or depth == cap:
                depth -= 1
                if depth >= 0:
                    used_mask ^= 1 << path[depth]
                    next_j[depth] += 1
                continue
            next_j[depth] = j  # current candidate at this depth
            if used_mask & (1 << j):
                next_j[depth] += 1
                continue
            last = path[depth - 1] if depth > 0 else 0
            step = costs[last * size + j]
            if step < 0 or cost_at[depth] + step > budget:
                next_j[depth] += 1
                continue
            path[depth] = j
            cost_at[depth + 1] = cost_at[depth] + step
            value_at[depth + 1] = value_at[depth] + prizes[j - 1]
            if value_at[depth + 1] > best_value or (
                value_at[depth + 1] == best_value
                and _lex_less(path, depth + 1, best_path, best_len)
            ):
                best_value = value_at[depth + 1]
                best_cost = cost_at[depth + 1]
                best_len = depth + 1
                for i in range(best_len):
                    best_path[i] = path[i]
            used_mask |= 1 << j
            depth += 1
            next_j[depth] = 1
        return best_value, tuple(best_path[i] for i in range(best_len)), best_cost
    finally:
        free(best_path)
        free(path)
        free(cost_at)
        free(value_at)
        free(next_j)
