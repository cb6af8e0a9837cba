"""Brute-force reference implementations in plain Python.

Squared distances are summed as dx*dx + dy*dy + dz*dz, left to right, so
the compiled kernels must match these bit for bit.
"""

import math


def sqdist(p, q):
    dx = p[0] - q[0]
    dy = p[1] - q[1]
    dz = p[2] - q[2]
    return dx * dx + dy * dy + dz * dz


def nearest(points, q):
    best_i, best_d = -1, math.inf
    for i, p in enumerate(points):
        d = sqdist(p, q)
        if d < best_d:
            best_i, best_d = i, d
    return best_i, best_d


def min_dist_to_set(points, chosen, q):
    return min(sqdist(points[c], q) for c in chosen)


def greedy_fps(points, n, start):
    """Farthest point sampling by recomputing every min distance from scratch."""
    chosen = [start]
    while len(chosen) < n:
        best_i, best_d = -1, -math.inf
        for i, p in enumerate(points):
            if i in chosen:
                continue
            d = min_dist_to_set(points, chosen, p)
            if d > best_d:
                best_i, best_d = i, d
        chosen.append(best_i)
    return chosen


def directed_error(src, dst):
    return sum(nearest(dst, p)[1] for p in src) / len(src)


def chamfer(a, b):
    ab = directed_error(a, b)
    ba = directed_error(b, a)
    return ab, ba, ab + ba


def cell_of(p, origin, edge):
    return tuple(math.floor((v - o) / edge) for v, o in zip(p, origin))


def cell_representatives(points, edge, origin=None):
    """Closest-to-center member per occupied cell, cells in lexicographic order."""
    if origin is None:
        origin = tuple(min(p[a] for p in points) for a in range(3))
    best = {}
    for i, p in enumerate(points):
        c = cell_of(p, origin, edge)
        center = tuple(o + (k + 0.5) * edge for o, k in zip(origin, c))
        d = sqdist(p, center)
        if c not in best or d < best[c][0]:
            best[c] = (d, i)
    return [best[c][1] for c in sorted(best)]


def covering_radius(points, chosen):
    """Largest distance from any input point to its nearest chosen point."""
    return math.sqrt(max(min_dist_to_set(points, chosen, p) for p in points))


def greedy_extend(points, chosen, count, candidates):
    """Add ``count`` farthest candidates to an existing selection, one at a time."""
    chosen = list(chosen)
    added = []
    for _ in range(count):
        best_i, best_d = -1, -math.inf
        for i in candidates:
            if i in chosen:
                continue
            d = min_dist_to_set(points, chosen, points[i])
            if d > best_d:
                best_i, best_d = i, d
        chosen.append(best_i)
        added.append(best_i)
    return added


def cell_ifps_at_edge(points, n, edge, start_unit, keep_fps=False):
    """Cell-IFPS output once the grid edge is fixed.

    ``start_unit`` in [0, 1) picks the removal start among the representatives.
    """
    reps = cell_representatives(points, edge)
    m = len(reps)
    if m == n:
        return reps
    if m > n:
        sub = [points[i] for i in reps]
        start = min(int(start_unit * m), m - 1)
        if keep_fps:
            return [reps[k] for k in greedy_fps(sub, n, start)]
        moved = set(greedy_fps(sub, m - n, start))
        return [r for k, r in enumerate(reps) if k not in moved]
    rest = [i for i in range(len(points)) if i not in set(reps)]
    return reps + greedy_extend(points, reps, n - m, rest)
