"""Compiled inner loops shared by the samplers.

All kernels take coordinates as a (3, N) float64 array (one contiguous row
per axis) and compute squared distances as ``dx*dx + dy*dy + dz*dz``,
evaluated left to right, so results match a plain Python loop bit for bit.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _first_max(dist):
    """Lowest index holding the largest value of ``dist``."""
    n = dist.shape[0]
    # Eight independent running maxima let the reduction vectorize.
    lanes = np.full(8, -np.inf)
    body = n - n % 8
    for i in range(0, body, 8):
        for k in range(8):
            d = dist[i + k]
            lanes[k] = d if d > lanes[k] else lanes[k]
    best = -np.inf
    for k in range(8):
        if lanes[k] > best:
            best = lanes[k]
    for i in range(body, n):
        if dist[i] > best:
            best = dist[i]
    i = 0
    while dist[i] != best:
        i += 1
    return i


@njit(cache=True)
def farthest_points(cols, count, first, dist):
    """Greedy farthest-point selection.

    ``dist`` carries each point's squared distance to the already-selected
    set and is updated in place; ``-inf`` marks a point as selected. With
    ``first < 0`` the first pick is the open point with the largest
    ``dist``. Ties always go to the lowest index.
    """
    n = cols.shape[1]
    x = cols[0]
    y = cols[1]
    z = cols[2]
    out = np.empty(count, np.int64)
    if count == 0:
        return out
    i = _first_max(dist) if first < 0 else first
    for k in range(count):
        out[k] = i
        dist[i] = -np.inf
        if k + 1 == count:
            break
        xi = x[i]
        yi = y[i]
        zi = z[i]
        for j in range(n):
            dx = x[j] - xi
            dy = y[j] - yi
            dz = z[j] - zi
            v = dx * dx + dy * dy + dz * dz
            # Selected points hold -inf and keep it.
            dist[j] = v if v < dist[j] else dist[j]
        i = _first_max(dist)
    return out


@njit(cache=True)
def bounds(cols):
    lo = np.empty(3)
    hi = np.empty(3)
    for a in range(3):
        lo[a] = cols[a, 0]
        hi[a] = cols[a, 0]
        for j in range(1, cols.shape[1]):
            v = cols[a, j]
            if v < lo[a]:
                lo[a] = v
            elif v > hi[a]:
                hi[a] = v
    return lo, hi


@njit(cache=True, inline="always")
def _cell(v, o, edge):
    return np.int64(math.floor((v - o) / edge))


@njit(cache=True)
def grid_layout(lo, hi, origin, edge):
    """Cell coordinates of the bounding-box corners: (base, dims, dims product).

    The product is returned as a float so it cannot overflow.
    """
    base = np.empty(3, np.int64)
    dims = np.empty(3, np.int64)
    total = 1.0
    for a in range(3):
        base[a] = _cell(lo[a], origin[a], edge)
        dims[a] = _cell(hi[a], origin[a], edge) - base[a] + 1
        total *= dims[a]
    return base, dims, total


@njit(cache=True)
def _axis_cells(v, o, edge, base, out):
    # Kept to one flat loop over a contiguous row so it vectorizes.
    for j in range(v.shape[0]):
        out[j] = np.int64(math.floor((v[j] - o) / edge)) - base


@njit(cache=True)
def _dense_ids(cols, origin, edge, base, dims):
    n = cols.shape[1]
    ids = np.empty(n, np.int64)
    tmp = np.empty(n, np.int64)
    _axis_cells(cols[0], origin[0], edge, base[0], ids)
    _axis_cells(cols[1], origin[1], edge, base[1], tmp)
    d1 = dims[1]
    for j in range(n):
        ids[j] = ids[j] * d1 + tmp[j]
    _axis_cells(cols[2], origin[2], edge, base[2], tmp)
    d2 = dims[2]
    for j in range(n):
        ids[j] = ids[j] * d2 + tmp[j]
    return ids


@njit(cache=True)
def _ranked_ids(cols, origin, edge):
    """Rank of each point's cell among the occupied cells in lexicographic order."""
    n = cols.shape[1]
    c = np.empty((3, n), np.int64)
    for a in range(3):
        for j in range(n):
            c[a, j] = _cell(cols[a, j], origin[a], edge)
    order = np.argsort(c[2], kind="mergesort")
    order = order[np.argsort(c[1][order], kind="mergesort")]
    order = order[np.argsort(c[0][order], kind="mergesort")]
    ids = np.empty(n, np.int64)
    rank = -1
    for t in range(n):
        j = order[t]
        if t == 0:
            rank = 0
        else:
            p = order[t - 1]
            if c[0, j] != c[0, p] or c[1, j] != c[1, p] or c[2, j] != c[2, p]:
                rank += 1
        ids[j] = rank
    return ids, rank + 1


@njit(cache=True)
def cell_ids(cols, origin, edge, lo, hi, limit):
    """Per-point cell id, increasing with lexicographic cell order, and the id range.

    Uses flat ids over the bounding box when that box spans at most
    ``limit`` cells, otherwise ranks of the occupied cells.
    """
    base, dims, total = grid_layout(lo, hi, origin, edge)
    if total > limit:
        return _ranked_ids(cols, origin, edge)
    return _dense_ids(cols, origin, edge, base, dims), np.int64(total)


@njit(cache=True)
def count_cells(cols, origin, edge, lo, hi, limit):
    """Number of occupied cells."""
    base, dims, total = grid_layout(lo, hi, origin, edge)
    if total > limit:
        return _ranked_ids(cols, origin, edge)[1]
    occ = np.zeros(np.int64(total), np.uint8)
    m = 0
    for k in _dense_ids(cols, origin, edge, base, dims):
        # Branch-free: counts are unpredictable while the edge is searched.
        m += 1 - occ[k]
        occ[k] = 1
    return m


@njit(cache=True)
def _axis_center_sq(v, o, edge, acc):
    for j in range(v.shape[0]):
        d = v[j] - (o + (np.int64(math.floor((v[j] - o) / edge)) + 0.5) * edge)
        acc[j] += d * d


@njit(cache=True)
def _center_sqdist(cols, origin, edge):
    """Squared distance from each point to the center of its cell.

    Accumulated axis by axis, which is the same left-to-right sum as
    ``dx*dx + dy*dy + dz*dz``.
    """
    acc = np.zeros(cols.shape[1])
    for a in range(3):
        _axis_center_sq(cols[a], origin[a], edge, acc)
    return acc


@njit(cache=True)
def representatives(cols, origin, edge, lo, hi, limit):
    """Per occupied cell, the member closest to the cell center (lowest index on ties).

    Returned in lexicographic cell order.
    """
    ids, ncells = cell_ids(cols, origin, edge, lo, hi, limit)
    sq = _center_sqdist(cols, origin, edge)
    best = np.full(ncells, np.inf)
    who = np.full(ncells, -1, np.int64)
    for j in range(cols.shape[1]):
        k = ids[j]
        v = sq[j]
        if who[k] < 0 or v < best[k]:
            best[k] = v
            who[k] = j
    m = 0
    for k in range(ncells):
        if who[k] >= 0:
            who[m] = who[k]
            m += 1
    return who[:m].copy()


@njit(cache=True)
def potential_cells(occupied, size):
    """Invert the occupancy curve ``C * (1 - exp(-size / C))`` for ``C``.

    With ``size`` points spread over ``C`` candidate cells, that many cells
    are expected to be occupied. ``C`` scales like a power of the cell edge
    even where the raw occupied count saturates toward ``size``.
    """
    occupied = min(occupied, size - 0.5)
    # The curve is concave and increasing, so Newton steps from below
    # approach the root monotonically.
    c = occupied
    for _ in range(100):
        x = size / c
        e = math.exp(-x)
        step = (occupied - c * (1.0 - e)) / (1.0 - e - x * e)
        c += step
        if step <= 1e-12 * c:
            break
    return c


@njit(cache=True)
def search_edge(cols, lo, hi, limit, n, upper, edge, rounds, slope_prior, slope_lo, slope_hi, min_bracket, min_edge):
    """Resize the cell edge until the occupied count lands in ``[n, upper]``.

    Works in (log edge, log potential cells), where the count curve is
    close to a line: secant steps until the target is bracketed, then
    clamped interpolation inside the bracket. Returns the edges and counts
    tried, in order.
    """
    size = cols.shape[1]
    edges = np.empty(rounds)
    counts = np.empty(rounds, np.int64)
    log_target = math.log(potential_cells(0.5 * (n + upper), size))
    ox = oy = ux = uy = lx = ly = 0.0
    have_over = have_under = have_last = False
    r = 0
    while r < rounds:
        m = count_cells(cols, lo, edge, lo, hi, limit)
        edges[r] = edge
        counts[r] = m
        r += 1
        if (n <= m and m <= upper) or r == rounds:
            break
        px = math.log(edge)
        py = math.log(potential_cells(m, size))
        if m > upper:
            ox, oy, have_over = px, py, True
        else:
            ux, uy, have_under = px, py, True
        if have_over and have_under:
            if abs(ux - ox) < min_bracket:
                # The bracket straddles a jump in the count curve.
                break
            t = (log_target - oy) / (uy - oy) if uy != oy else 0.5
            # Stay clear of the bracket ends so step-like curves still shrink it.
            t = min(0.85, max(0.15, t))
            log_edge = ox + t * (ux - ox)
        else:
            slope = slope_prior
            if have_last and lx != px and ly != py:
                slope = min(slope_hi, max(slope_lo, (py - ly) / (px - lx)))
            log_edge = px + (log_target - py) / slope
        lx, ly, have_last = px, py, True
        edge = max(math.exp(log_edge), min_edge)
    return edges[:r], counts[:r]


@njit(cache=True)
def edge_from_extent(extent, n, overshoot, degenerate):
    """Cell edge spreading the bounding-box volume over ``overshoot * n`` cells.

    Axes flatter than ``degenerate`` are dropped and the root order shrinks
    to match; with no axes left the edge is 1.
    """
    vol = 1.0
    dims = 0
    for a in range(3):
        if extent[a] >= degenerate:
            vol *= extent[a]
            dims += 1
    if dims == 0:
        return 1.0
    return (vol / (overshoot * n)) ** (1.0 / dims)


@njit(cache=True)
def cell_ifps_select(cols, n, upper, overshoot, degenerate, rounds, slope_prior, slope_lo, slope_hi,
                     min_bracket, limit, start_unit, keep_fps):
    """Grid search, cell representatives and removal in one pass.

    Returns ``(indices, edges, counts, pick)``. When the chosen grid holds
    fewer than ``n`` representatives, ``indices`` are those representatives
    and the caller adds the rest.
    """
    lo, hi = bounds(cols)
    reach = 0.0
    for a in range(3):
        reach = max(reach, hi[a] - lo[a])
    min_edge = max(reach, 1.0) * 2.0**-40
    edge = max(edge_from_extent(hi - lo, n, overshoot, degenerate), min_edge)
    edges, counts = search_edge(cols, lo, hi, limit, n, upper, edge, rounds, slope_prior, slope_lo, slope_hi,
                                min_bracket, min_edge)
    # Prefer the smallest overshoot (cheap removal); otherwise the largest undershoot.
    pick = -1
    for r in range(counts.shape[0]):
        if counts[r] >= n and (pick < 0 or counts[r] < counts[pick]):
            pick = r
    if pick < 0:
        pick = 0
        for r in range(counts.shape[0]):
            if counts[r] > counts[pick]:
                pick = r
    picked = representatives(cols, lo, edges[pick], lo, hi, limit)
    m = picked.shape[0]
    if m <= n:
        return picked, edges, counts, pick
    sub = np.empty((3, m))
    for a in range(3):
        for k in range(m):
            sub[a, k] = cols[a, picked[k]]
    start = min(np.int64(start_unit * m), m - 1)
    dist = np.full(m, np.inf)
    if keep_fps:
        return picked[farthest_points(sub, n, start, dist)], edges, counts, pick
    moved = farthest_points(sub, m - n, start, dist)
    keep = np.ones(m, np.bool_)
    for k in moved:
        keep[k] = False
    return picked[keep], edges, counts, pick
