"""Independent brute-force oracles used by the test-suite.

Nothing here imports solver code paths: every oracle recomputes from raw
coordinates / quantities so it can check the implementation it is aimed at.
"""

from __future__ import annotations

import functools
import itertools
import math

TOL = 1e-9


def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]


def min_bins_by_enumeration(sizes, capacity):
    best = None
    for part in set_partitions(range(len(sizes))):
        if all(sum(sizes[i] for i in b) <= capacity + TOL for b in part):
            if best is None or len(part) < best:
                best = len(part)
    return best or 0


@functools.lru_cache(maxsize=None)
def min_bins_integer(counts, capacity):
    """Minimum bins for integer sizes; ``counts[k]`` items have size ``k + 1``.

    The largest remaining item opens a bin, every multiset of the other
    items that fits beside it is tried, and the rest is solved recursively.
    """
    counts = list(counts)
    top = max((k for k, c in enumerate(counts) if c), default=None)
    if top is None:
        return 0
    counts[top] -= 1
    best = None

    def fill(k, room, taken):
        nonlocal best
        if k < 0:
            rest = tuple(c - t for c, t in zip(counts, taken))
            value = 1 + min_bins_integer(rest, capacity)
            if best is None or value < best:
                best = value
            return
        size = k + 1
        for m in range(min(counts[k], room // size) + 1):
            taken[k] = m
            fill(k - 1, room - m * size, taken)
        taken[k] = 0

    fill(top, capacity - (top + 1), [0] * len(counts))
    return best


def raw_distance(inst, a, b):
    """Distance between nodes computed straight from the instance coordinates."""
    if inst.metric_mode == "matrix":
        return inst.matrix[a][b]
    pa = inst.depot if a == 0 else (inst.sites[a - 1].x, inst.sites[a - 1].y)
    pb = inst.depot if b == 0 else (inst.sites[b - 1].x, inst.sites[b - 1].y)
    return math.hypot(pa[0] - pb[0], pa[1] - pb[1])


def sequence_value(inst, seq, start_node=0, start_time=0.0, base_load=0.0):
    """(feasible, profit) of a depot-ending sequence, recomputed from scratch."""
    t = start_time
    prev = start_node
    cost = 0.0
    load = base_load
    for sid in seq:
        node = sid + 1
        dist = raw_distance(inst, prev, node)
        cost += dist
        t = max(inst.sites[sid].open, t + dist / inst.speed)
        if t > inst.sites[sid].close + TOL:
            return False, None
        load += inst.sites[sid].quantity
        prev = node
    cost += raw_distance(inst, prev, 0) if seq else 0.0
    return True, min(inst.capacity, load) - cost


def best_single_route(inst, sites):
    """Max profit over every ordered sub-sequence of ``sites`` (>= 0: empty route).

    Depth-first over all orderings; a prefix that misses a window is cut
    because every extension of it misses the same window.
    """
    best = [0.0, ()]

    def extend(prefix, node, t, cost, load, left):
        if prefix:
            profit = min(inst.capacity, load) - cost - raw_distance(inst, node, 0)
            if profit > best[0] + TOL:
                best[0], best[1] = profit, tuple(prefix)
        for sid in left:
            dist = raw_distance(inst, node, sid + 1)
            arrive = t + dist / inst.speed
            if arrive > inst.sites[sid].close + TOL:
                continue
            prefix.append(sid)
            extend(prefix, sid + 1, max(inst.sites[sid].open, arrive), cost + dist,
                   load + inst.sites[sid].quantity, [x for x in left if x != sid])
            prefix.pop()

    extend([], 0, 0.0, 0.0, 0.0, list(sites))
    return best[0], best[1]


def multi_route_optimum(inst):
    """Optimal total profit over vertex-disjoint route sets, by enumeration.

    One depth-first pass over every window-feasible ordering records the
    best single route per visited set.  Blocks of every set partition of
    the sites are then valued by their best route over any subset.
    """
    n = inst.n
    exact = {}

    def extend(visited, node, t, cost, load):
        if visited:
            profit = min(inst.capacity, load) - cost - raw_distance(inst, node, 0)
            if profit > exact.get(visited, -math.inf):
                exact[visited] = profit
        for sid in range(n):
            if sid in visited:
                continue
            dist = raw_distance(inst, node, sid + 1)
            arrive = t + dist / inst.speed
            if arrive > inst.sites[sid].close + TOL:
                continue
            extend(visited | {sid}, sid + 1, max(inst.sites[sid].open, arrive), cost + dist,
                   load + inst.sites[sid].quantity)

    extend(frozenset(), 0, 0.0, 0.0, 0.0)
    within = {}
    for k in range(n + 1):
        for combo in itertools.combinations(range(n), k):
            key = frozenset(combo)
            value = max(0.0, exact.get(key, 0.0))
            for sid in combo:
                value = max(value, within[key - {sid}])
            within[key] = value
    best_total = 0.0
    for part in set_partitions(range(n)):
        best_total = max(best_total, sum(within[frozenset(b)] for b in part))
    return best_total


def wspd_violations(points, pairs, s):
    """Coverage and separation defects of a pair list, by direct scanning."""
    n = len(points)
    count = {}
    for a, b in pairs:
        for u in a:
            for v in b:
                key = (min(u, v), max(u, v))
                count[key] = count.get(key, 0) + 1
    problems = []
    for u in range(n):
        for v in range(u + 1, n):
            if count.get((u, v), 0) != 1:
                problems.append(("coverage", u, v, count.get((u, v), 0)))

    def ball(ids):
        xs = [points[i][0] for i in ids]
        ys = [points[i][1] for i in ids]
        cx, cy = (min(xs) + max(xs)) / 2, (min(ys) + max(ys)) / 2
        r = math.hypot(max(xs) - min(xs), max(ys) - min(ys)) / 2
        return cx, cy, r

    for a, b in pairs:
        if set(a) & set(b):
            problems.append(("overlap", tuple(a), tuple(b)))
        ax, ay, ar = ball(a)
        bx, by, br = ball(b)
        gap = math.hypot(ax - bx, ay - by) - ar - br
        if gap < s * 2 * max(ar, br) - 1e-9:
            problems.append(("separation", tuple(a), tuple(b)))
    return problems
