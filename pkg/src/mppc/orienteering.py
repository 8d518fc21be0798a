"""Single-vehicle profit routes over a subset of sites, under time windows.

Three strategies share one interface: an exact label-setting DP over
(visited set, last site) for small subsets, cheapest feasible insertion for
large ones, and a deadline-bucketed chain that schedules dyadic deadline
groups earliest first.  ``repair_route`` removes late visits.

Equal-profit routes are resolved toward fewer visits, then toward the
lexicographically smaller visit sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ParameterError, SizeLimitError
from .instance import TIME_TOL, Instance, Route, make_route, schedule

CROSSOVER = 16
PARETO_CAP = 64
PROFIT_TOL = 1e-9
STRATEGIES = ("exact_dp", "insertion", "bucketed")


@dataclass(frozen=True)
class OrienteeringQuery:
    instance: Instance
    sites: tuple[int, ...]
    strategy: str = "exact_dp"
    crossover: int = CROSSOVER

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(sorted(set(int(s) for s in self.sites))))
        if not self.sites:
            raise ParameterError("orienteering query needs at least one site")
        bad = [s for s in self.sites if not 0 <= s < self.instance.n]
        if bad:
            raise ParameterError(f"unknown site ids {bad}")
        if self.strategy not in STRATEGIES:
            raise ParameterError(f"unknown strategy {self.strategy!r}")


def _better(value, path, best_value, best_path) -> bool:
    if value > best_value + PROFIT_TOL:
        return True
    if value >= best_value - PROFIT_TOL:
        return (len(path), path) < (len(best_path), best_path)
    return False


def _add_label(labels: list, arr: float, cost: float, path: tuple, cap: int) -> None:
    for a, c, p in labels:
        if a <= arr and c <= cost and (c < cost or p <= path):
            return
    labels[:] = [lab for lab in labels
                 if not (arr <= lab[0] and cost <= lab[1] and (cost < lab[1] or path <= lab[2]))]
    labels.append((arr, cost, path))
    if len(labels) > cap:
        labels.remove(max(labels, key=lambda lab: (lab[1], lab[0])))


def _extend_exact(inst: Instance, sites: Sequence[int], start_node: int = 0, start_time: float = 0.0,
                  base_load: float = 0.0, cap: int = PARETO_CAP) -> tuple[float, tuple[int, ...]]:
    """Best extension of a partial route by an ordered subset of ``sites``.

    The partial route stands at ``start_node`` at ``start_time`` carrying
    ``base_load``.  The value maximized is the capped revenue of the whole
    route minus the extension cost, including the return to the depot.
    """
    d = inst.metric.d
    speed = inst.speed
    Q = inst.capacity
    k = len(sites)
    nodes = [s + 1 for s in sites]
    opens = [inst.sites[s].open for s in sites]
    closes = [inst.sites[s].close for s in sites]
    qs = [inst.sites[s].quantity for s in sites]

    best_value = min(Q, base_load) - d[start_node][0]
    best_path: tuple[int, ...] = ()
    mask_load = {0: base_load}

    layer: dict[tuple[int, int], list] = {}
    for j in range(k):
        dist = d[start_node][nodes[j]]
        t = start_time + dist / speed
        if t <= closes[j] + TIME_TOL:
            layer[(1 << j, j)] = [(max(opens[j], t), dist, (sites[j],))]

    while layer:
        nxt: dict[tuple[int, int], list] = {}
        for (mask, j), labels in layer.items():
            load = mask_load.get(mask)
            if load is None:
                low = mask & -mask
                load = mask_load[mask ^ low] + qs[low.bit_length() - 1]
                mask_load[mask] = load
            revenue = min(Q, load)
            back = d[nodes[j]][0]
            for arr, cost, path in labels:
                value = revenue - cost - back
                if _better(value, path, best_value, best_path):
                    best_value, best_path = value, path
            # a saturated vehicle gains nothing from further detours (metric costs)
            if load >= Q - TIME_TOL:
                continue
            row = d[nodes[j]]
            for j2 in range(k):
                if mask >> j2 & 1:
                    continue
                dist = row[nodes[j2]]
                step = dist / speed
                close = closes[j2]
                key = (mask | 1 << j2, j2)
                for arr, cost, path in labels:
                    t = arr + step
                    if t > close + TIME_TOL:
                        continue
                    bucket = nxt.get(key)
                    if bucket is None:
                        nxt[key] = [(max(opens[j2], t), cost + dist, path + (sites[j2],))]
                    else:
                        _add_label(bucket, max(opens[j2], t), cost + dist, path + (sites[j2],), cap)
        layer = nxt
    return best_value, best_path


def solve_exact_dp(query: OrienteeringQuery) -> Route:
    """Optimal route over any ordered sub-subset of the query sites."""
    if len(query.sites) > query.crossover:
        raise SizeLimitError(f"exact DP limited to {query.crossover} sites, got {len(query.sites)}")
    _, path = _extend_exact(query.instance, query.sites)
    return make_route(query.instance, path)


# ---------------------------------------------------------------- insertion

def _insertion_feasible(inst: Instance, route: list[int], arrivals: list[float], pos: int, sid: int) -> bool:
    d = inst.metric.d
    prev = 0 if pos == 0 else route[pos - 1] + 1
    t = 0.0 if pos == 0 else arrivals[pos - 1]
    site = inst.sites[sid]
    t = t + d[prev][sid + 1] / inst.speed
    if t > site.close + TIME_TOL:
        return False
    t = max(site.open, t)
    prev = sid + 1
    for k in range(pos, len(route)):
        v = route[k]
        t = max(inst.sites[v].open, t + d[prev][v + 1] / inst.speed)
        if t > inst.sites[v].close + TIME_TOL:
            return False
        if t <= arrivals[k]:
            return True  # schedule from here on is unchanged
        prev = v + 1
    return True


def _insert_greedily(inst: Instance, candidates: Iterable[int], route: Sequence[int] = ()) -> list[int]:
    """Cheapest feasible insertion of ``candidates`` into ``route``.

    Each round inserts the (site, position) with the largest positive score
    ``marginal capped revenue - detour cost``; the route stays feasible.
    """
    d = inst.metric.d
    Q = inst.capacity
    route = list(route)
    remaining = sorted(set(candidates) - set(route))
    load = sum(inst.sites[v].quantity for v in route)
    arrivals = schedule(inst, route)
    while remaining:
        rev_now = min(Q, load)
        nodes = [0] + [v + 1 for v in route] + [0]
        best = None
        for sid in remaining:
            gain = min(Q, load + inst.sites[sid].quantity) - rev_now
            if gain <= PROFIT_TOL:
                continue
            node = sid + 1
            for pos in range(len(route) + 1):
                a, b = nodes[pos], nodes[pos + 1]
                score = gain - (d[a][node] + d[node][b] - d[a][b])
                if score <= PROFIT_TOL or (best is not None and score <= best[0] + PROFIT_TOL):
                    continue
                if _insertion_feasible(inst, route, arrivals, pos, sid):
                    best = (score, sid, pos)
        if best is None:
            break
        _, sid, pos = best
        route.insert(pos, sid)
        remaining.remove(sid)
        load += inst.sites[sid].quantity
        arrivals = schedule(inst, route)
    return route


def solve_insertion(query: OrienteeringQuery) -> Route:
    return make_route(query.instance, _insert_greedily(query.instance, query.sites))


# ---------------------------------------------------------------- deadline buckets

@dataclass(frozen=True)
class DeadlineBuckets:
    """Nonempty deadline groups, latest deadlines first.

    ``levels[g]`` is the dyadic level of ``groups[g]``: level L holds the
    sites whose window close lies in (T/2^(L+1), T/2^L].  Sites closing at 0
    share the deepest level reachable by an integer deadline.
    """
    groups: tuple[tuple[int, ...], ...]
    levels: tuple[int, ...]


def deadline_level(close: int, horizon: int) -> int:
    deepest = horizon.bit_length() - 1  # floor(log2 T)
    if close <= 0:
        return deepest
    level = 0
    while close * 2 ** (level + 1) <= horizon:
        level += 1
    return level


def bucket_by_deadline(inst: Instance, subset: Iterable[int], horizon: int | None = None) -> DeadlineBuckets:
    horizon = inst.horizon if horizon is None else horizon
    if horizon < 1:
        raise ParameterError("horizon must be at least 1")
    by_level: dict[int, list[int]] = {}
    for sid in sorted(subset):
        by_level.setdefault(deadline_level(inst.sites[sid].close, horizon), []).append(sid)
    levels = sorted(by_level)
    return DeadlineBuckets(tuple(tuple(by_level[g]) for g in levels), tuple(levels))


def solve_bucketed(query: OrienteeringQuery) -> Route:
    """Chain deadline groups earliest first, then keep the best candidate.

    Candidates, in tie-break order: the chained route, each small group's
    standalone exact route, and plain insertion over the whole subset.
    """
    inst = query.instance
    buckets = bucket_by_deadline(inst, query.sites)
    groups = list(reversed(buckets.groups))
    path: list[int] = []
    for group in groups:
        if len(group) > query.crossover:
            path = _insert_greedily(inst, set(path) | set(group), path)
        elif path:
            arrivals = schedule(inst, path)
            load = sum(inst.sites[v].quantity for v in path)
            path.extend(_extend_exact(inst, group, path[-1] + 1, arrivals[-1], load)[1])
        else:
            path.extend(_extend_exact(inst, group)[1])
    standalone = []
    if len(groups) > 1:
        standalone = [_extend_exact(inst, g)[1] for g in groups if len(g) <= query.crossover]
    candidates = [repair_route(make_route(inst, path), inst)]
    candidates += [make_route(inst, p) for p in standalone]
    candidates.append(solve_insertion(query))
    best = candidates[0]
    for c in candidates[1:]:
        if c.profit > best.profit + PROFIT_TOL:
            best = c
    return best


# ---------------------------------------------------------------- repair

def repair_route(route: Route, inst: Instance) -> Route:
    """Drop visits served outside their window, splicing neighbours, to a fixpoint."""
    visits = list(route.visits)
    changed = False
    while True:
        late = None
        for k, t in enumerate(schedule(inst, visits)):
            if t > inst.sites[visits[k]].close + TIME_TOL:
                late = k
                break
        if late is None:
            break
        del visits[late]
        changed = True
    if not changed and _arrivals_valid(inst, route):
        return route
    return make_route(inst, visits, vehicle=route.vehicle)


def _arrivals_valid(inst: Instance, route: Route) -> bool:
    if not route.arrivals:
        return not route.visits
    if len(route.arrivals) != len(route.visits):
        return False
    d = inst.metric.d
    t, prev = 0.0, 0
    for v, a in zip(route.visits, route.arrivals):
        site = inst.sites[v]
        earliest = max(site.open, t + d[prev][v + 1] / inst.speed)
        if a < earliest - TIME_TOL or a > site.close + TIME_TOL:
            return False
        t, prev = a, v + 1
    return True


# ---------------------------------------------------------------- helpers for the pipelines

def solve_route(inst: Instance, sites: Iterable[int], strategy: str = "exact_dp",
                crossover: int = CROSSOVER) -> Route:
    """Dispatch on strategy; ``exact_dp`` falls back to bucketed above the crossover."""
    sites = tuple(sites)
    if not sites:
        return make_route(inst, ())
    query = OrienteeringQuery(inst, sites, strategy, crossover)
    if strategy == "exact_dp":
        if len(query.sites) <= crossover:
            return solve_exact_dp(query)
        return solve_bucketed(query)
    if strategy == "insertion":
        return solve_insertion(query)
    return solve_bucketed(query)


def all_visitable(inst: Instance, sites: Sequence[int], crossover: int = CROSSOVER) -> bool:
    """Whether one vehicle can serve every site of ``sites`` within its window.

    Exact (earliest-arrival DP over subsets) up to ``crossover`` sites; above
    that an earliest-deadline ordering is tried, so False may be conservative.
    """
    sites = sorted(sites)
    if not sites:
        return True
    d = inst.metric.d
    speed = inst.speed
    if len(sites) > crossover:
        order = sorted(sites, key=lambda s: (inst.sites[s].close, inst.sites[s].open, s))
        return all(t <= inst.sites[v].close + TIME_TOL for v, t in zip(order, schedule(inst, order)))
    k = len(sites)
    full = (1 << k) - 1
    layer: dict[tuple[int, int], float] = {}
    for j, s in enumerate(sites):
        t = d[0][s + 1] / speed
        if t <= inst.sites[s].close + TIME_TOL:
            layer[(1 << j, j)] = max(inst.sites[s].open, t)
    for _ in range(k - 1):
        nxt: dict[tuple[int, int], float] = {}
        for (mask, j), arr in layer.items():
            row = d[sites[j] + 1]
            for j2, s2 in enumerate(sites):
                if mask >> j2 & 1:
                    continue
                t = arr + row[s2 + 1] / speed
                site = inst.sites[s2]
                if t > site.close + TIME_TOL:
                    continue
                t = max(site.open, t)
                key = (mask | 1 << j2, j2)
                if t < nxt.get(key, math.inf):
                    nxt[key] = t
        layer = nxt
        if not layer:
            return False
    return any(mask == full for mask, _ in layer)
