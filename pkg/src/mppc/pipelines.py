"""End-to-end solvers.

alg1: MFFD packing of quantities, one profit route per bin, route repair.
alg2: the same with the asymptotic PTAS packer at eta = 2 / sqrt(10 + p).
alg3: WSPD of the site coordinates, sides labelled large/small, small sides
      handed to vehicles in pair order until every site is covered.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Optional

from .binpacking import APTAS_BUDGET, pack_aptas, pack_mffd
from .errors import ParameterError
from .instance import AssumptionParams, Instance, Route, Solution
from .orienteering import CROSSOVER, PROFIT_TOL, STRATEGIES, all_visitable, repair_route, solve_route
from .wspd import build_split_tree, calibrate_separation, compute_wspd

ALGORITHMS = ("alg1", "alg2", "alg3")


@dataclass(frozen=True)
class SolverConfig:
    algorithm: str = "alg1"
    params: AssumptionParams = field(default_factory=AssumptionParams)
    strategy: str = "exact_dp"
    crossover: int = CROSSOVER
    s: Optional[float] = None
    pair_order: str = "ascending"
    consolidate: bool = True
    aptas_budget: int = APTAS_BUDGET
    seed: int = 0

    def __post_init__(self):
        alg = self.algorithm
        if isinstance(alg, int) or (isinstance(alg, str) and alg.isdigit()):
            object.__setattr__(self, "algorithm", f"alg{int(alg)}")
        if self.algorithm not in ALGORITHMS:
            raise ParameterError(f"unknown algorithm {alg!r}")
        if self.strategy not in STRATEGIES:
            raise ParameterError(f"unknown strategy {self.strategy!r}")
        if self.pair_order not in ("ascending", "descending"):
            raise ParameterError(f"pair order must be ascending or descending, got {self.pair_order!r}")
        if self.s is not None and not self.s > 0:
            raise ParameterError("s must be positive")
        if self.crossover < 1:
            raise ParameterError("crossover must be >= 1")

    @property
    def eta(self) -> float:
        return 2.0 / math.sqrt(10.0 + self.params.p)


def _active_sites(inst: Instance) -> list[int]:
    return [s.id for s in inst.sites if s.quantity > 0]


def _route_groups(inst: Instance, groups, cfg: SolverConfig) -> list[Route]:
    routes = []
    for group in groups:
        route = repair_route(solve_route(inst, group, cfg.strategy, cfg.crossover), inst)
        if route.visits and route.profit > PROFIT_TOL:
            routes.append(replace(route, vehicle=len(routes)))
    return routes


def _packed_solution(inst: Instance, cfg: SolverConfig, packer_name: str, packing, active) -> Solution:
    groups = [[active[j] for j in b] for b in packing.bins]
    routes = _route_groups(inst, groups, cfg)
    meta = {
        "packer": packer_name,
        "bins": len(groups),
        "flags": list(packing.flags),
        "unvisited": sorted(set(active) - {v for r in routes for v in r.visits}),
    }
    return Solution(routes, algorithm=cfg.algorithm, meta=meta)


def run_algorithm1(inst: Instance, cfg: SolverConfig = SolverConfig()) -> Solution:
    active = _active_sites(inst)
    packing = pack_mffd([inst.sites[i].quantity for i in active], inst.capacity)
    return _packed_solution(inst, replace(cfg, algorithm="alg1"), "mffd", packing, active)


def run_algorithm2(inst: Instance, cfg: SolverConfig = SolverConfig(algorithm="alg2")) -> Solution:
    active = _active_sites(inst)
    packing = pack_aptas([inst.sites[i].quantity for i in active], inst.capacity, cfg.eta, cfg.aptas_budget)
    sol = _packed_solution(inst, replace(cfg, algorithm="alg2"), "aptas", packing, active)
    sol.meta["eta"] = cfg.eta
    return sol


def vehicle_budget(inst: Instance) -> int:
    """Twice the volume lower bound on the number of vehicles."""
    total = sum(inst.quantities)
    return 2 * max(1, math.ceil(total / inst.capacity - 1e-9))


def run_algorithm3(inst: Instance, cfg: SolverConfig = SolverConfig(algorithm="alg3")) -> Solution:
    active = _active_sites(inst)
    meta: dict = {"flags": []}
    if not active:
        return Solution([], algorithm="alg3", meta=meta)
    Q = inst.capacity
    qty = {i: inst.sites[i].quantity for i in active}
    m = max(1, math.ceil(sum(qty.values()) / Q - 1e-9))
    points = [(inst.sites[i].x, inst.sites[i].y) for i in active]

    if cfg.s is not None:
        s = cfg.s
    else:
        cal = calibrate_separation(points, m)
        s = cal.s
        if cal.clamped_low:
            meta["flags"].append("separation_clamped")
        elif not cal.exact:
            meta["flags"].append("separation_inexact")
    tree = build_split_tree(points)
    pairs = compute_wspd(tree, s)
    pairs.sort(key=lambda p: p.size, reverse=cfg.pair_order == "descending")
    meta.update(s=s, pairs=len(pairs), target_pairs=m)

    small_cache: dict[int, bool] = {}

    def is_small(node_index):
        if node_index not in small_cache:
            sites = [active[j] for j in tree.nodes[node_index].ids]
            small_cache[node_index] = (sum(qty[i] for i in sites) <= Q + 1e-9
                                       and all_visitable(inst, sites, cfg.crossover))
        return small_cache[node_index]

    sides = [node for p in pairs for node in (p.a_node, p.b_node)] or [tree.root.index]
    covered: set[int] = set()
    subsets: list[list[int]] = []
    for node_index in sides:
        if is_small(node_index):
            residual = [active[j] for j in tree.nodes[node_index].ids if active[j] not in covered]
            if residual:
                subsets.append(residual)
                covered.update(residual)
        if len(covered) == len(active):
            break
    meta["large_sides"] = sum(1 for v in small_cache.values() if not v)

    uncovered = [i for i in active if i not in covered]
    meta["uncovered"] = uncovered
    if uncovered:
        meta["flags"].append("fallback")
        packing = pack_mffd([qty[i] for i in uncovered], Q)
        subsets += [[uncovered[j] for j in b] for b in packing.bins]

    if cfg.consolidate:
        before = len(subsets)
        subsets = _consolidate(inst, subsets, cfg.crossover)
        meta["merged"] = before - len(subsets)

    routes = _route_groups(inst, subsets, cfg)
    limit = vehicle_budget(inst)
    if len(routes) > limit:
        meta["flags"].append("vehicle_budget")
        keep = sorted(range(len(routes)), key=lambda k: (-routes[k].profit, k))[:limit]
        routes = [replace(routes[k], vehicle=v) for v, k in enumerate(sorted(keep))]
    meta["unvisited"] = sorted(set(active) - {v for r in routes for v in r.visits})
    return Solution(routes, algorithm="alg3", meta=meta)


def _consolidate(inst: Instance, subsets: list[list[int]], crossover: int) -> list[list[int]]:
    """First-fit-decreasing merge of vehicle subsets.

    Two subsets merge when their joint load fits Q and one vehicle can still
    serve every site of the union inside its window.  Without this the
    covering pass can leave many lightly loaded vehicles.
    """
    load = lambda grp: sum(inst.sites[i].quantity for i in grp)
    order = sorted(range(len(subsets)), key=lambda k: (-load(subsets[k]), k))
    merged: list[list[int]] = []
    loads: list[float] = []
    for k in order:
        grp = subsets[k]
        q = load(grp)
        for b in range(len(merged)):
            if loads[b] + q <= inst.capacity + 1e-9 and all_visitable(inst, merged[b] + grp, crossover):
                merged[b] = merged[b] + grp
                loads[b] += q
                break
        else:
            merged.append(list(grp))
            loads.append(q)
    return merged


RUNNERS = {"alg1": run_algorithm1, "alg2": run_algorithm2, "alg3": run_algorithm3}


def solve(inst: Instance, cfg: SolverConfig) -> Solution:
    """Run the configured pipeline and record its wall time (ms) in ``meta``."""
    start = time.perf_counter()
    sol = RUNNERS[cfg.algorithm](inst, cfg)
    sol.meta["wall_ms"] = (time.perf_counter() - start) * 1000.0
    return sol
