"""Problem data model: sites, instances, routes and solutions.

Node indexing used throughout the package: node 0 is the depot and site
``i`` is node ``i + 1``.  Costs equal distances; travel time is distance
divided by the vehicle speed.  Vehicles leave the depot at time 0, may
wait at a site until its window opens, and must arrive no later than the
window close.  Revenue of a route is ``min(Q, sum of visited quantities)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import IO, Any, Iterable, Optional, Sequence, Union

from .errors import ParseError, StructuralError, ValidationError

FORMAT_VERSION = 1
TIME_TOL = 1e-9
METRIC_MODES = ("euclidean", "matrix", "haversine")

Source = Union[str, bytes, IO[str], IO[bytes]]


@dataclass(frozen=True)
class Site:
    id: int
    x: float
    y: float
    quantity: float
    open: int
    close: int


@dataclass(frozen=True)
class Instance:
    sites: tuple[Site, ...]
    depot: tuple[float, float]
    capacity: float
    speed: float
    horizon: int
    metric_mode: str = "euclidean"
    matrix: Optional[tuple[tuple[float, ...], ...]] = None
    name: str = "instance"

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(sorted(self.sites, key=lambda s: s.id)))
        object.__setattr__(self, "depot", (float(self.depot[0]), float(self.depot[1])))
        if self.matrix is not None:
            object.__setattr__(self, "matrix", tuple(tuple(float(v) for v in row) for row in self.matrix))
        validate_instance(self)

    @property
    def n(self) -> int:
        return len(self.sites)

    @cached_property
    def metric(self):
        from .metric import build_metric

        return build_metric(self)

    @cached_property
    def quantities(self) -> tuple[float, ...]:
        return tuple(s.quantity for s in self.sites)

    def with_matrix(self, matrix) -> "Instance":
        """Copy of this instance using an explicit distance matrix."""
        rows = tuple(tuple(float(v) for v in row) for row in matrix)
        return Instance(self.sites, self.depot, self.capacity, self.speed, self.horizon,
                        "matrix", rows, self.name)


def validate_instance(inst: Instance) -> None:
    errors = []
    if not inst.capacity > 0:
        errors.append(f"capacity must be positive, got {inst.capacity}")
    if not inst.speed > 0:
        errors.append(f"speed must be positive, got {inst.speed}")
    if not isinstance(inst.horizon, int) or inst.horizon <= 0:
        errors.append(f"horizon must be a positive integer, got {inst.horizon!r}")
    if inst.metric_mode not in METRIC_MODES:
        errors.append(f"unknown metric mode {inst.metric_mode!r}")
    ids = [s.id for s in inst.sites]
    if ids != list(range(len(ids))):
        dup = sorted({i for i in ids if ids.count(i) > 1})
        errors.append(f"site ids must be 0..{len(ids) - 1} without repeats (duplicates: {dup})" if dup
                      else f"site ids must be 0..{len(ids) - 1}, got {ids}")
    for s in inst.sites:
        if not s.quantity >= 0:
            errors.append(f"site {s.id}: negative quantity {s.quantity}")
        if not (isinstance(s.open, int) and isinstance(s.close, int)):
            errors.append(f"site {s.id}: window bounds must be integers")
        elif not 0 <= s.open <= s.close:
            errors.append(f"site {s.id}: window [{s.open}, {s.close}] is empty or negative")
        elif isinstance(inst.horizon, int) and s.close > inst.horizon:
            errors.append(f"site {s.id}: window close {s.close} exceeds horizon {inst.horizon}")
    if inst.metric_mode == "matrix":
        if inst.matrix is None:
            errors.append("metric mode 'matrix' requires a matrix")
        elif len(inst.matrix) != len(inst.sites) + 1 or any(len(r) != len(inst.sites) + 1 for r in inst.matrix):
            errors.append(f"matrix must be {len(inst.sites) + 1}x{len(inst.sites) + 1}")
    if errors:
        raise ValidationError("; ".join(errors))


# ---------------------------------------------------------------- file io

def _read_text(source: Source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def _parse_json(source: Source) -> dict:
    try:
        doc = json.loads(_read_text(source))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"not a JSON document: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    if doc.get("version") != FORMAT_VERSION:
        raise ParseError(f"unsupported format version {doc.get('version')!r}")
    return doc


def _as_int(value, what):
    if isinstance(value, bool):
        raise ParseError(f"{what} must be an integer")
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if not isinstance(value, int):
        raise ParseError(f"{what} must be an integer, got {value!r}")
    return value


def instance_from_dict(doc: dict) -> Instance:
    try:
        sites = [
            Site(id=_as_int(s["id"], "site id"), x=float(s["x"]), y=float(s["y"]),
                 quantity=float(s["quantity"]), open=_as_int(s["open"], "open"),
                 close=_as_int(s["close"], "close"))
            for s in doc["sites"]
        ]
        metric = doc.get("metric", {"mode": "euclidean"})
        depot = (float(doc["depot"]["x"]), float(doc["depot"]["y"]))
        return Instance(
            sites=tuple(sites),
            depot=depot,
            capacity=float(doc["capacity"]),
            speed=float(doc["speed"]),
            horizon=_as_int(doc["horizon"], "horizon"),
            metric_mode=metric.get("mode", "euclidean"),
            matrix=metric.get("matrix"),
            name=str(doc.get("name", "instance")),
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed instance: missing or bad field {exc}") from exc


def load_instance(source: Source) -> Instance:
    """Parse and validate an instance document (JSON text, bytes or file object)."""
    return instance_from_dict(_parse_json(source))


def instance_to_dict(inst: Instance) -> dict:
    metric: dict[str, Any] = {"mode": inst.metric_mode}
    if inst.matrix is not None:
        metric["matrix"] = [list(r) for r in inst.matrix]
    return {
        "version": FORMAT_VERSION,
        "name": inst.name,
        "depot": {"x": inst.depot[0], "y": inst.depot[1]},
        "capacity": inst.capacity,
        "speed": inst.speed,
        "horizon": inst.horizon,
        "metric": metric,
        "sites": [
            {"id": s.id, "x": s.x, "y": s.y, "quantity": s.quantity, "open": s.open, "close": s.close}
            for s in inst.sites
        ],
    }


def dumps_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2) + "\n"


# ---------------------------------------------------------------- assumptions

@dataclass(frozen=True)
class AssumptionParams:
    epsilon: float = 0.5
    p: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        for name in ("epsilon", "p", "alpha"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")


@dataclass
class AssumptionCheck:
    name: str
    holds: Optional[bool]  # None: not checkable
    detail: str
    witness: Any = None


@dataclass
class AssumptionReport:
    checks: list[AssumptionCheck]
    q_min: Optional[float] = None
    q_max: Optional[float] = None

    def __getitem__(self, number: int) -> AssumptionCheck:
        return self.checks[number - 1]

    @property
    def all_hold(self) -> bool:
        return all(c.holds is not False for c in self.checks)


def validate_assumptions(inst: Instance, params: AssumptionParams, constant: float = 1.0,
                         optimal_vehicles: Optional[int] = None) -> AssumptionReport:
    """Check the three standing assumptions of the approximation analysis.

    The cost check scans every ordered pair (i, j) with j a site of
    nonzero quantity and i any other node, depot included.  Its witness is
    the pair with the largest excess ``c_ij - eps * q_j / 2``.
    """
    nonzero = [q for q in inst.quantities if q > 0]
    q_min = min(nonzero) if nonzero else None
    q_max = max(nonzero) if nonzero else None

    if q_max is None:
        a1 = AssumptionCheck("quantity spread", True, "no nonzero quantities")
    else:
        spread_cap = constant * inst.n ** params.p * q_min
        problems = []
        if q_max > inst.capacity:
            problems.append(f"q_max={q_max:g} exceeds capacity Q={inst.capacity:g}")
        if q_max > spread_cap:
            problems.append(f"q_max={q_max:g} exceeds C*n^p*q_min={spread_cap:g}")
        a1 = AssumptionCheck("quantity spread", not problems,
                             "; ".join(problems) or f"q_max={q_max:g} <= min(Q, {spread_cap:g})",
                             witness=(q_min, q_max))

    d = inst.metric.d
    worst = None
    half_eps = 0.5 * params.epsilon
    for j, site in enumerate(inst.sites, start=1):
        if site.quantity <= 0:
            continue
        bound = half_eps * site.quantity
        for i in range(inst.n + 1):
            if i == j:
                continue
            excess = d[i][j] - bound
            if worst is None or excess > worst[0]:
                worst = (excess, i, j)
    if worst is None or worst[0] <= TIME_TOL:
        a2 = AssumptionCheck("cost vs quantity", True,
                             f"c_ij <= {half_eps:g}*q_j for all pairs",
                             witness=None if worst is None else (worst[1], worst[2]))
    else:
        _, i, j = worst
        a2 = AssumptionCheck("cost vs quantity", False,
                             f"c({i},{j})={d[i][j]:g} > {half_eps:g}*q={half_eps * inst.sites[j - 1].quantity:g}",
                             witness=(i, j))

    need = math.sqrt(10 + params.p) / params.alpha
    if optimal_vehicles is None:
        a3 = AssumptionCheck("vehicle count", None, "not checkable without optimum")
    else:
        a3 = AssumptionCheck("vehicle count", optimal_vehicles >= need,
                             f"m*={optimal_vehicles} vs sqrt(10+p)/alpha={need:.4g}",
                             witness=optimal_vehicles)
    return AssumptionReport([a1, a2, a3], q_min=q_min, q_max=q_max)


# ---------------------------------------------------------------- routes

def schedule(inst: Instance, visits: Sequence[int]) -> list[float]:
    """Earliest service times along ``visits`` (waiting for window opens)."""
    d = inst.metric.d
    speed = inst.speed
    t = 0.0
    prev = 0
    out = []
    for sid in visits:
        node = sid + 1
        t = max(float(inst.sites[sid].open), t + d[prev][node] / speed)
        out.append(t)
        prev = node
    return out


def route_cost(inst: Instance, visits: Sequence[int]) -> float:
    if not visits:
        return 0.0
    d = inst.metric.d
    nodes = [0] + [v + 1 for v in visits] + [0]
    return sum(d[a][b] for a, b in zip(nodes, nodes[1:]))


@dataclass(frozen=True)
class Route:
    vehicle: int
    visits: tuple[int, ...]
    arrivals: tuple[float, ...]
    load: float
    cost: float
    revenue: float

    @property
    def profit(self) -> float:
        return self.revenue - self.cost

    def __len__(self):
        return len(self.visits)


def make_route(inst: Instance, visits: Iterable[int], vehicle: int = 0,
               arrivals: Optional[Sequence[float]] = None) -> Route:
    """Build a route with its earliest schedule (or the given arrivals)."""
    visits = tuple(int(v) for v in visits)
    for v in visits:
        if not 0 <= v < inst.n:
            raise StructuralError(f"unknown site id {v}")
    arr = tuple(float(a) for a in arrivals) if arrivals is not None else tuple(schedule(inst, visits))
    load = min(inst.capacity, sum(inst.sites[v].quantity for v in visits))
    return Route(vehicle, visits, arr, load, route_cost(inst, visits), load)


@dataclass
class Solution:
    routes: list[Route] = field(default_factory=list)
    algorithm: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def profit(self) -> float:
        return sum(r.profit for r in self.routes)

    @property
    def vehicles(self) -> int:
        return len(self.routes)

    def visited(self) -> set[int]:
        return {v for r in self.routes for v in r.visits}


@dataclass(frozen=True)
class Violation:
    kind: str  # time_window | schedule | capacity | disjointness | duplicate
    vehicle: int
    site: Optional[int]
    detail: str

    def __str__(self):
        where = f"vehicle {self.vehicle}" + (f", site {self.site}" if self.site is not None else "")
        return f"{self.kind} ({where}): {self.detail}"


def check_feasibility(inst: Instance, sol: Solution) -> list[Violation]:
    """All constraint breaches of ``sol``; empty iff the solution is feasible.

    Stored arrival times are honoured (extra waiting is allowed) but must not
    precede the earliest possible arrival.  Depot endpoints are implicit in
    the route representation.
    """
    d = inst.metric.d
    out: list[Violation] = []
    owner: dict[int, int] = {}
    for r in sol.routes:
        for v in r.visits:
            if not 0 <= v < inst.n:
                raise StructuralError(f"route {r.vehicle} visits unknown site id {v}")
        if r.arrivals and len(r.arrivals) != len(r.visits):
            out.append(Violation("schedule", r.vehicle, None,
                                 f"{len(r.arrivals)} arrival times for {len(r.visits)} visits"))
            continue
        if r.load > inst.capacity + TIME_TOL:
            out.append(Violation("capacity", r.vehicle, None, f"load {r.load:g} > Q={inst.capacity:g}"))
        seen = set()
        t = 0.0
        prev = 0
        for k, v in enumerate(r.visits):
            if v in seen:
                out.append(Violation("duplicate", r.vehicle, v, "site visited twice in one route"))
            seen.add(v)
            site = inst.sites[v]
            earliest = max(float(site.open), t + d[prev][v + 1] / inst.speed)
            if r.arrivals:
                t = r.arrivals[k]
                if t < earliest - TIME_TOL:
                    out.append(Violation("schedule", r.vehicle, v,
                                         f"arrival {t:g} earlier than reachable {earliest:g}"))
                    t = earliest
            else:
                t = earliest
            if t > site.close + TIME_TOL or t < site.open - TIME_TOL:
                out.append(Violation("time_window", r.vehicle, v,
                                     f"service at {t:g} outside [{site.open}, {site.close}]"))
            prev = v + 1
        for v in seen:
            if v in owner and owner[v] != r.vehicle:
                out.append(Violation("disjointness", r.vehicle, v, f"also visited by vehicle {owner[v]}"))
            else:
                owner.setdefault(v, r.vehicle)
    return out


def compute_profit(inst: Instance, sol: Solution) -> float:
    """Total profit recomputed from the instance, ignoring cached route fields."""
    d = inst.metric.d
    total = 0.0
    for r in sol.routes:
        if not r.visits:
            continue
        nodes = [0] + [v + 1 for v in r.visits] + [0]
        collected = sum(inst.sites[v].quantity for v in r.visits)
        total += min(inst.capacity, collected) - sum(d[a][b] for a, b in zip(nodes, nodes[1:]))
    return total


# ---------------------------------------------------------------- solution io

def solution_to_dict(sol: Solution, inst: Instance) -> dict:
    doc = {
        "version": FORMAT_VERSION,
        "instance_name": inst.name,
        "algorithm": sol.algorithm,
        "routes": [{"vehicle": r.vehicle, "visits": list(r.visits), "arrivals": list(r.arrivals)}
                   for r in sol.routes],
        "profit": compute_profit(inst, sol),
    }
    if sol.meta:
        doc["meta"] = sol.meta
    return doc


def dumps_solution(sol: Solution, inst: Instance) -> str:
    return json.dumps(solution_to_dict(sol, inst), indent=2) + "\n"


def load_solution(source: Source, inst: Instance) -> Solution:
    doc = _parse_json(source)
    try:
        routes = [make_route(inst, r["visits"], vehicle=_as_int(r["vehicle"], "vehicle"),
                             arrivals=r.get("arrivals") or None)
                  for r in doc["routes"]]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed solution: {exc}") from exc
    return Solution(routes, algorithm=str(doc.get("algorithm", "")), meta=dict(doc.get("meta", {})))

