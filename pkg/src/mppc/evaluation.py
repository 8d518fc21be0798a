"""Profit upper bounds, the exhaustive optimum, and ratio reports."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

from .errors import SizeLimitError
from .instance import TIME_TOL, Instance, Route, Solution, check_feasibility, compute_profit, make_route

ORACLE_LIMIT = 8
_TOL = 1e-9


def upper_bound(inst: Instance) -> float:
    """Two-nearest-neighbour profit bound.

    A visited site has two route edges, each at least as long as its nearest
    neighbours; the depot is counted twice since a loop may leave and return
    through it.  Charging each site half of its two shortest possible edges
    never exceeds the route cost, so sum(max(0, q_i - (nn1 + nn2) / 2)) >= OPT.
    """
    d = inst.metric.d
    total = 0.0
    for site in inst.sites:
        node = site.id + 1
        dists = sorted([d[node][j] for j in range(1, inst.n + 1) if j != node] + [d[node][0]] * 2)
        total += max(0.0, site.quantity - (dists[0] + dists[1]) / 2)
    return total


@dataclass
class OracleResult:
    profit: float
    vehicles: int
    distance: float
    routes: list[Route]


def brute_force_optimum(inst: Instance, limit: int = ORACLE_LIMIT) -> OracleResult:
    """Exact optimum by enumerating every feasible ordered route, then set partitions.

    Among profit-optimal solutions the one with fewest vehicles, then least
    total distance, is reported.
    """
    n = inst.n
    if n > limit:
        raise SizeLimitError(f"brute-force optimum limited to {limit} sites, got {n}")
    d = inst.metric.d
    Q = inst.capacity
    sites = inst.sites
    # best[mask] = (profit, cost, order) of the best single route over exactly mask
    best: dict[int, tuple[float, float, tuple[int, ...]]] = {}

    def dfs(mask, order, node, t, cost, load):
        for sid in range(n):
            if mask >> sid & 1:
                continue
            step = d[node][sid + 1]
            arrive = t + step / inst.speed
            if arrive > sites[sid].close + TIME_TOL:
                continue
            m2 = mask | 1 << sid
            o2 = order + (sid,)
            c2 = cost + step
            l2 = load + sites[sid].quantity
            closed = c2 + d[sid + 1][0]
            profit = min(Q, l2) - closed
            old = best.get(m2)
            if old is None or profit > old[0] + _TOL or (abs(profit - old[0]) <= _TOL and o2 < old[2]):
                best[m2] = (profit, closed, o2)
            # under a metric a saturated route never gains from a further detour
            if l2 < Q - TIME_TOL:
                dfs(m2, o2, sid + 1, max(sites[sid].open, arrive), c2, l2)

    dfs(0, (), 0, 0.0, 0.0, 0.0)
    useful = {m: v for m, v in best.items() if v[0] > _TOL}

    def better(a, b):
        if a[0] > b[0] + _TOL:
            return True
        return abs(a[0] - b[0]) <= _TOL and (a[1], a[2]) < (b[1], b[2])

    # f[mask] = (profit, vehicles, distance, chosen route masks) over sites in mask
    full = (1 << n) - 1
    f: dict[int, tuple[float, int, float, tuple[int, ...]]] = {0: (0.0, 0, 0.0, ())}
    for mask in range(1, full + 1):
        low = mask & -mask
        rest = mask ^ low
        cand = f[rest]
        sub = rest
        while True:
            r = sub | low
            if r in useful:
                p, c, _ = useful[r]
                tail = f[mask ^ r]
                option = (p + tail[0], tail[1] + 1, c + tail[2], (r,) + tail[3])
                if better(option, cand):
                    cand = option
            if sub == 0:
                break
            sub = (sub - 1) & rest
        f[mask] = cand
    profit, vehicles, distance, masks = f[full]
    routes = [make_route(inst, useful[r][2], vehicle=k) for k, r in enumerate(masks)]
    return OracleResult(profit, vehicles, distance, routes)


@dataclass
class EvaluationReport:
    problem: str
    n: int
    profit: float
    upper: float
    time_ms: float
    horizon: int
    algorithm: str = ""
    rho: Optional[float] = None
    routes: list[dict] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.rho is None:
            self.rho = self.upper / self.profit if self.profit > 0 else math.inf


def evaluate(inst: Instance, sol: Solution, time_ms: Optional[float] = None) -> EvaluationReport:
    violations = check_feasibility(inst, sol)
    flags = list(sol.meta.get("flags", []))
    if violations:
        flags.append(f"infeasible:{len(violations)}")
    diagnostics = [
        {"vehicle": r.vehicle, "visits": list(r.visits), "load": r.load, "cost": r.cost,
         "revenue": r.revenue, "profit": r.profit}
        for r in sol.routes
    ]
    if time_ms is None:
        time_ms = float(sol.meta.get("wall_ms", 0.0))
    return EvaluationReport(inst.name, inst.n, compute_profit(inst, sol), upper_bound(inst), time_ms,
                            inst.horizon, sol.algorithm, routes=diagnostics, flags=flags)


# ---------------------------------------------------------------- rendering

COLUMNS = ("problem", "n", "P", "U", "rho", "time (ms)", "T")


def _num(x: float) -> str:
    if math.isinf(x):
        return "inf"
    if float(x).is_integer():
        return str(int(x))
    return f"{x:.2f}".rstrip("0").rstrip(".")


def report_row(r: EvaluationReport) -> list[str]:
    rho = "inf" if math.isinf(r.rho) else f"{r.rho:.2f}"
    return [r.problem, str(r.n), _num(r.profit), _num(r.upper), rho, str(int(round(r.time_ms))), str(r.horizon)]


def _report_to_json(r: EvaluationReport) -> dict:
    doc = asdict(r)
    if math.isinf(doc["rho"]):
        doc["rho"] = "inf"
    return doc


def render_report(results: Sequence[EvaluationReport], fmt: str = "text") -> str:
    """Tabulate reports as aligned text or as a JSON document."""
    if fmt == "json":
        return json.dumps({"version": 1, "results": [_report_to_json(r) for r in results]}, indent=2) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    rows = [list(COLUMNS)] + [report_row(r) for r in results]
    widths = [max(len(row[c]) for row in rows) for c in range(len(COLUMNS))]
    lines = []
    for row in rows:
        cells = [row[0].ljust(widths[0])] + [cell.rjust(w) for cell, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> list[EvaluationReport]:
    doc = json.loads(text)
    out = []
    for item in doc["results"]:
        item = dict(item)
        if item.get("rho") == "inf":
            item["rho"] = math.inf
        out.append(EvaluationReport(**item))
    return out
