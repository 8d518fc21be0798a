import json
import math
import random

import pytest

from conftest import make_instance, random_instance
from mppc.errors import SizeLimitError
from mppc.evaluation import (COLUMNS, EvaluationReport, brute_force_optimum, evaluate, parse_report, render_report,
                             upper_bound)
from mppc.instance import Solution, check_feasibility, make_route
from mppc.pipelines import SolverConfig, solve
from oracles import best_single_route, multi_route_optimum


def test_upper_bound_single_site():
    inst = make_instance([(3, 0)], [10])
    assert upper_bound(inst) == pytest.approx(7)
    assert brute_force_optimum(inst).profit == pytest.approx(4)


def test_upper_bound_zero_quantities():
    inst = make_instance([(1, 0), (2, 3)], [0, 0])
    assert upper_bound(inst) == 0


def test_upper_bound_dominates_optimum():
    rnd = random.Random(500)
    for _ in range(500):
        inst = random_instance(rnd, rnd.randint(1, 8), horizon=rnd.choice([4, 8, 10]))
        assert upper_bound(inst) >= multi_route_optimum(inst) - 1e-9


def test_oracle_single_site():
    inst = make_instance([(2, 0)], [10])
    res = brute_force_optimum(inst)
    assert (res.profit, res.vehicles, res.distance) == (6, 1, 4)


def test_oracle_unprofitable():
    inst = make_instance([(10, 0), (0, 10), (7, 7)], [3, 4, 5])
    res = brute_force_optimum(inst)
    assert res.profit == 0 and res.vehicles == 0 and res.routes == []


def test_oracle_size_limit():
    with pytest.raises(SizeLimitError):
        brute_force_optimum(make_instance([(1, 0)] * 9, [1] * 9))


def _subset_dp_optimum(inst):
    """Best vertex-disjoint route set by DP over subsets of the best route within each block."""
    n = inst.n
    value = {}
    for mask in range(1 << n):
        sites = [i for i in range(n) if mask >> i & 1]
        value[mask] = best_single_route(inst, sites)[0] if sites else 0.0
    f = [0.0] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        best = f[mask ^ low]
        sub = mask
        while sub:
            if sub & low:
                best = max(best, value[sub] + f[mask ^ sub])
            sub = (sub - 1) & mask
        f[mask] = best
    return f[(1 << n) - 1]


def test_oracle_matches_independent_dp_at_six():
    rnd = random.Random(6)
    for _ in range(40):
        inst = random_instance(rnd, 6, horizon=8)
        res = brute_force_optimum(inst)
        assert res.profit == pytest.approx(_subset_dp_optimum(inst), abs=1e-9)
        sol = Solution(res.routes)
        assert check_feasibility(inst, sol) == []
        assert sol.profit == pytest.approx(res.profit)
        assert res.vehicles == len(res.routes)


def test_oracle_dominates_pipelines(rng):
    for _ in range(60):
        inst = random_instance(rng, rng.randint(1, 8))
        opt = brute_force_optimum(inst).profit
        for alg in ("alg1", "alg2", "alg3"):
            report = evaluate(inst, solve(inst, SolverConfig(algorithm=alg)))
            assert report.profit <= opt + 1e-9
            if report.profit > 0:
                assert report.rho >= 1 - 1e-9


def test_table_row_renders_literally():
    row = EvaluationReport("Dallas_wood_10", 10, 66, 117.5, 299, 15)
    lines = render_report([row]).splitlines()
    assert lines[0].split() == ["problem", "n", "P", "U", "rho", "time", "(ms)", "T"]
    assert lines[1].split() == ["Dallas_wood_10", "10", "66", "117.5", "1.78", "299", "15"]


def test_empty_report_is_header_only():
    text = render_report([])
    assert text.splitlines() == ["  ".join(COLUMNS)]


def test_zero_profit_renders_inf():
    row = EvaluationReport("empty", 3, 0, 12.0, 1, 10)
    assert math.isinf(row.rho)
    assert render_report([row]).splitlines()[1].split()[4] == "inf"


def test_json_round_trip():
    rows = [EvaluationReport("a", 5, 10.25, 20.0, 3.0, 9, "alg1", flags=["fallback"]),
            EvaluationReport("b", 2, 0.0, 4.0, 0.4, 12, "alg3")]
    text = render_report(rows, "json")
    assert json.loads(text)["results"][1]["rho"] == "inf"
    assert parse_report(text) == rows
    with pytest.raises(ValueError):
        render_report(rows, "xml")


def test_evaluate_flags_infeasible():
    inst = make_instance([(6, 0)], [20], windows=[(0, 5)], horizon=10)
    report = evaluate(inst, Solution([make_route(inst, [0])]), time_ms=1.0)
    assert "infeasible:1" in report.flags
    assert report.routes[0]["visits"] == [0]


def test_upper_bound_isolated_direct_loop():
    # the only other site is far away, so both edges of A's best route touch the depot
    inst = make_instance([(3, 0), (-100, 0)], [10, 1])
    assert brute_force_optimum(inst).profit == pytest.approx(4)
    assert upper_bound(inst) >= 4
