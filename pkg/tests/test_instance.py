import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_instance
from mppc.errors import ParseError, StructuralError, ValidationError
from mppc.generator import GeneratorSpec, generate_instance
from mppc.instance import (AssumptionParams, Solution, check_feasibility, compute_profit, dumps_instance,
                           dumps_solution, load_instance, load_solution, make_route, validate_assumptions)


def _doc(**over):
    doc = {"version": 1, "name": "one", "depot": {"x": 0, "y": 0}, "capacity": 10, "speed": 1,
           "horizon": 10, "sites": [{"id": 0, "x": 1, "y": 0, "quantity": 5, "open": 0, "close": 10}]}
    doc.update(over)
    return json.dumps(doc)


def test_load_minimal_instance():
    inst = load_instance(_doc())
    assert inst.n == 1
    assert inst.sites[0].quantity == 5
    assert load_instance(_doc().encode()).n == 1


def test_close_after_horizon_rejected():
    bad = _doc(sites=[{"id": 0, "x": 1, "y": 0, "quantity": 5, "open": 0, "close": 11}])
    with pytest.raises(ValidationError):
        load_instance(bad)


@pytest.mark.parametrize("site", [
    {"id": 0, "x": 1, "y": 0, "quantity": -1, "open": 0, "close": 5},
    {"id": 0, "x": 1, "y": 0, "quantity": 5, "open": 6, "close": 5},
    {"id": 3, "x": 1, "y": 0, "quantity": 5, "open": 0, "close": 5},
])
def test_invalid_sites_rejected(site):
    with pytest.raises(ValidationError):
        load_instance(_doc(sites=[site]))


@pytest.mark.parametrize("text", ["not json", "[1, 2]", json.dumps({"version": 9}),
                                  json.dumps({"version": 1, "sites": []})])
def test_malformed_documents(text):
    with pytest.raises(ParseError):
        load_instance(text)


def test_generated_instance_round_trips():
    inst = generate_instance(GeneratorSpec(n=10, horizon=15, seed=4))
    text = dumps_instance(inst)
    again = load_instance(text)
    assert again == inst
    assert dumps_instance(again) == text


def test_matrix_instance_round_trips():
    inst = make_instance([(0, 0), (0, 0)], [3, 4], metric_mode="matrix",
                         matrix=[[0, 2, 3], [2, 0, 4], [3, 4, 0]])
    again = load_instance(dumps_instance(inst))
    assert again.metric.d[1][2] == 4


def test_assumption1_violated_when_item_exceeds_capacity():
    inst = make_instance([(1, 0), (2, 0)], [1, 100], capacity=50)
    report = validate_assumptions(inst, AssumptionParams(), constant=100.0)
    assert report[1].holds is False
    assert "capacity" in report[1].detail


def test_assumption2_holds_for_close_site():
    inst = make_instance([(1, 0)], [10])
    report = validate_assumptions(inst, AssumptionParams(epsilon=0.5))
    assert report[2].holds is True
    assert report[3].holds is None


def test_assumption3_uses_optimal_vehicle_count():
    inst = make_instance([(1, 0)], [10])
    params = AssumptionParams(p=6.0, alpha=1.0)  # sqrt(16) = 4
    assert validate_assumptions(inst, params, optimal_vehicles=4)[3].holds is True
    assert validate_assumptions(inst, params, optimal_vehicles=3)[3].holds is False


def _naive_assumption2(inst, eps):
    pts = [inst.depot] + [(s.x, s.y) for s in inst.sites]
    for j in range(1, len(pts)):
        q = inst.sites[j - 1].quantity
        if q <= 0:
            continue
        for i in range(len(pts)):
            if i != j and math.dist(pts[i], pts[j]) > eps * q / 2 + 1e-9:
                return False
    return True


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("eps", [0.1, 0.25, 0.5])
def test_assumption2_matches_all_pairs_scan(seed, eps):
    inst = generate_instance(GeneratorSpec(n=30, seed=seed, q_lo=20, q_hi=200))
    report = validate_assumptions(inst, AssumptionParams(epsilon=eps))
    assert report[2].holds is _naive_assumption2(inst, eps)


def test_empty_solution_feasible():
    inst = make_instance([(1, 0), (2, 0)], [3, 4])
    assert check_feasibility(inst, Solution()) == []
    assert compute_profit(inst, Solution()) == 0


def test_late_arrival_is_one_window_violation():
    inst = make_instance([(6, 0)], [10], windows=[(0, 5)], horizon=10)
    found = check_feasibility(inst, Solution([make_route(inst, [0])]))
    assert [v.kind for v in found] == ["time_window"]
    assert found[0].site == 0


def test_shared_site_is_one_disjointness_violation():
    inst = make_instance([(1, 0), (2, 0), (3, 0), (4, 0)], [1, 1, 1, 1])
    sol = Solution([make_route(inst, [0, 3], vehicle=0), make_route(inst, [3, 1], vehicle=1)])
    found = check_feasibility(inst, sol)
    assert [v.kind for v in found] == ["disjointness"]


def test_unknown_site_is_structural_error():
    inst = make_instance([(1, 0)], [1])
    with pytest.raises(StructuralError):
        make_route(inst, [5])


def test_stored_arrival_before_reachable_is_flagged():
    inst = make_instance([(4, 0)], [10])
    route = make_route(inst, [0], arrivals=[1.0])
    assert [v.kind for v in check_feasibility(inst, Solution([route]))] == ["schedule"]


def test_waiting_is_allowed():
    inst = make_instance([(1, 0)], [10], windows=[(5, 9)], horizon=10)
    route = make_route(inst, [0])
    assert route.arrivals == (5.0,)
    assert check_feasibility(inst, Solution([route])) == []


def test_profit_single_site():
    inst = make_instance([(2, 0)], [10])
    assert compute_profit(inst, Solution([make_route(inst, [0])])) == pytest.approx(6)


def test_profit_capped_by_capacity():
    # d chain D-i 2, i-j 3, j-D 2 on explicit distances
    inst = make_instance([(0, 0), (0, 0)], [10, 10], capacity=15, metric_mode="matrix",
                         matrix=[[0, 2, 2], [2, 0, 3], [2, 3, 0]])
    sol = Solution([make_route(inst, [0, 1])])
    assert compute_profit(inst, sol) == pytest.approx(8)
    assert sol.profit == pytest.approx(8)


def test_solution_round_trip():
    inst = make_instance([(1, 0), (0, 2)], [5, 6])
    sol = Solution([make_route(inst, [1, 0])], algorithm="alg1", meta={"flags": []})
    again = load_solution(dumps_solution(sol, inst), inst)
    assert again.routes == sol.routes
    assert again.algorithm == "alg1"


coords = st.tuples(st.floats(0, 50), st.floats(0, 50))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(coords, st.floats(0, 30), st.integers(0, 20)), min_size=1, max_size=7),
       st.permutations(range(7)))
def test_profit_matches_route_fields(data, order):
    pts = [d[0] for d in data]
    inst = make_instance(pts, [d[1] for d in data], windows=[(0, 20)] * len(data), capacity=40, horizon=20)
    visits = [i for i in order if i < len(data)]
    route = make_route(inst, visits)
    sol = Solution([route])
    assert compute_profit(inst, sol) == pytest.approx(route.profit)
    # a single route is always disjoint; windows [0, 20] may still be missed
    assert all(v.kind == "time_window" for v in check_feasibility(inst, sol))
