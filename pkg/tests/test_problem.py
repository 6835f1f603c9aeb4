import json
import math

import numpy as np
import pytest

from cvrp_aoa.errors import ResourceLimitError, ValidationError
from cvrp_aoa.problem import (Instance, Solution, exact_solve, generate_instances,
                              load_instance, solution_cost, validate_solution)


def test_load_p1_fixture(p1):
    assert p1.n == 4
    assert p1.capacity == 3
    assert p1.depot == (0.66, 0.41)
    assert p1.demands == (1, 2, 2, 1)
    assert p1.w[1, 2] == pytest.approx(math.dist((0.67, 0.23), (0.81, 0.64)))


def test_load_p2_fixture(p2):
    assert p2.n == 4
    assert p2.capacity == 4
    assert p2.depot == (0.05, 0.68)
    assert p2.demands == (1, 3, 1, 2)


def test_single_customer_at_depot():
    doc = {"name": "degen", "capacity": 2, "depot": [0.5, 0.5],
           "customers": [{"x": 0.5, "y": 0.5, "demand": 2}]}
    inst = load_instance(json.dumps(doc))
    assert inst.w[0, 1] == 0.0


def test_load_instance_errors():
    with pytest.raises(ValidationError):
        load_instance(b"{not json")
    base = {"name": "x", "capacity": 3, "depot": [0, 0],
            "customers": [{"x": 1, "y": 1, "demand": 1}]}
    bad = dict(base, capacity=0)
    with pytest.raises(ValidationError):
        load_instance(json.dumps(bad))
    bad = dict(base, customers=[{"x": 1, "y": 1, "demand": 5}])
    with pytest.raises(ValidationError):
        load_instance(json.dumps(bad))
    bad = dict(base, customers=[{"x": 1, "y": 1, "demand": 1, "id": 1},
                                {"x": 2, "y": 2, "demand": 1, "id": 1}])
    with pytest.raises(ValidationError):
        load_instance(json.dumps(bad))


def test_explicit_matrix_instance():
    doc = {"name": "asym", "capacity": 2, "depot": [0, 0],
           "customers": [{"x": 0, "y": 0, "demand": 1}],
           "distance": {"matrix": [[0.0, 1.0], [2.0, 0.0]]}}
    inst = load_instance(json.dumps(doc))
    assert not inst.euclidean
    assert inst.w[0, 1] == 1.0 and inst.w[1, 0] == 2.0
    bad = dict(doc, distance={"matrix": [[0.0, -1.0], [2.0, 0.0]]})
    with pytest.raises(ValidationError):
        load_instance(json.dumps(bad))


def test_solution_cost_empty_and_single(p1):
    assert solution_cost(Solution.from_edges([]), p1.w) == 0.0
    sol = Solution.from_routes([[0, 1, 0]])
    assert solution_cost(sol, p1.w) == pytest.approx(2 * p1.w[0, 1])


def test_solution_cost_index_error(p1):
    sol = Solution.from_routes([[0, 9, 0]])
    with pytest.raises(ValidationError):
        solution_cost(sol, p1.w)


def test_validate_solution_reports(p1):
    good = exact_solve(p1).optima[0]
    assert validate_solution(good, p1).ok

    over = Solution.from_routes([[0, 2, 3, 0], [0, 1, 0], [0, 4, 0]])  # q2+q3=4 > 3
    rep = validate_solution(over, p1)
    assert not rep.capacity_ok and rep.depot_ok and rep.visit_ok
    assert any("[0, 2, 3, 0]" in v for v in rep.violations)

    dup = Solution.from_routes([[0, 1, 0], [0, 1, 0], [0, 2, 0], [0, 3, 0], [0, 4, 0]])
    rep = validate_solution(dup, p1)
    assert not rep.visit_ok
    assert any("customer 1 visited 2" in v for v in rep.violations)


def test_exact_solve_p1_against_hand_candidate(p1):
    # independently-priced best route set {0-1-3-0, 0-2-4-0}
    w = p1.w
    cand = w[0, 1] + w[1, 3] + w[3, 0] + w[0, 2] + w[2, 4] + w[4, 0]
    res = exact_solve(p1)
    assert res.min_cost == pytest.approx(float(cand), abs=1e-12)
    assert {frozenset(s.routes) for s in res.optima} >= {
        frozenset({(0, 1, 3, 0), (0, 2, 4, 0)})}
    for sol in res.optima:
        assert validate_solution(sol, p1).ok


def test_exact_solve_p2_route_count(p2):
    res = exact_solve(p2)
    assert all(s.n_routes == 2 for s in res.optima)
    for sol in res.optima:
        assert validate_solution(sol, p2).ok


def test_exact_solve_n1():
    inst = Instance.from_euclidean("one", 2, (0, 0), [(3, 4, 1)])
    res = exact_solve(inst)
    assert res.min_cost == pytest.approx(10.0)
    assert res.optima[0].routes == ((0, 1, 0),)


def test_exact_solve_guard():
    inst = generate_instances(9, 1, 4, (1, 2), seed=0)[0]
    with pytest.raises(ResourceLimitError):
        exact_solve(inst)


def test_generate_instances_reproducible():
    a = generate_instances(3, 48, 4, (1, 3), seed=7)
    b = generate_instances(3, 48, 4, (1, 3), seed=7)
    assert len(a) == 48
    assert len({i.name for i in a}) == 48
    for x, y in zip(a, b):
        assert x.name == y.name
        assert x.depot == y.depot
        assert x.demands == y.demands
        assert np.array_equal(x.w, y.w)


def test_generate_full_demand_forces_singletons():
    inst = generate_instances(3, 1, 4, (4, 4), seed=0)[0]
    res = exact_solve(inst)
    assert all(s.n_routes == 3 for s in res.optima)


def test_generate_edge_cases():
    assert generate_instances(3, 0, 4, (1, 3), seed=0) == []
    with pytest.raises(ValidationError):
        generate_instances(3, 1, 4, (2, 5), seed=0)
    with pytest.raises(ValidationError):
        generate_instances(3, 1, 4, (3, 2), seed=0)


def test_instance_json_roundtrip(p2):
    inst = load_instance(p2.to_json())
    assert inst.demands == p2.demands
    assert np.allclose(inst.w, p2.w)
