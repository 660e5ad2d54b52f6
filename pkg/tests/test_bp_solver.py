"""Whole-tree solver: optimality vs enumeration, bounds, limits, statuses."""

import math
import re

import pytest

from prpso.bp import BpLimits, solve_bp
from prpso.cmem import standard_vehicle
from prpso.enumerate_oracle import enumerate_optimal
from prpso.instances import (Node, VehicleSpec, adapt_solomon,
                             build_instance)
from prpso.instances.synth import synth_solomon_text
from prpso.speed_opt import Route, evaluate_solution
from prpso.tabu import SearchParams, run_tabu


def adapted(style="r1", n=3, seed=2, vehicles=3):
    inst = adapt_solomon(synth_solomon_text(style, n, seed), seed=seed + 1)
    specs = [VehicleSpec(inst.vehicles[0].vc, vehicles)]
    return build_instance(inst.name, list(inst.nodes), specs,
                          demand_unit=inst.demand_unit)


def test_three_customers_match_enumeration():
    for seed in (2, 5, 9):
        inst = adapted(n=3, seed=seed)
        bp = solve_bp(inst, BpLimits(time_limit=60))
        en = enumerate_optimal(inst)
        assert bp.status == "optimal"
        assert en.feasible
        assert bp.cost == pytest.approx(en.cost, rel=1e-6)
        got = evaluate_solution(bp.routes, inst)
        assert got.feasible
        assert got.total_cost == pytest.approx(bp.cost, rel=1e-9)


def test_branching_instance_still_exact():
    # this seed is known to need more than the root node
    inst = adapted("r1", 5, 6)
    bp = solve_bp(inst, BpLimits(time_limit=120))
    en = enumerate_optimal(inst)
    assert bp.status == "optimal"
    assert bp.nodes >= 3
    assert bp.cost == pytest.approx(en.cost, rel=1e-6)
    assert bp.gap == 0.0


def test_node_bounds_never_fall_below_their_parent():
    inst = adapted("r1", 5, 6)
    bp = solve_bp(inst, BpLimits(time_limit=120))
    log = bp.stats["node_log"]
    assert len(log) == bp.nodes
    for _id, _depth, inherited, converged in log:
        assert converged >= inherited - 1e-6
    # best-first: the inherited bounds pop in non-decreasing order
    inherited = [row[2] for row in log]
    assert all(b >= a - 1e-9 for a, b in zip(inherited, inherited[1:]))
    # the root LP relaxation can never exceed the integer optimum
    traced = [float(re.search(r"bound ([0-9.]+)", line).group(1))
              for line in bp.trace]
    assert len(traced) == bp.nodes
    assert traced[0] <= bp.cost + 1e-6


def test_unservable_customer_is_infeasible():
    vc = standard_vehicle("LDV", 1200.0)
    nodes = [
        Node(0, 0.0, 0.0, 0.0, 0.0, 0.0, 36000.0, 0.0),
        Node(1, 5.0, 0.0, 0.0, vc.capacity + 1.0, 0.0, 36000.0, 60.0),
    ]
    inst = build_instance("too-heavy", nodes, [VehicleSpec(vc, 2)])
    res = solve_bp(inst, BpLimits(time_limit=10))
    assert res.status == "infeasible"
    assert res.routes is None
    assert math.isinf(res.cost)


def test_time_limit_reports_honestly():
    inst = adapted("c1", 12, 1, vehicles=12)
    res = solve_bp(inst, BpLimits(time_limit=1e-6, ts_time=0.0))
    assert res.status in ("feasible", "unknown")
    assert res.gap > 0.0
    if res.status == "feasible":
        assert math.isfinite(res.cost)
    else:
        assert math.isinf(res.cost)


def test_warm_routes_are_accepted():
    inst = adapted(n=3, seed=5)
    en = enumerate_optimal(inst)
    assert en.feasible
    res = solve_bp(inst, BpLimits(time_limit=60), warm_routes=en.routes)
    assert res.status == "optimal"
    assert res.cost == pytest.approx(en.cost, rel=1e-6)


def test_tabu_never_beats_the_proven_optimum():
    for style, n, seed in (("r1", 5, 6), ("rc1", 5, 2)):
        inst = adapted(style, n, seed)
        bp = solve_bp(inst, BpLimits(time_limit=120))
        assert bp.status == "optimal"
        ts = run_tabu(inst, SearchParams(i2=4000, time_limit=5.0, seed=1))
        assert ts.feasible
        assert ts.cost >= bp.cost - 1e-9


def test_empty_instance_is_trivially_optimal():
    vc = standard_vehicle("LDV", 1200.0)
    nodes = [Node(0, 0.0, 0.0, 0.0, 0.0, 0.0, 36000.0, 0.0)]
    inst = build_instance("empty", nodes, [VehicleSpec(vc, 1)])
    res = solve_bp(inst)
    assert res.status == "optimal"
    assert res.cost == 0.0
    assert res.routes == []


def test_multi_class_fleet_solves():
    raw = synth_solomon_text("r1", 4, 3)
    base = adapt_solomon(raw, seed=4)
    specs = [VehicleSpec(standard_vehicle("LDV", 1200.0), 2),
             VehicleSpec(standard_vehicle("MDV", 12600.0), 2)]
    inst = build_instance(base.name, list(base.nodes), specs,
                          demand_unit=base.demand_unit)
    res = solve_bp(inst, BpLimits(time_limit=120))
    assert res.status == "optimal"
    got = evaluate_solution(res.routes, inst)
    assert got.feasible
    assert got.total_cost == pytest.approx(res.cost, rel=1e-9)
