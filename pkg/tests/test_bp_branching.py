"""Branching semantics: graph surgery, column filtering, candidate choice."""

import math

import numpy as np
import pytest

from prpso.bp import branching as br
from prpso.bp.master import Column
from prpso.bp.pricing import PricingOptions, build_graph, price
from prpso.instances import VehicleSpec, adapt_solomon, build_instance
from prpso.instances.synth import synth_solomon_text
from prpso.speed_opt import Route, optimal_route_speed


def adapted(style="r1", n=4, seed=3, vehicles=3):
    inst = adapt_solomon(synth_solomon_text(style, n, seed), seed=seed + 1)
    specs = [VehicleSpec(inst.vehicles[0].vc, vehicles)]
    return build_instance(inst.name, list(inst.nodes), specs,
                          demand_unit=inst.demand_unit)


def column_for(inst, k, seq):
    cost = optimal_route_speed(Route(k, (0,) + tuple(seq) + (0,)),
                               inst).route_cost
    return Column(inst, k, tuple(seq), cost)


def test_forbid_removes_exactly_one_arc():
    inst = adapted()
    removed = br.removed_arcs(inst, [(None, (1, 2), 0)], k=0)
    assert removed == {(1, 2)}


def test_force_customer_arc_cuts_all_competitors():
    inst = adapted(n=4)
    removed = br.removed_arcs(inst, [(None, (1, 2), 1)], k=0)
    expect = {(1, x) for x in (0, 3, 4)} | {(x, 2) for x in (0, 3, 4)}
    assert removed == expect


def test_force_depot_departure_spares_other_departures():
    inst = adapted(n=4)
    removed = br.removed_arcs(inst, [(None, (0, 2), 1)], k=0)
    assert removed == {(1, 2), (3, 2), (4, 2)}
    assert not any(a == 0 for a, _ in removed)


def test_force_depot_return_cuts_only_tail_departures():
    inst = adapted(n=4)
    removed = br.removed_arcs(inst, [(None, (3, 0), 1)], k=0)
    assert removed == {(3, 1), (3, 2), (3, 4)}


def test_scoped_decision_only_hits_its_class():
    inst = adapted(n=4)
    assert br.removed_arcs(inst, [(1, (1, 2), 0)], k=0) == set()
    assert br.removed_arcs(inst, [(1, (1, 2), 0)], k=1) == {(1, 2)}


def test_column_compliance_mirrors_graph_semantics():
    inst = adapted(n=4)
    col_12 = column_for(inst, 0, (1, 2))
    col_21 = column_for(inst, 0, (2, 1))
    col_3 = column_for(inst, 0, (3,))
    forbid = [(None, (1, 2), 0)]
    force = [(None, (1, 2), 1)]
    assert not br.column_complies(col_12, forbid)
    assert br.column_complies(col_21, forbid)
    assert br.column_complies(col_3, forbid)
    assert br.column_complies(col_12, force)
    assert not br.column_complies(col_21, force)  # visits both, wrong order
    assert br.column_complies(col_3, force)
    scoped = [(1, (1, 2), 0)]
    assert br.column_complies(col_12, scoped)  # class 0 is out of scope


def test_forced_graph_only_prices_complying_routes():
    inst = adapted("r1", 5, 7)
    # force an arc that some feasible route actually uses
    pair = None
    for i in range(1, 6):
        for j in range(1, 6):
            if i == j:
                continue
            if optimal_route_speed(Route(0, (0, i, j, 0)), inst).feasible:
                pair = (i, j)
                break
        if pair:
            break
    assert pair is not None
    decisions = [(None, pair, 1)]
    g = br.graph_for(inst, decisions, 0)
    pi = np.zeros(6)
    pi[1:] = 400.0
    res = price(inst, 0, pi, 0.0, g, PricingOptions(max_columns=1000))
    assert res.columns
    seen_pair = False
    for route, _, _ in res.columns:
        path = (0,) + route + (0,)
        arcs = set(zip(path[:-1], path[1:]))
        visits = set(route)
        if pair[0] in visits or pair[1] in visits:
            assert pair in arcs
            seen_pair = True
    assert seen_pair


def test_min_return_matches_floyd_warshall():
    inst = adapted("rc1", 5, 9)
    g = build_graph(inst, 0)
    n = inst.n_customers
    b = inst.vehicles[0].vc.speed_max
    big = math.inf
    w = np.full((n + 1, n + 1), big)
    for i in range(n + 1):
        for j in range(n + 1):
            if i == j:
                continue
            w[i, j] = inst.dist[i, j] / b \
                + (inst.service[j] if j != 0 else 0.0)
    for i in range(n + 1):
        w[i, i] = 0.0
    for m in range(n + 1):
        for i in range(n + 1):
            for j in range(n + 1):
                if w[i, m] + w[m, j] < w[i, j]:
                    w[i, j] = w[i, m] + w[m, j]
    for j in range(n + 1):
        assert g.min_return[j] == pytest.approx(w[j, 0], abs=1e-9)


def test_fractional_ranking_breaks_ties_by_arc_id():
    flows = {(2, 3): 0.5, (1, 2): 0.5, (0, 1): 1.0, (3, 0): 0.25}
    ranked = br._fractional(flows)
    assert [arc for _, arc in ranked] == [(1, 2), (2, 3), (3, 0)]


def test_choose_branch_none_when_integral():
    inst = adapted(n=3, vehicles=3)
    pool = [column_for(inst, 0, (i,)) for i in (1, 2, 3)]
    lam = np.ones(3)
    assert br.choose_branch(inst, pool, lam) is None


def test_choose_branch_finds_fractional_arc():
    inst = adapted(n=3, seed=6, vehicles=3)
    pool = [column_for(inst, 0, (1, 2)), column_for(inst, 0, (2, 1)),
            column_for(inst, 0, (3,))]
    lam = np.array([0.5, 0.5, 1.0])
    pick = br.choose_branch(inst, pool, lam)
    assert pick is not None
    scope, arc = pick
    assert scope is None
    frac = br._fractional(br.arc_flows(pool, lam))
    assert arc in {a for _, a in frac}
