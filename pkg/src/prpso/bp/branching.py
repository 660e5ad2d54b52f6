"""Arc-flow branching for the route-based master.

A branching decision is (scope, arc, side): scope is a vehicle-class index
or None for all classes, arc is a directed node pair (i, j), and side is 0
(forbid the arc) or 1 (force it).  Forcing an arc between two customers
removes every competing arc out of i and into j; forcing a depot arc only
removes the competing customer arcs, since several vehicles share the
depot.  The same semantics filter existing columns on the master side and
arcs on the pricing side, so both stay consistent.
"""

import numpy as np

from prpso.bp.master import solve_rmp
from prpso.bp.pricing import build_graph

PENALTY = 1e7


def route_arcs(route):
    path = (0,) + tuple(route) + (0,)
    return list(zip(path[:-1], path[1:]))


def removed_arcs(inst, decisions, k):
    """Set of arcs forbidden for class k under the given decisions."""
    n = inst.n_customers
    out = set()
    for scope, (i, j), side in decisions:
        if scope is not None and scope != k:
            continue
        if side == 0:
            out.add((i, j))
            continue
        if i >= 1:
            for x in range(n + 1):
                if x != j and x != i:
                    out.add((i, x))
        if j >= 1:
            # x == i is skipped, so forcing 0 -> j leaves the depot's other
            # departures alone and only competing customer arcs are cut
            for x in range(n + 1):
                if x != i and x != j:
                    out.add((x, j))
    return out


def graph_for(inst, decisions, k):
    return build_graph(inst, k, removed_arcs(inst, decisions, k))


def column_complies(col, decisions):
    arcs = None
    for scope, (i, j), side in decisions:
        if scope is not None and scope != col.k:
            continue
        if arcs is None:
            arcs = set(route_arcs(col.route))
        if side == 0:
            if (i, j) in arcs:
                return False
        else:
            uses = (i, j) in arcs
            if not uses and ((i >= 1 and i in col.visits) or
                             (j >= 1 and j in col.visits)):
                return False
    return True


def arc_flows(pool, lam, per_class=False):
    flows = {}
    for idx, col in enumerate(pool):
        w = lam[idx]
        if w <= 1e-12:
            continue
        for arc in route_arcs(col.route):
            key = (col.k, arc) if per_class else arc
            flows[key] = flows.get(key, 0.0) + w
    return flows


def _fractional(flows, tol=1e-6):
    out = []
    for key, y in flows.items():
        gap = abs(y - round(y))
        if gap > tol:
            out.append((gap, key))
    # most fractional first; ties broken on the arc itself for determinism
    out.sort(key=lambda t: (-t[0], t[1]))
    return out


def choose_branch(inst, pool, lam, max_candidates=10):
    """Pick (scope, arc) to branch on, or None when the flows are integral.

    Candidates are the most fractional aggregated arc flows; each is scored
    by probing both children on the current pool with non-complying columns
    cost-penalised, and the winner maximises the weaker child bound.  When
    aggregated flows are integral but some class splits a route fractionally,
    the branch falls back to that class's own most fractional arc.
    """
    cands = _fractional(arc_flows(pool, lam))
    scope = None
    if not cands:
        per_k = _fractional(arc_flows(pool, lam, per_class=True))
        if not per_k:
            return None
        scope, arc = per_k[0][1][0], per_k[0][1][1]
        return (scope, arc)

    best = None
    for gap, arc in cands[:max_candidates]:
        score = min(_probe(inst, pool, (None, arc, 0)),
                    _probe(inst, pool, (None, arc, 1)))
        if best is None or score > best[0] + 1e-9:
            best = (score, arc)
    return (None, best[1])


def _probe(inst, pool, decision):
    override = {}
    for idx, col in enumerate(pool):
        if not column_complies(col, [decision]):
            override[idx] = col.cost + PENALTY
    sol = solve_rmp(inst, pool, cost_override=override)
    return sol.value
